#include "nnagg/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nnagg/errors.hpp"
#include "nnagg/rng.hpp"

namespace nnagg {

LossKind loss_from_string(std::string_view name) {
  if (name == "mse") return LossKind::Mse;
  if (name == "bce") return LossKind::Bce;
  throw ConfigError("unknown loss: " + std::string(name));
}

std::string_view to_string(LossKind k) {
  return k == LossKind::Mse ? "mse" : "bce";
}

OptimizerKind optimizer_from_string(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer: " + std::string(name));
}

std::string_view to_string(OptimizerKind k) {
  return k == OptimizerKind::Sgd ? "sgd" : "adam";
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("TrainConfig: epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("TrainConfig: learning_rate must be > 0");
  if (!(adam.beta1 > 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 > 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("TrainConfig: adam betas must be in (0,1)");
  }
  if (!(adam.epsilon > 0.0)) throw ConfigError("TrainConfig: adam epsilon must be > 0");
}

double loss_value(const Matrix& predictions, const Matrix& targets, LossKind kind) {
  if (predictions.rows != targets.rows || predictions.cols != targets.cols) {
    throw ShapeError("loss: prediction and target shapes differ");
  }
  if (predictions.rows == 0) throw DataError("loss: empty batch");
  const double count = static_cast<double>(predictions.data.size());
  double sum = 0.0;
  if (kind == LossKind::Mse) {
    for (std::size_t i = 0; i < predictions.data.size(); ++i) {
      const double r = predictions.data[i] - targets.data[i];
      sum += r * r;
    }
    return sum / count;
  }
  for (std::size_t i = 0; i < predictions.data.size(); ++i) {
    const double t = targets.data[i];
    if (t != 0.0 && t != 1.0) throw DataError("bce: targets must be 0 or 1");
    const double p = std::clamp(predictions.data[i], kBceClamp, 1.0 - kBceClamp);
    if (!(p > 0.0 && p < 1.0)) throw NumericError("bce: prediction outside (0,1)");
    sum += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
  }
  return sum / count;
}

namespace {

// Per-layer forward trace of one sample, for backprop.
struct Trace {
  std::vector<std::vector<double>> pre;    // z per layer
  std::vector<std::vector<double>> post;   // activation per layer
};

void forward_trace(const Mlp& mlp, std::span<const double> input, Trace& tr) {
  const auto dims = mlp.spec.layer_dims();
  const std::size_t layers = dims.size() - 1;
  tr.pre.resize(layers);
  tr.post.resize(layers);
  const double* p = mlp.params.data();
  std::span<const double> cur = input;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto fan_in = static_cast<std::size_t>(dims[l]);
    const auto fan_out = static_cast<std::size_t>(dims[l + 1]);
    const double* w = p;
    const double* b = p + fan_out * fan_in;
    auto& z = tr.pre[l];
    auto& a = tr.post[l];
    z.assign(fan_out, 0.0);
    a.assign(fan_out, 0.0);
    const Activation act = mlp.spec.layer_activation(l);
    for (std::size_t r = 0; r < fan_out; ++r) {
      double s = b[r];
      const double* wr = w + r * fan_in;
      for (std::size_t c = 0; c < fan_in; ++c) s += wr[c] * cur[c];
      z[r] = s;
      a[r] = apply_activation(act, s);
    }
    cur = a;
    p = b + fan_out;
  }
}

// Accumulates d(batch mean loss)/d params over the given rows, in row order.
// Shared by gradients() and the training loop so a full-batch SGD step is
// exactly params - lr * gradients().
void accumulate_gradients(const Mlp& mlp, const Matrix& inputs, const Matrix& targets,
                          std::span<const std::size_t> rows, LossKind kind,
                          std::vector<double>& grad) {
  const auto dims = mlp.spec.layer_dims();
  const std::size_t layers = dims.size() - 1;
  const double denom =
      static_cast<double>(rows.size()) * static_cast<double>(targets.cols);

  Trace tr;
  std::vector<std::vector<double>> delta(layers);
  for (const std::size_t row : rows) {
    forward_trace(mlp, inputs.row(row), tr);

    // Output delta: dL/dp through the output activation.
    const std::size_t out_dim = static_cast<std::size_t>(dims[layers]);
    auto& dout = delta[layers - 1];
    dout.assign(out_dim, 0.0);
    const Activation out_act = mlp.spec.output_activation;
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double p = tr.post[layers - 1][o];
      const double t = targets(row, o);
      double dldp;
      if (kind == LossKind::Mse) {
        dldp = 2.0 * (p - t) / denom;
      } else if (p <= kBceClamp || p >= 1.0 - kBceClamp) {
        dldp = 0.0;  // loss is flat inside the clamp region
      } else {
        dldp = (-t / p + (1.0 - t) / (1.0 - p)) / denom;
      }
      dout[o] = dldp * activation_derivative(out_act, tr.pre[layers - 1][o], p);
    }

    // Hidden deltas, back to front.
    for (std::size_t l = layers - 1; l > 0; --l) {
      const auto fan_in = static_cast<std::size_t>(dims[l]);
      const auto fan_out = static_cast<std::size_t>(dims[l + 1]);
      const double* w = mlp.params.data() + mlp.layer_offset(l);
      auto& dprev = delta[l - 1];
      dprev.assign(fan_in, 0.0);
      const Activation act = mlp.spec.layer_activation(l - 1);
      for (std::size_t c = 0; c < fan_in; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < fan_out; ++r) s += w[r * fan_in + c] * delta[l][r];
        dprev[c] = s * activation_derivative(act, tr.pre[l - 1][c], tr.post[l - 1][c]);
      }
    }

    // Weight and bias gradients.
    std::size_t off = 0;
    std::span<const double> a_prev = inputs.row(row);
    for (std::size_t l = 0; l < layers; ++l) {
      const auto fan_in = static_cast<std::size_t>(dims[l]);
      const auto fan_out = static_cast<std::size_t>(dims[l + 1]);
      for (std::size_t r = 0; r < fan_out; ++r) {
        const double d = delta[l][r];
        double* gw = grad.data() + off + r * fan_in;
        for (std::size_t c = 0; c < fan_in; ++c) gw[c] += d * a_prev[c];
        grad[off + fan_out * fan_in + r] += d;
      }
      a_prev = tr.post[l];
      off += fan_out * fan_in + fan_out;
    }
  }
}

void check_batch(const Mlp& mlp, const Matrix& inputs, const Matrix& targets) {
  if (inputs.rows == 0) throw DataError("gradients: empty batch");
  if (inputs.cols != static_cast<std::size_t>(mlp.spec.input_dim)) {
    throw ShapeError("gradients: input dimension mismatch");
  }
  if (targets.rows != inputs.rows ||
      targets.cols != static_cast<std::size_t>(mlp.spec.output_dim)) {
    throw ShapeError("gradients: target shape mismatch");
  }
}

}  // namespace

std::vector<double> gradients(const Mlp& mlp, const Matrix& inputs,
                              const Matrix& targets, LossKind kind) {
  check_batch(mlp, inputs, targets);
  std::vector<double> grad(mlp.params.size(), 0.0);
  std::vector<std::size_t> rows(inputs.rows);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  accumulate_gradients(mlp, inputs, targets, rows, kind, grad);
  return grad;
}

std::pair<Mlp, TrainHistory> train(Mlp mlp, const Dataset& train_set,
                                   const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0) throw DataError("train: empty dataset");
  check_batch(mlp, train_set.features, train_set.targets);

  const std::size_t n = train_set.size();
  const std::size_t n_params = mlp.params.size();
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  // Adam state, reset at call start.
  std::vector<double> m, v;
  long adam_step = 0;
  if (cfg.optimizer == OptimizerKind::Adam) {
    m.assign(n_params, 0.0);
    v.assign(n_params, 0.0);
  }

  TrainHistory history;
  history.per_epoch_train_loss.reserve(static_cast<std::size_t>(cfg.epochs));

  std::vector<std::size_t> order(n);
  std::vector<double> grad(n_params, 0.0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::derive(cfg.shuffle_seed, static_cast<std::uint64_t>(epoch));
    rng.shuffle(order);

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      auto chunk = std::span(order).subspan(start, len);
      // Canonical in-batch order: accumulation is independent of the shuffle.
      std::sort(chunk.begin(), chunk.end());
      std::fill(grad.begin(), grad.end(), 0.0);
      accumulate_gradients(mlp, train_set.features, train_set.targets, chunk,
                           cfg.loss, grad);

      if (cfg.optimizer == OptimizerKind::Sgd) {
        for (std::size_t i = 0; i < n_params; ++i) {
          mlp.params[i] -= cfg.learning_rate * grad[i];
        }
      } else {
        ++adam_step;
        const double b1 = cfg.adam.beta1, b2 = cfg.adam.beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_step));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_step));
        for (std::size_t i = 0; i < n_params; ++i) {
          m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
          v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
          const double mhat = m[i] / c1;
          const double vhat = v[i] / c2;
          mlp.params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam.epsilon);
        }
      }
    }

    history.per_epoch_train_loss.push_back(
        loss_value(mlp.forward(train_set.features), train_set.targets, cfg.loss));
  }

  history.final_params_checksum = mlp.params_checksum();
  return {std::move(mlp), std::move(history)};
}

}  // namespace nnagg
