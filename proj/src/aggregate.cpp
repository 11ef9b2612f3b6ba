#include "nnagg/aggregate.hpp"

#include <cmath>
#include <numeric>

#include "nnagg/errors.hpp"
#include "nnagg/rng.hpp"

namespace nnagg {

void AggregateWeights::validate() const {
  if (weights.empty()) throw ConfigError("weights: empty vector");
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("weights: must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("weights: must sum to 1");
}

AggregateWeights AggregateWeights::uniform(std::size_t k) {
  if (k == 0) throw ConfigError("weights: k must be >= 1");
  return {std::vector<double>(k, 1.0 / static_cast<double>(k))};
}

Mlp average_ensemble(std::span<const Mlp> networks, const AggregateWeights& weights) {
  if (networks.empty()) throw ConfigError("average_ensemble: no networks");
  if (weights.weights.size() != networks.size()) {
    throw ConfigError("average_ensemble: weight count != network count");
  }
  weights.validate();
  for (const auto& net : networks) {
    if (!(net.spec == networks[0].spec)) {
      throw ArchitectureError("average_ensemble: networks have different architectures");
    }
  }

  Mlp out;
  out.spec = networks[0].spec;
  const std::size_t n = networks[0].params.size();
  out.params.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < networks.size(); ++j) {
      acc += weights.weights[j] * networks[j].params[i];
    }
    out.params[i] = acc;
  }
  return out;
}

AggregateWeights size_weights(std::span<const Dataset> datasets) {
  if (datasets.empty()) throw ConfigError("size_weights: no datasets");
  double total = 0.0;
  for (const auto& ds : datasets) {
    if (ds.size() == 0) throw ConfigError("size_weights: empty dataset");
    total += static_cast<double>(ds.size());
  }
  AggregateWeights w;
  for (const auto& ds : datasets) {
    w.weights.push_back(static_cast<double>(ds.size()) / total);
  }
  return w;
}

AggregateWeights balance_weights(std::span<const Dataset> datasets) {
  if (datasets.empty()) throw ConfigError("balance_weights: no datasets");
  std::vector<double> raw;
  double total = 0.0;
  for (const auto& ds : datasets) {
    if (ds.task != Task::Classification) {
      throw TaskKindError("balance_weights: requires classification datasets");
    }
    if (ds.size() == 0) throw ConfigError("balance_weights: empty dataset");
    double positives = 0.0;
    for (const double t : ds.targets.data) {
      if (t != 0.0 && t != 1.0) throw DataError("balance_weights: labels must be 0 or 1");
      positives += t;
    }
    const double p = positives / static_cast<double>(ds.size());
    // Size credit scaled by Gini impurity: 1 for a balanced set, 0 for a
    // single-class set.
    const double v = static_cast<double>(ds.size()) * 4.0 * p * (1.0 - p);
    raw.push_back(v);
    total += v;
  }
  if (total == 0.0) return AggregateWeights::uniform(datasets.size());
  AggregateWeights w;
  for (const double v : raw) w.weights.push_back(v / total);
  return w;
}

std::size_t SeriesModel::expert_output_dim() const {
  std::size_t total = 0;
  for (const auto& e : experts) total += static_cast<std::size_t>(e.spec.output_dim);
  return total;
}

Matrix SeriesModel::augment(const Matrix& inputs) const {
  if (inputs.cols != static_cast<std::size_t>(base_input_dim)) {
    throw ShapeError("series: input dimension mismatch");
  }
  Matrix aug(inputs.rows, inputs.cols + expert_output_dim());
  for (std::size_t i = 0; i < inputs.rows; ++i) {
    for (std::size_t j = 0; j < inputs.cols; ++j) aug(i, j) = inputs(i, j);
  }
  std::size_t col = inputs.cols;
  for (const auto& expert : experts) {
    const Matrix pred = expert.forward(inputs);
    for (std::size_t i = 0; i < inputs.rows; ++i) {
      for (std::size_t j = 0; j < pred.cols; ++j) aug(i, col + j) = pred(i, j);
    }
    col += pred.cols;
  }
  return aug;
}

Matrix SeriesModel::forward(const Matrix& inputs) const {
  return head.forward(augment(inputs));
}

SeriesModel build_series_model(std::vector<Mlp> experts, const MlpSpec& base_spec,
                               std::uint64_t seed) {
  base_spec.validate();
  std::size_t extra = 0;
  for (const auto& e : experts) {
    if (e.spec.input_dim != base_spec.input_dim) {
      throw ArchitectureError("build_series_model: expert input dim != base input dim");
    }
    extra += static_cast<std::size_t>(e.spec.output_dim);
  }
  MlpSpec head_spec = base_spec;
  head_spec.input_dim = base_spec.input_dim + static_cast<int>(extra);

  SeriesModel model;
  model.experts = std::move(experts);
  model.head = init_mlp(head_spec, seed);
  model.base_input_dim = base_spec.input_dim;
  return model;
}

namespace {

double test_loss_of(const Mlp& net, const Dataset& test, LossKind loss) {
  return loss_value(net.forward(test.features), test.targets, loss);
}

void check_parts(std::span<const Dataset> parts) {
  for (const auto& part : parts) {
    if (part.size() == 0) throw DataError("empty party dataset");
    if (part.feature_dim() != parts[0].feature_dim() ||
        part.target_dim() != parts[0].target_dim()) {
      throw DataError("party datasets have mismatched dimensions");
    }
  }
}

}  // namespace

SeriesResult train_series(std::span<const Dataset> parts, const Dataset& test,
                          const MlpSpec& base_spec, const TrainConfig& cfg,
                          std::uint64_t seed) {
  if (parts.size() < 2) throw ConfigError("train_series: needs at least 2 parties");
  check_parts(parts);

  SeriesResult result;
  std::vector<Mlp> experts;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    Mlp net = init_mlp(base_spec, mix_seed(seed, i + 1));
    auto [trained, history] = train(std::move(net), parts[i], cfg);
    result.stages.push_back({"expert" + std::to_string(i + 1),
                             history.per_epoch_train_loss.empty()
                                 ? test_loss_of(trained, parts[i], cfg.loss)
                                 : history.per_epoch_train_loss.back(),
                             test_loss_of(trained, test, cfg.loss)});
    experts.push_back(std::move(trained));
  }
  result.pre_test_loss = result.stages.front().test_loss;

  SeriesModel model = build_series_model(std::move(experts), base_spec, seed);

  // Head training set: final party's features augmented with frozen expert
  // outputs. The augmented matrix is a transient buffer; experts are always
  // re-evaluated from their frozen parameters.
  const Dataset& last = parts.back();
  Dataset head_set;
  head_set.features = model.augment(last.features);
  head_set.targets = last.targets;
  head_set.task = last.task;
  head_set.name = last.name + "/augmented";

  auto [head, history] = train(std::move(model.head), head_set, cfg);
  model.head = std::move(head);

  Dataset test_aug;
  test_aug.features = model.augment(test.features);
  test_aug.targets = test.targets;
  const double post = loss_value(model.head.forward(test_aug.features),
                                 test_aug.targets, cfg.loss);
  result.stages.push_back({"head",
                           history.per_epoch_train_loss.empty()
                               ? loss_value(model.head.forward(head_set.features),
                                            head_set.targets, cfg.loss)
                               : history.per_epoch_train_loss.back(),
                           post});
  result.post_test_loss = post;
  result.model = std::move(model);
  return result;
}

TransferResult train_transfer(std::span<const Dataset> parts, const Dataset& test,
                              const MlpSpec& spec, const TrainConfig& cfg,
                              std::uint64_t seed) {
  if (parts.empty()) throw ConfigError("train_transfer: no datasets");
  check_parts(parts);

  TransferResult result;
  Mlp net = init_mlp(spec, seed);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto [trained, history] = train(std::move(net), parts[i], cfg);
    net = std::move(trained);
    result.stages.push_back({"stage" + std::to_string(i + 1),
                             history.per_epoch_train_loss.empty()
                                 ? test_loss_of(net, parts[i], cfg.loss)
                                 : history.per_epoch_train_loss.back(),
                             test_loss_of(net, test, cfg.loss)});
  }
  result.pre_test_loss = result.stages.front().test_loss;
  result.post_test_loss = result.stages.back().test_loss;
  result.model = std::move(net);
  return result;
}

EnsembleResult train_average_ensemble(std::span<const Dataset> parts, const Dataset& test,
                                      const MlpSpec& spec, const TrainConfig& cfg,
                                      std::uint64_t seed, WeightingKind weighting) {
  if (parts.empty()) throw ConfigError("train_average_ensemble: no datasets");
  check_parts(parts);

  EnsembleResult result;
  // All parties start from the same initialization so the averaged
  // parameters stay aligned unit-for-unit.
  const Mlp initial = init_mlp(spec, seed);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto [trained, history] = train(initial, parts[i], cfg);
    result.stages.push_back({"party" + std::to_string(i + 1),
                             history.per_epoch_train_loss.empty()
                                 ? test_loss_of(trained, parts[i], cfg.loss)
                                 : history.per_epoch_train_loss.back(),
                             test_loss_of(trained, test, cfg.loss)});
    result.party_models.push_back(std::move(trained));
  }
  result.pre_test_loss = result.stages.front().test_loss;

  AggregateWeights weights;
  switch (weighting) {
    case WeightingKind::Uniform: weights = AggregateWeights::uniform(parts.size()); break;
    case WeightingKind::Size: weights = size_weights(parts); break;
    case WeightingKind::Balance: weights = balance_weights(parts); break;
  }
  result.model = average_ensemble(result.party_models, weights);
  result.post_test_loss = test_loss_of(result.model, test, cfg.loss);
  const Dataset combined = concat_datasets(parts);
  result.stages.push_back({"averaged",
                           loss_value(result.model.forward(combined.features),
                                      combined.targets, cfg.loss),
                           result.post_test_loss});
  return result;
}

BaselineResult train_datasharing_baseline(std::span<const Dataset> parts,
                                          const Dataset& test, const MlpSpec& spec,
                                          const TrainConfig& cfg, std::uint64_t seed) {
  if (parts.empty()) throw ConfigError("baseline: no datasets");
  check_parts(parts);

  const Dataset combined = concat_datasets(parts);
  Mlp net = init_mlp(spec, seed);
  auto [trained, history] = train(std::move(net), combined, cfg);
  BaselineResult result;
  result.stages.push_back({"combined",
                           history.per_epoch_train_loss.empty()
                               ? test_loss_of(trained, combined, cfg.loss)
                               : history.per_epoch_train_loss.back(),
                           test_loss_of(trained, test, cfg.loss)});
  result.pre_test_loss = result.stages.back().test_loss;
  result.post_test_loss = result.stages.back().test_loss;
  result.model = std::move(trained);
  return result;
}

}  // namespace nnagg
