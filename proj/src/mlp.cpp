#include "nnagg/mlp.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "nnagg/errors.hpp"
#include "nnagg/rng.hpp"

namespace nnagg {

Activation activation_from_string(std::string_view name) {
  if (name == "identity" || name == "linear") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw ConfigError("unknown activation: " + std::string(name));
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "identity";
}

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Relu: return x > 0.0 ? x : 0.0;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

double activation_derivative(Activation a, double x, double y) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::Relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Sigmoid: return y * (1.0 - y);
  }
  return 1.0;
}

void MlpSpec::validate() const {
  if (input_dim < 1) throw ConfigError("MlpSpec: input_dim must be >= 1");
  if (output_dim < 1) throw ConfigError("MlpSpec: output_dim must be >= 1");
  for (const auto& layer : hidden) {
    if (layer.width < 1) throw ConfigError("MlpSpec: hidden width must be >= 1");
  }
}

std::vector<int> MlpSpec::layer_dims() const {
  std::vector<int> dims;
  dims.reserve(hidden.size() + 2);
  dims.push_back(input_dim);
  for (const auto& layer : hidden) dims.push_back(layer.width);
  dims.push_back(output_dim);
  return dims;
}

Activation MlpSpec::layer_activation(std::size_t layer) const {
  return layer < hidden.size() ? hidden[layer].activation : output_activation;
}

std::size_t MlpSpec::param_count() const {
  const auto dims = layer_dims();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    n += static_cast<std::size_t>(dims[l]) * dims[l + 1] + dims[l + 1];
  }
  return n;
}

std::size_t Mlp::layer_offset(std::size_t layer) const {
  const auto dims = spec.layer_dims();
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += static_cast<std::size_t>(dims[l]) * dims[l + 1] + dims[l + 1];
  }
  return off;
}

std::size_t Mlp::param_index(std::size_t layer, ParamKind kind, std::size_t row,
                             std::size_t col) const {
  const auto dims = spec.layer_dims();
  if (layer + 1 >= dims.size()) throw ShapeError("param_index: layer out of range");
  const auto fan_in = static_cast<std::size_t>(dims[layer]);
  const auto fan_out = static_cast<std::size_t>(dims[layer + 1]);
  if (row >= fan_out) throw ShapeError("param_index: row out of range");
  const std::size_t base = layer_offset(layer);
  if (kind == ParamKind::Weight) {
    if (col >= fan_in) throw ShapeError("param_index: col out of range");
    return base + row * fan_in + col;
  }
  if (col != 0) throw ShapeError("param_index: bias has no column");
  return base + fan_out * fan_in + row;
}

std::vector<double> Mlp::forward_one(std::span<const double> input) const {
  if (input.size() != static_cast<std::size_t>(spec.input_dim)) {
    throw ShapeError("forward: input has wrong dimension");
  }
  const auto dims = spec.layer_dims();
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  const double* p = params.data();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(dims[l]);
    const auto fan_out = static_cast<std::size_t>(dims[l + 1]);
    const double* w = p;
    const double* b = p + fan_out * fan_in;
    next.assign(fan_out, 0.0);
    const Activation act = spec.layer_activation(l);
    for (std::size_t r = 0; r < fan_out; ++r) {
      double z = b[r];
      const double* wr = w + r * fan_in;
      for (std::size_t c = 0; c < fan_in; ++c) z += wr[c] * cur[c];
      next[r] = apply_activation(act, z);
    }
    cur.swap(next);
    p = b + fan_out;
  }
  return cur;
}

Matrix Mlp::forward(const Matrix& inputs) const {
  if (inputs.cols != static_cast<std::size_t>(spec.input_dim)) {
    throw ShapeError("forward: batch has wrong input dimension");
  }
  Matrix out(inputs.rows, static_cast<std::size_t>(spec.output_dim));
  for (std::size_t i = 0; i < inputs.rows; ++i) {
    const auto y = forward_one(inputs.row(i));
    for (std::size_t j = 0; j < y.size(); ++j) out(i, j) = y[j];
  }
  return out;
}

std::uint64_t Mlp::params_checksum() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const double v : params) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

Mlp init_mlp(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Mlp net;
  net.spec = spec;
  net.params.assign(spec.param_count(), 0.0);
  Rng rng(seed);
  const auto dims = spec.layer_dims();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const auto fan_in = static_cast<std::size_t>(dims[l]);
    const auto fan_out = static_cast<std::size_t>(dims[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < fan_out * fan_in; ++i) {
      net.params[off + i] = rng.uniform(-limit, limit);
    }
    off += fan_out * fan_in + fan_out;  // biases stay zero
  }
  return net;
}

}  // namespace nnagg
