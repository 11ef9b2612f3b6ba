#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nnagg/matrix.hpp"

namespace nnagg {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

Activation activation_from_string(std::string_view name);
std::string_view to_string(Activation a);

double apply_activation(Activation a, double x);
// Derivative expressed through pre-activation x and activation value y.
double activation_derivative(Activation a, double x, double y);

struct LayerSpec {
  int width = 0;
  Activation activation = Activation::Relu;
  bool operator==(const LayerSpec&) const = default;
};

// Architecture of a feed-forward network. Parameter count is fully
// determined: sum over layers of fan_in*fan_out + fan_out.
struct MlpSpec {
  int input_dim = 0;
  std::vector<LayerSpec> hidden;
  int output_dim = 0;
  Activation output_activation = Activation::Identity;

  bool operator==(const MlpSpec&) const = default;

  void validate() const;  // throws ConfigError on zero/negative dimensions

  // [input_dim, hidden widths..., output_dim]
  std::vector<int> layer_dims() const;
  std::size_t num_layers() const { return hidden.size() + 1; }
  Activation layer_activation(std::size_t layer) const;
  std::size_t param_count() const;
};

enum class ParamKind { Weight, Bias };

// A multilayer perceptron: spec plus a flat parameter vector. Layout is
// layer-major: for each layer, weights row-major (fan_out x fan_in), then
// biases (fan_out). An Mlp value is an immutable snapshot outside training
// and safe to copy between threads.
struct Mlp {
  MlpSpec spec;
  std::vector<double> params;

  std::size_t layer_offset(std::size_t layer) const;
  std::size_t param_index(std::size_t layer, ParamKind kind, std::size_t row,
                          std::size_t col = 0) const;

  double weight(std::size_t layer, std::size_t row, std::size_t col) const {
    return params[param_index(layer, ParamKind::Weight, row, col)];
  }
  double bias(std::size_t layer, std::size_t row) const {
    return params[param_index(layer, ParamKind::Bias, row)];
  }

  // Batch forward pass: inputs rows x input_dim -> rows x output_dim.
  Matrix forward(const Matrix& inputs) const;
  std::vector<double> forward_one(std::span<const double> input) const;

  // FNV-1a over the little-endian bytes of params.
  std::uint64_t params_checksum() const;
};

// Weights uniform in +-sqrt(6/(fan_in+fan_out)), biases zero. Identical
// (spec, seed) yields bit-identical params.
Mlp init_mlp(const MlpSpec& spec, std::uint64_t seed);

}  // namespace nnagg
