#pragma once

#include <vector>

#include "nnagg/dataset.hpp"
#include "nnagg/mlp.hpp"
#include "nnagg/rng.hpp"

namespace nnagg::testutil {

// Small random architecture for property tests: up to 3 hidden layers of
// up to 8 units.
inline MlpSpec random_small_spec(Rng& rng, bool allow_relu = true) {
  static const Activation kActs[] = {Activation::Identity, Activation::Relu,
                                     Activation::Tanh, Activation::Sigmoid};
  MlpSpec spec;
  spec.input_dim = 1 + static_cast<int>(rng.below(5));
  const auto layers = rng.below(4);  // 0..3 hidden layers
  for (std::uint64_t l = 0; l < layers; ++l) {
    Activation act;
    do {
      act = kActs[rng.below(4)];
    } while (!allow_relu && act == Activation::Relu);
    spec.hidden.push_back({1 + static_cast<int>(rng.below(8)), act});
  }
  spec.output_dim = 1 + static_cast<int>(rng.below(3));
  spec.output_activation = rng.below(2) == 0 ? Activation::Identity : Activation::Sigmoid;
  return spec;
}

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m(rows, cols);
  for (auto& v : m.data) v = rng.uniform(lo, hi);
  return m;
}

inline Mlp random_mlp(Rng& rng, const MlpSpec& spec, double lo = -0.9, double hi = 0.9) {
  Mlp net = init_mlp(spec, rng.next_u64());
  for (auto& p : net.params) p = rng.uniform(lo, hi);
  return net;
}

// y = 3x on a symmetric grid; convex benchmark for the linear net.
inline Dataset linear_dataset(std::size_t n = 32, double slope = 3.0) {
  Dataset ds;
  ds.task = Task::Regression;
  ds.name = "linear";
  ds.features = Matrix(n, 1);
  ds.targets = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    ds.features(i, 0) = x;
    ds.targets(i, 0) = slope * x;
  }
  return ds;
}

inline Dataset make_dataset(Matrix features, Matrix targets,
                            Task task = Task::Regression) {
  Dataset ds;
  ds.features = std::move(features);
  ds.targets = std::move(targets);
  ds.task = task;
  ds.name = "test";
  return ds;
}

}  // namespace nnagg::testutil
