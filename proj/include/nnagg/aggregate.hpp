#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nnagg/dataset.hpp"
#include "nnagg/mlp.hpp"
#include "nnagg/train.hpp"

namespace nnagg {

// Normalized convex weights over k parties.
struct AggregateWeights {
  std::vector<double> weights;

  void validate() const;  // nonnegative, sum within 1e-12 of 1
  static AggregateWeights uniform(std::size_t k);
};

// Element-wise weighted average of corresponding weights and biases. All
// networks must share an identical spec. Accumulation is fixed left-to-right
// in input order, so results are reproducible bit-for-bit; with uniform
// weights and k=2 the result per index is exactly (N1(i)+N2(i))/2.
Mlp average_ensemble(std::span<const Mlp> networks, const AggregateWeights& weights);

// weights_j = |D_j| / sum |D_i|
AggregateWeights size_weights(std::span<const Dataset> datasets);

// weights_j proportional to |D_j| * 4*p_j*(1-p_j), p_j the positive-label
// fraction: single-class sets get weight 0; if every set is single-class the
// weights fall back to uniform. Classification datasets only.
AggregateWeights balance_weights(std::span<const Dataset> datasets);

// Frozen expert networks plus a head whose input is the base features
// augmented with every expert's outputs, in stored order.
struct SeriesModel {
  std::vector<Mlp> experts;
  Mlp head;
  int base_input_dim = 0;

  std::size_t expert_output_dim() const;
  // [x || expert_1(x) || ... || expert_{k-1}(x)] fed to the head; expert
  // outputs are computed on the fly at every call.
  Matrix forward(const Matrix& inputs) const;
  Matrix augment(const Matrix& inputs) const;
};

// Head initialized on the augmented spec (input_dim = base + sum of expert
// output dims); experts stored frozen.
SeriesModel build_series_model(std::vector<Mlp> experts, const MlpSpec& base_spec,
                               std::uint64_t seed);

// One row per protocol stage: loss on that stage's training data and on the
// shared test set, both under cfg.loss.
struct StageMetrics {
  std::string stage;
  double train_loss = 0.0;
  double test_loss = 0.0;
};

struct SeriesResult {
  SeriesModel model;
  std::vector<StageMetrics> stages;
  double pre_test_loss = 0.0;   // first expert alone on the test set
  double post_test_loss = 0.0;  // full series model on the test set
};

// Trains k-1 experts independently on the first k-1 parts, then trains only
// the head on the final part with inputs augmented by the frozen experts.
SeriesResult train_series(std::span<const Dataset> parts, const Dataset& test,
                          const MlpSpec& base_spec, const TrainConfig& cfg,
                          std::uint64_t seed);

struct TransferResult {
  Mlp model;
  std::vector<StageMetrics> stages;
  double pre_test_loss = 0.0;
  double post_test_loss = 0.0;
};

// Initializes once, then trains sequentially on each dataset in the given
// order without reinitializing.
TransferResult train_transfer(std::span<const Dataset> parts, const Dataset& test,
                              const MlpSpec& spec, const TrainConfig& cfg,
                              std::uint64_t seed);

enum class WeightingKind { Uniform, Size, Balance };

struct EnsembleResult {
  Mlp model;
  std::vector<Mlp> party_models;
  std::vector<StageMetrics> stages;
  double pre_test_loss = 0.0;   // first party's model on the test set
  double post_test_loss = 0.0;  // averaged model on the test set
};

// Trains one identically-initialized network per party, then averages the
// parameters element-wise under the chosen weighting.
EnsembleResult train_average_ensemble(std::span<const Dataset> parts, const Dataset& test,
                                      const MlpSpec& spec, const TrainConfig& cfg,
                                      std::uint64_t seed, WeightingKind weighting);

struct BaselineResult {
  Mlp model;
  std::vector<StageMetrics> stages;
  double pre_test_loss = 0.0;
  double post_test_loss = 0.0;
};

// Concatenates the datasets in declared order and trains once; the
// data-sharing contrast, labeled "none" in reports.
BaselineResult train_datasharing_baseline(std::span<const Dataset> parts,
                                          const Dataset& test, const MlpSpec& spec,
                                          const TrainConfig& cfg, std::uint64_t seed);

}  // namespace nnagg
