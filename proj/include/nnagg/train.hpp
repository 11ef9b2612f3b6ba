#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nnagg/dataset.hpp"
#include "nnagg/mlp.hpp"

namespace nnagg {

enum class LossKind { Mse, Bce };
enum class OptimizerKind { Sgd, Adam };

LossKind loss_from_string(std::string_view name);
std::string_view to_string(LossKind k);
OptimizerKind optimizer_from_string(std::string_view name);
std::string_view to_string(OptimizerKind k);

// Predictions are clamped to [kBceClamp, 1-kBceClamp] before the logs so
// BCE stays finite and comparable across runs.
inline constexpr double kBceClamp = 1e-7;

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamParams adam;
  LossKind loss = LossKind::Mse;
  std::uint64_t shuffle_seed = 0;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> per_epoch_train_loss;
  std::uint64_t final_params_checksum = 0;
};

// MSE: mean over batch and outputs of (p-t)^2.
// BCE: mean over batch and outputs of -[t ln p + (1-t) ln(1-p)].
double loss_value(const Matrix& predictions, const Matrix& targets, LossKind kind);

// d loss / d params in the same flat ordering as Mlp::params, for the loss
// averaged over the whole batch.
std::vector<double> gradients(const Mlp& mlp, const Matrix& inputs,
                              const Matrix& targets, LossKind kind);

// Mini-batch gradient descent. The input network is taken by value and left
// untouched at the caller; reusing a trained network as the input without
// reinitialization is exactly sequential transfer. Mini-batches are drawn by
// a seeded shuffle each epoch; Adam moments reset at call start; the recorded
// per-epoch loss is over the full training set after that epoch's updates.
std::pair<Mlp, TrainHistory> train(Mlp mlp, const Dataset& train_set,
                                   const TrainConfig& cfg);

}  // namespace nnagg
