#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nnagg/matrix.hpp"

namespace nnagg {

enum class Task { Regression, Classification };

std::string_view to_string(Task t);
Task task_from_string(std::string_view name);

// Feature matrix with targets and provenance metadata. Classification
// targets are 0/1.
struct Dataset {
  Matrix features;
  Matrix targets;
  Task task = Task::Regression;
  std::string name;
  std::vector<std::string> feature_names;

  std::size_t size() const { return features.rows; }
  std::size_t feature_dim() const { return features.cols; }
  std::size_t target_dim() const { return targets.cols; }

  void validate() const;
};

struct SplitResult {
  std::vector<Dataset> parts;
  Dataset test;
};

// Seeded shuffle; test = last ceil(test_fraction * N) rows of the shuffled
// order; the remainder is partitioned into `parties` near-equal contiguous
// parts (sizes differ by at most 1, earlier parts take the extra rows).
SplitResult split_dataset(const Dataset& ds, double test_fraction, int parties,
                          std::uint64_t seed);

// Same protocol with an exact test-row count instead of a fraction.
SplitResult split_dataset_count(const Dataset& ds, std::size_t test_count,
                                int parties, std::uint64_t seed);

// Row-wise concatenation in declared order.
Dataset concat_datasets(std::span<const Dataset> parts);

// Per-feature min/max used for scaling; mean/std retained for reporting.
// Stats come from training rows only.
struct NormStats {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> mean;
  std::vector<double> stddev;
};

NormStats fit_normalizer(const Dataset& train);
// Min-max scaling to [0,1] per feature; constant features map to 0; values
// outside the training range are not clipped.
Dataset apply_normalizer(const NormStats& stats, const Dataset& ds);

struct TargetStats {
  double mean = 0.0;
  double stddev = 1.0;
};

TargetStats fit_target_stats(const Dataset& train);
Dataset standardize_targets(const TargetStats& stats, const Dataset& ds);

// Comma-separated export with header row (x1..xd, y); parse-back companion.
void write_dataset_csv(const Dataset& ds, const std::string& path);
Dataset read_dataset_csv(const std::string& path, Task task = Task::Regression);

}  // namespace nnagg
