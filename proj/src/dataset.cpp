#include "nnagg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "nnagg/errors.hpp"
#include "nnagg/rng.hpp"

namespace nnagg {

std::string_view to_string(Task t) {
  return t == Task::Regression ? "regression" : "classification";
}

Task task_from_string(std::string_view name) {
  if (name == "regression") return Task::Regression;
  if (name == "classification") return Task::Classification;
  throw ConfigError("unknown task: " + std::string(name));
}

void Dataset::validate() const {
  if (features.rows != targets.rows) {
    throw DataError("dataset: feature rows != target rows");
  }
  if (task == Task::Classification) {
    for (const double t : targets.data) {
      if (t != 0.0 && t != 1.0) {
        throw DataError("dataset: classification targets must be 0 or 1");
      }
    }
  }
}

namespace {

Dataset take_rows(const Dataset& ds, std::span<const std::size_t> idx,
                  std::string name) {
  Dataset out;
  out.features = ds.features.take_rows(idx);
  out.targets = ds.targets.take_rows(idx);
  out.task = ds.task;
  out.name = std::move(name);
  out.feature_names = ds.feature_names;
  return out;
}

SplitResult split_impl(const Dataset& ds, std::size_t test_count, int parties,
                       std::uint64_t seed) {
  const std::size_t n = ds.size();
  if (test_count >= n) throw ConfigError("split: test set would consume all rows");
  if (parties < 1) throw ConfigError("split: parties must be >= 1");
  const std::size_t train_count = n - test_count;
  if (static_cast<std::size_t>(parties) > train_count) {
    throw ConfigError("split: more parties than remaining training rows");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  SplitResult result;
  result.test = take_rows(
      ds, std::span(order).subspan(train_count, test_count), ds.name + "/test");

  const std::size_t k = static_cast<std::size_t>(parties);
  const std::size_t base = train_count / k;
  const std::size_t extra = train_count % k;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    result.parts.push_back(take_rows(ds, std::span(order).subspan(pos, len),
                                     ds.name + "/part" + std::to_string(p + 1)));
    pos += len;
  }
  return result;
}

}  // namespace

SplitResult split_dataset(const Dataset& ds, double test_fraction, int parties,
                          std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("split: test_fraction must be in (0,1)");
  }
  const auto test_count = static_cast<std::size_t>(
      std::ceil(test_fraction * static_cast<double>(ds.size())));
  return split_impl(ds, test_count, parties, seed);
}

SplitResult split_dataset_count(const Dataset& ds, std::size_t test_count,
                                int parties, std::uint64_t seed) {
  return split_impl(ds, test_count, parties, seed);
}

Dataset concat_datasets(std::span<const Dataset> parts) {
  if (parts.empty()) throw ConfigError("concat: no datasets given");
  const std::size_t fdim = parts[0].feature_dim();
  const std::size_t tdim = parts[0].target_dim();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.feature_dim() != fdim || p.target_dim() != tdim) {
      throw DataError("concat: dimension mismatch between datasets");
    }
    total += p.size();
  }
  Dataset out;
  out.features = Matrix(total, fdim);
  out.targets = Matrix(total, tdim);
  out.task = parts[0].task;
  out.name = parts[0].name + "/combined";
  out.feature_names = parts[0].feature_names;
  std::size_t row = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.size(); ++i, ++row) {
      for (std::size_t j = 0; j < fdim; ++j) out.features(row, j) = p.features(i, j);
      for (std::size_t j = 0; j < tdim; ++j) out.targets(row, j) = p.targets(i, j);
    }
  }
  return out;
}

NormStats fit_normalizer(const Dataset& train) {
  if (train.size() == 0) throw DataError("fit_normalizer: empty dataset");
  const std::size_t d = train.feature_dim();
  const std::size_t n = train.size();
  NormStats stats;
  stats.min.assign(d, 0.0);
  stats.max.assign(d, 0.0);
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = train.features(0, j), hi = lo, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = train.features(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dlt = train.features(i, j) - mean;
      ss += dlt * dlt;
    }
    stats.min[j] = lo;
    stats.max[j] = hi;
    stats.mean[j] = mean;
    stats.stddev[j] = std::sqrt(ss / static_cast<double>(n));
  }
  return stats;
}

Dataset apply_normalizer(const NormStats& stats, const Dataset& ds) {
  if (stats.min.size() != ds.feature_dim()) {
    throw ShapeError("apply_normalizer: stats dimension mismatch");
  }
  Dataset out = ds;
  for (std::size_t j = 0; j < ds.feature_dim(); ++j) {
    const double range = stats.max[j] - stats.min[j];
    for (std::size_t i = 0; i < ds.size(); ++i) {
      out.features(i, j) =
          range == 0.0 ? 0.0 : (ds.features(i, j) - stats.min[j]) / range;
    }
  }
  return out;
}

TargetStats fit_target_stats(const Dataset& train) {
  if (train.size() == 0) throw DataError("fit_target_stats: empty dataset");
  double sum = 0.0;
  for (const double t : train.targets.data) sum += t;
  const auto n = static_cast<double>(train.targets.data.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (const double t : train.targets.data) ss += (t - mean) * (t - mean);
  const double sd = std::sqrt(ss / n);
  return {mean, sd == 0.0 ? 1.0 : sd};
}

Dataset standardize_targets(const TargetStats& stats, const Dataset& ds) {
  Dataset out = ds;
  for (double& t : out.targets.data) t = (t - stats.mean) / stats.stddev;
  return out;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.precision(17);
  for (std::size_t j = 0; j < ds.feature_dim(); ++j) {
    if (j < ds.feature_names.size()) {
      out << ds.feature_names[j];
    } else {
      out << 'x' << (j + 1);
    }
    out << ',';
  }
  out << "y\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.feature_dim(); ++j) {
      out << ds.features(i, j) << ',';
    }
    out << ds.targets(i, 0) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Dataset read_dataset_csv(const std::string& path, Task task) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2) throw ParseError(path + ": need at least one feature and y");
  const std::size_t d = header.size() - 1;

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto* begin = cell.data();
      const auto* end = begin + cell.size();
      auto [ptr, ec] = std::from_chars(begin, end, v);
      if (ec != std::errc() || ptr != end) {
        throw ParseError(path + ": row " + std::to_string(lineno) +
                         ": bad number '" + cell + "'");
      }
      values.push_back(v);
      ++col;
    }
    if (col != header.size()) {
      throw ParseError(path + ": row " + std::to_string(lineno) +
                       ": expected " + std::to_string(header.size()) +
                       " columns, got " + std::to_string(col));
    }
    ++rows;
  }

  Dataset ds;
  ds.task = task;
  ds.name = path;
  ds.feature_names.assign(header.begin(), header.end() - 1);
  ds.features = Matrix(rows, d);
  ds.targets = Matrix(rows, 1);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < d; ++j) ds.features(i, j) = values[i * (d + 1) + j];
    ds.targets(i, 0) = values[i * (d + 1) + d];
  }
  ds.validate();
  return ds;
}

}  // namespace nnagg
