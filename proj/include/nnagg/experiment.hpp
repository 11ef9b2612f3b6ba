#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nnagg/aggregate.hpp"
#include "nnagg/dataset.hpp"
#include "nnagg/metrics.hpp"
#include "nnagg/polynomial.hpp"
#include "nnagg/train.hpp"

namespace nnagg {

enum class Method {
  Average,
  AverageSizeWeighted,
  AverageBalanceWeighted,
  Series,
  Transfer,
  None,
};

Method method_from_string(std::string_view name);
std::string_view to_string(Method m);

// One sweep cell. Regression conditions vary size/degree/noise; both tasks
// can sweep epochs, batch size, and hidden width.
struct Condition {
  std::size_t size = 0;
  int degree = 0;
  double noise = 0.0;
  int epochs = 0;
  int batch_size = 0;
  int neurons = 0;  // hidden width; 0 = use the configured architecture
};

struct ExperimentConfig {
  Task task = Task::Regression;
  std::vector<Method> methods = {Method::Average, Method::Series, Method::Transfer,
                                 Method::None};

  // Regression sweep axes.
  std::vector<std::size_t> sizes = {3200};
  std::vector<int> degrees = {2};
  std::vector<double> noise_levels = {0.0};
  FeatureRange feature_range;

  // Classification data.
  std::string wdbc_path;
  std::size_t test_count = 57;

  // Shared sweep axes; empty means "use the default for the task".
  std::vector<int> epochs_sweep;
  std::vector<int> batch_sweep;
  std::vector<int> neurons_sweep;

  double test_fraction = 0.2;
  int parties = 2;
  std::vector<int> hidden;  // fixed hidden widths; empty = per-task default
  TrainConfig train;        // epochs/batch_size overridden per condition
  int trials = 10;
  std::uint64_t base_seed = 1;
  int jobs = 0;  // parallel trial workers; 0 = hardware default
  std::string out_dir = "out";

  void validate() const;
  std::vector<Condition> conditions() const;
  MlpSpec architecture(int neurons_override = 0) const;
  static int default_epochs(Task task);
};

// One method on one condition in one trial. wall_time_sec is measured, so it
// never goes into report files; everything else is derived from (config,
// base_seed) alone.
struct ReportRow {
  std::string method;
  std::string variant;  // transfer order: "fwd" / "rev"; empty otherwise
  Task task = Task::Regression;
  std::size_t size = 0;
  int degree = 0;
  double noise = 0.0;
  int epochs = 0;
  int batch_size = 0;
  int neurons = 0;
  int parties = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double pre_metric = 0.0;
  double post_metric = 0.0;
  bool has_classification_metrics = false;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  double wall_time_sec = 0.0;
};

std::vector<ReportRow> run_regression(const ExperimentConfig& cfg);

struct ClassificationArtifacts {
  std::vector<ReportRow> rows;
  // (file stem, curve) for the first trial of each method/condition.
  std::vector<std::pair<std::string, RocCurve>> roc_curves;
};

ClassificationArtifacts run_classification(const ExperimentConfig& cfg);

enum class ReportFormat { Csv, Summary };

// Group key is (method, variant-free condition); values are mean +- std of
// the post metric across trials (transfer orders pool together).
struct AggregateRow {
  std::string method;
  Condition condition;
  int count = 0;
  double post_mean = 0.0;
  double post_std = 0.0;
  double pre_mean = 0.0;
  double f1_mean = 0.0;
  double auc_mean = 0.0;
  bool has_classification_metrics = false;
};

std::vector<AggregateRow> aggregate_rows(const std::vector<ReportRow>& rows);

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const std::string& path);

// Parse-back companion for the CSV format.
std::vector<ReportRow> read_report_csv(const std::string& path);

// Flat "key = value" config text; '#' starts a comment; [section] lines are
// accepted and ignored. Later keys override earlier ones.
std::map<std::string, std::string> parse_config_file(const std::string& path);
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);

}  // namespace nnagg
