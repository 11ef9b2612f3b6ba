#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "nnagg/errors.hpp"
#include "nnagg/experiment.hpp"

using namespace nnagg;

#ifndef NNAGG_DATA_DIR
#define NNAGG_DATA_DIR "data"
#endif

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig small_regression_config() {
  ExperimentConfig cfg;
  cfg.task = Task::Regression;
  cfg.methods = {Method::Average, Method::Series, Method::Transfer, Method::None};
  cfg.sizes = {200};
  cfg.degrees = {2};
  cfg.noise_levels = {0.0};
  cfg.hidden = {8};
  cfg.train.epochs = 3;
  cfg.train.batch_size = 32;
  cfg.trials = 2;
  cfg.base_seed = 5;
  cfg.jobs = 1;
  return cfg;
}

}  // namespace

TEST_CASE("config file parsing: keys, lists, comments and sections") {
  const auto path = temp_path("nnagg_cfg.ini");
  std::ofstream(path) << "# comment\n[experiment]\ntask = regression\n"
                      << "methods = average, none\nsize = 400, 800\ndegree = 2\n"
                      << "noise = 0, 1\nepochs = 10\ntrials = 3\nseed = 9\n"
                      << "hidden = 16, 16\nlearning_rate = 0.01\n";
  const auto kv = parse_config_file(path);
  const ExperimentConfig cfg = config_from_map(kv);
  CHECK(cfg.task == Task::Regression);
  CHECK(cfg.methods == std::vector<Method>{Method::Average, Method::None});
  CHECK(cfg.sizes == std::vector<std::size_t>{400, 800});
  CHECK(cfg.noise_levels == std::vector<double>{0.0, 1.0});
  CHECK(cfg.epochs_sweep == std::vector<int>{10});
  CHECK(cfg.trials == 3);
  CHECK(cfg.base_seed == 9);
  CHECK(cfg.hidden == std::vector<int>{16, 16});
  CHECK(cfg.train.learning_rate == doctest::Approx(0.01));
  CHECK(cfg.train.loss == LossKind::Mse);  // derived from the task
  std::filesystem::remove(path);
}

TEST_CASE("config file parsing: unknown keys and malformed lines rejected") {
  const auto path = temp_path("nnagg_cfg_bad.ini");
  std::ofstream(path) << "nonsense_key = 1\n";
  CHECK_THROWS_AS(config_from_map(parse_config_file(path)), ConfigError);
  std::ofstream(path) << "no equals sign here\n";
  CHECK_THROWS_AS(parse_config_file(path), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("config validation catches bad combinations") {
  ExperimentConfig cfg = small_regression_config();
  cfg.methods = {Method::AverageBalanceWeighted};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = small_regression_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = small_regression_config();
  cfg.methods.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = ExperimentConfig{};
  cfg.task = Task::Classification;
  cfg.wdbc_path.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("conditions: cross product over declared sweeps") {
  ExperimentConfig cfg = small_regression_config();
  cfg.sizes = {400, 800};
  cfg.noise_levels = {0.0, 1.0, 2.0};
  cfg.epochs_sweep = {10, 20};
  const auto conds = cfg.conditions();
  CHECK(conds.size() == 2 * 3 * 2);
}

TEST_CASE("run_regression: row completeness, transfer doubled by order") {
  ExperimentConfig cfg = small_regression_config();
  const auto rows = run_regression(cfg);
  // methods: average, series, none -> 1 row each; transfer -> 2 rows
  CHECK(rows.size() == static_cast<std::size_t>(cfg.trials) * 5);
  for (const auto& row : rows) {
    CHECK(std::isfinite(row.pre_metric));
    CHECK(std::isfinite(row.post_metric));
    CHECK(row.parties == 2);
    CHECK(row.seed == cfg.base_seed + static_cast<std::uint64_t>(row.trial));
  }
  int fwd = 0, rev = 0;
  for (const auto& row : rows) {
    if (row.variant == "fwd") ++fwd;
    if (row.variant == "rev") ++rev;
  }
  CHECK(fwd == cfg.trials);
  CHECK(rev == cfg.trials);
}

TEST_CASE("run_regression: deterministic, and parallel jobs do not change rows") {
  ExperimentConfig cfg = small_regression_config();
  const auto a = run_regression(cfg);
  cfg.jobs = 4;
  const auto b = run_regression(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].variant == b[i].variant);
    CHECK(a[i].trial == b[i].trial);
    CHECK(a[i].pre_metric == b[i].pre_metric);
    CHECK(a[i].post_metric == b[i].post_metric);
  }
}

TEST_CASE("run_regression: k=1 collapses every method onto the baseline") {
  ExperimentConfig cfg = small_regression_config();
  cfg.parties = 1;
  const auto rows = run_regression(cfg);
  double none_post = 0.0;
  for (const auto& row : rows) {
    if (row.method == "none" && row.trial == 0) none_post = row.post_metric;
  }
  for (const auto& row : rows) {
    if (row.trial != 0) continue;
    CHECK(row.post_metric == none_post);
  }
}

TEST_CASE("run_classification: rows carry the classification metric block") {
  ExperimentConfig cfg;
  cfg.task = Task::Classification;
  cfg.methods = {Method::Average, Method::AverageBalanceWeighted, Method::None};
  cfg.wdbc_path = std::string(NNAGG_DATA_DIR) + "/wdbc.csv";
  cfg.hidden = {8};
  cfg.train.epochs = 2;
  cfg.train.loss = LossKind::Bce;
  cfg.trials = 1;
  cfg.jobs = 1;
  const auto artifacts = run_classification(cfg);
  CHECK(artifacts.rows.size() == 3);
  for (const auto& row : artifacts.rows) {
    CHECK(row.has_classification_metrics);
    CHECK(row.size == 569);
    CHECK(row.accuracy >= 0.0);
    CHECK(row.accuracy <= 1.0);
    CHECK(row.auc >= 0.0);
    CHECK(row.auc <= 1.0);
  }
  // trial 0 emits one ROC curve per method
  CHECK(artifacts.roc_curves.size() == 3);
  for (const auto& [stem, curve] : artifacts.roc_curves) {
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == doctest::Approx(1.0));
    CHECK(curve.points.back().tpr == doctest::Approx(1.0));
  }
}

TEST_CASE("emit_report: csv round trip preserves 12 significant digits") {
  ExperimentConfig cfg = small_regression_config();
  cfg.trials = 1;
  const auto rows = run_regression(cfg);
  const auto path = temp_path("nnagg_report.csv");
  emit_report(rows, ReportFormat::Csv, path);
  const auto back = read_report_csv(path);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].variant == rows[i].variant);
    CHECK(back[i].seed == rows[i].seed);
    const double rel = std::abs(back[i].post_metric - rows[i].post_metric) /
                       std::max(1e-300, std::abs(rows[i].post_metric));
    CHECK(rel < 1e-12);
  }
  std::filesystem::remove(path);
}

TEST_CASE("emit_report: single row gives header plus one line") {
  ExperimentConfig cfg = small_regression_config();
  cfg.trials = 1;
  cfg.methods = {Method::None};
  const auto rows = run_regression(cfg);
  REQUIRE(rows.size() == 1);
  const auto path = temp_path("nnagg_one_row.csv");
  emit_report(rows, ReportFormat::Csv, path);
  const auto text = slurp(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  std::filesystem::remove(path);
}

TEST_CASE("emit_report: identical runs produce byte-identical files") {
  ExperimentConfig cfg = small_regression_config();
  const auto rows_a = run_regression(cfg);
  const auto rows_b = run_regression(cfg);
  const auto pa = temp_path("nnagg_det_a.csv");
  const auto pb = temp_path("nnagg_det_b.csv");
  emit_report(rows_a, ReportFormat::Csv, pa);
  emit_report(rows_b, ReportFormat::Csv, pb);
  CHECK(slurp(pa) == slurp(pb));

  emit_report(rows_a, ReportFormat::Summary, pa);
  emit_report(rows_b, ReportFormat::Summary, pb);
  CHECK(slurp(pa) == slurp(pb));
  std::filesystem::remove(pa);
  std::filesystem::remove(pb);
}

TEST_CASE("aggregate_rows: groups trials, pools transfer orders, means check out") {
  ExperimentConfig cfg = small_regression_config();
  cfg.methods = {Method::Transfer, Method::None};
  const auto rows = run_regression(cfg);
  const auto aggs = aggregate_rows(rows);
  REQUIRE(aggs.size() == 2);  // transfer (both orders pooled) and none
  for (const auto& agg : aggs) {
    if (agg.method == "transfer") {
      CHECK(agg.count == cfg.trials * 2);
    } else {
      CHECK(agg.count == cfg.trials);
    }
    double sum = 0.0;
    int n = 0;
    for (const auto& row : rows) {
      if (row.method != agg.method) continue;
      sum += row.post_metric;
      ++n;
    }
    CHECK(agg.post_mean == doctest::Approx(sum / n).epsilon(1e-12));
  }
}

TEST_CASE("aggregate view mirrors the four-method, three-noise table layout") {
  ExperimentConfig cfg = small_regression_config();
  cfg.sizes = {120};
  cfg.noise_levels = {0.0, 1.0, 2.0};
  cfg.trials = 1;
  cfg.train.epochs = 2;
  const auto rows = run_regression(cfg);
  const auto aggs = aggregate_rows(rows);
  CHECK(aggs.size() == 12);  // 4 methods x noise in {0,1,2}
}

TEST_CASE("classification sweeps batch size, epochs and neurons") {
  ExperimentConfig cfg;
  cfg.task = Task::Classification;
  cfg.methods = {Method::None};
  cfg.wdbc_path = std::string(NNAGG_DATA_DIR) + "/wdbc.csv";
  cfg.train.loss = LossKind::Bce;
  cfg.epochs_sweep = {1, 2};
  cfg.batch_sweep = {16, 32};
  cfg.neurons_sweep = {4};
  cfg.trials = 1;
  cfg.jobs = 1;
  const auto artifacts = run_classification(cfg);
  CHECK(artifacts.rows.size() == 4);  // 2 epochs x 2 batch x 1 neurons
  for (const auto& row : artifacts.rows) {
    CHECK(row.neurons == 4);
    CHECK((row.epochs == 1 || row.epochs == 2));
    CHECK((row.batch_size == 16 || row.batch_size == 32));
  }
}

TEST_CASE("emit_report: empty row set rejected") {
  CHECK_THROWS_AS(emit_report({}, ReportFormat::Csv, temp_path("x.csv")), ConfigError);
}

TEST_CASE("run_regression/run_classification: task mismatch rejected") {
  ExperimentConfig cfg = small_regression_config();
  CHECK_THROWS_AS(run_classification(cfg), ConfigError);
  cfg.task = Task::Classification;
  cfg.wdbc_path = "x";
  CHECK_THROWS_AS(run_regression(cfg), ConfigError);
}
