#include "nnagg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "nnagg/errors.hpp"
#include "nnagg/rng.hpp"
#include "nnagg/wdbc.hpp"

namespace nnagg {

Method method_from_string(std::string_view name) {
  if (name == "average") return Method::Average;
  if (name == "average_size_weighted") return Method::AverageSizeWeighted;
  if (name == "average_balance_weighted") return Method::AverageBalanceWeighted;
  if (name == "series") return Method::Series;
  if (name == "transfer") return Method::Transfer;
  if (name == "none") return Method::None;
  throw ConfigError("unknown method: " + std::string(name));
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Average: return "average";
    case Method::AverageSizeWeighted: return "average_size_weighted";
    case Method::AverageBalanceWeighted: return "average_balance_weighted";
    case Method::Series: return "series";
    case Method::Transfer: return "transfer";
    case Method::None: return "none";
  }
  return "none";
}

int ExperimentConfig::default_epochs(Task task) {
  return task == Task::Regression ? 50 : 100;
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  if (methods.empty()) throw ConfigError("config: methods must be nonempty");
  if (parties < 1) throw ConfigError("config: parties must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("config: test_fraction must be in (0,1)");
  }
  if (task == Task::Regression) {
    if (sizes.empty() || degrees.empty() || noise_levels.empty()) {
      throw ConfigError("config: regression needs size, degree and noise");
    }
    for (const auto s : sizes) {
      if (s < 1) throw ConfigError("config: size must be >= 1");
    }
    for (const int d : degrees) {
      if (d < 1) throw ConfigError("config: degree must be >= 1");
    }
    for (const double n : noise_levels) {
      if (n < 0.0) throw ConfigError("config: noise must be >= 0");
    }
    for (const Method m : methods) {
      if (m == Method::AverageBalanceWeighted) {
        throw ConfigError("config: average_balance_weighted needs classification labels");
      }
    }
  } else {
    if (wdbc_path.empty()) throw ConfigError("config: classification needs a data path");
    if (test_count < 1) throw ConfigError("config: test_count must be >= 1");
  }
  for (const int e : epochs_sweep) {
    if (e < 0) throw ConfigError("config: epochs must be >= 0");
  }
  for (const int b : batch_sweep) {
    if (b < 1) throw ConfigError("config: batch_size must be >= 1");
  }
  for (const int w : neurons_sweep) {
    if (w < 1) throw ConfigError("config: neurons must be >= 1");
  }
  for (const int w : hidden) {
    if (w < 1) throw ConfigError("config: hidden widths must be >= 1");
  }
  train.validate();
}

std::vector<Condition> ExperimentConfig::conditions() const {
  const std::vector<int> epochs_list =
      epochs_sweep.empty() ? std::vector<int>{train.epochs} : epochs_sweep;
  const std::vector<int> batch_list =
      batch_sweep.empty() ? std::vector<int>{train.batch_size} : batch_sweep;
  const std::vector<int> neuron_list =
      neurons_sweep.empty() ? std::vector<int>{0} : neurons_sweep;

  std::vector<Condition> out;
  if (task == Task::Regression) {
    for (const auto size : sizes) {
      for (const int degree : degrees) {
        for (const double noise : noise_levels) {
          for (const int e : epochs_list) {
            for (const int b : batch_list) {
              for (const int w : neuron_list) {
                out.push_back({size, degree, noise, e, b, w});
              }
            }
          }
        }
      }
    }
  } else {
    for (const int e : epochs_list) {
      for (const int b : batch_list) {
        for (const int w : neuron_list) {
          out.push_back({0, 0, 0.0, e, b, w});
        }
      }
    }
  }
  return out;
}

MlpSpec ExperimentConfig::architecture(int neurons_override) const {
  MlpSpec spec;
  std::vector<int> widths = hidden;
  if (task == Task::Regression) {
    spec.input_dim = kPolynomialVars;
    spec.output_dim = 1;
    spec.output_activation = Activation::Identity;
    if (widths.empty()) widths = {64, 64};
  } else {
    spec.input_dim = static_cast<int>(kWdbcFeatureCount);
    spec.output_dim = 1;
    spec.output_activation = Activation::Sigmoid;
    if (widths.empty()) widths = {32, 32};
  }
  if (neurons_override > 0) {
    std::fill(widths.begin(), widths.end(), neurons_override);
  }
  for (const int w : widths) spec.hidden.push_back({w, Activation::Relu});
  return spec;
}

namespace {

std::uint64_t fold(std::uint64_t seed, std::initializer_list<std::uint64_t> vals) {
  for (const auto v : vals) seed = mix_seed(seed, v);
  return seed;
}

// Shared per-trial state once the data is prepared. All methods within a
// trial see the same parts, test set, initialization seed and batch
// schedule, so comparisons are paired and k=1 degenerates to the baseline.
struct TrialData {
  std::vector<Dataset> parts;
  Dataset test;
  MlpSpec spec;
  TrainConfig tcfg;
  std::uint64_t init_seed = 0;
};

struct MethodOutcome {
  double pre = 0.0;
  double post = 0.0;
  Matrix test_predictions;
};

MethodOutcome outcome_from(double pre, double post, Matrix preds) {
  MethodOutcome out;
  out.pre = pre;
  out.post = post;
  out.test_predictions = std::move(preds);
  return out;
}

MethodOutcome run_plain_method(Method method, const TrialData& td) {
  switch (method) {
    case Method::None: {
      auto r = train_datasharing_baseline(td.parts, td.test, td.spec, td.tcfg,
                                          td.init_seed);
      return outcome_from(r.pre_test_loss, r.post_test_loss,
                          r.model.forward(td.test.features));
    }
    case Method::Average:
    case Method::AverageSizeWeighted:
    case Method::AverageBalanceWeighted: {
      const WeightingKind kind = method == Method::Average ? WeightingKind::Uniform
                                 : method == Method::AverageSizeWeighted
                                     ? WeightingKind::Size
                                     : WeightingKind::Balance;
      auto r = train_average_ensemble(td.parts, td.test, td.spec, td.tcfg,
                                      td.init_seed, kind);
      return outcome_from(r.pre_test_loss, r.post_test_loss,
                          r.model.forward(td.test.features));
    }
    case Method::Series: {
      if (td.parts.size() == 1) {
        // Single party: a zero-expert series model is plain training.
        SeriesModel model = build_series_model({}, td.spec, td.init_seed);
        auto [head, history] = train(std::move(model.head), td.parts[0], td.tcfg);
        model.head = std::move(head);
        const Matrix preds = model.forward(td.test.features);
        const double loss = loss_value(preds, td.test.targets, td.tcfg.loss);
        return outcome_from(loss, loss, preds);
      }
      auto r = train_series(td.parts, td.test, td.spec, td.tcfg, td.init_seed);
      return outcome_from(r.pre_test_loss, r.post_test_loss,
                          r.model.forward(td.test.features));
    }
    case Method::Transfer:
      throw ConfigError("transfer runs through run_transfer_orders");
  }
  throw ConfigError("unknown method");
}

std::pair<MethodOutcome, MethodOutcome> run_transfer_orders(const TrialData& td) {
  auto fwd = train_transfer(td.parts, td.test, td.spec, td.tcfg, td.init_seed);
  std::vector<Dataset> reversed(td.parts.rbegin(), td.parts.rend());
  auto rev = train_transfer(reversed, td.test, td.spec, td.tcfg, td.init_seed);
  return {outcome_from(fwd.pre_test_loss, fwd.post_test_loss,
                       fwd.model.forward(td.test.features)),
          outcome_from(rev.pre_test_loss, rev.post_test_loss,
                       rev.model.forward(td.test.features))};
}

void fill_classification_metrics(ReportRow& row, const Matrix& preds,
                                 const Matrix& targets, RocCurve* curve_out) {
  const ConfusionCounts counts = confusion(preds.data, targets.data);
  const PrecisionRecallF1 prf = precision_recall_f1(counts);
  row.has_classification_metrics = true;
  row.accuracy = accuracy(counts);
  row.precision = prf.precision;
  row.recall = prf.recall;
  row.f1 = prf.f1;
  const RocCurve curve = roc(preds.data, targets.data);
  row.auc = curve.auc;
  if (curve_out != nullptr) *curve_out = curve;
}

ReportRow base_row(const ExperimentConfig& cfg, const Condition& cond, int trial,
                   std::uint64_t trial_seed, Method method, std::string variant) {
  ReportRow row;
  row.method = std::string(to_string(method));
  row.variant = std::move(variant);
  row.task = cfg.task;
  row.size = cond.size;
  row.degree = cond.degree;
  row.noise = cond.noise;
  row.epochs = cond.epochs;
  row.batch_size = cond.batch_size;
  row.neurons = cond.neurons;
  row.parties = cfg.parties;
  row.trial = trial;
  row.seed = trial_seed;
  return row;
}

// Deterministic parallel map over independent work units; results land in
// their slot so the merged order never depends on scheduling.
template <class Fn>
void parallel_units(std::size_t count, int jobs, Fn&& fn) {
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    }));
  }
  for (auto& f : futures) f.get();
}

}  // namespace

std::vector<ReportRow> run_regression(const ExperimentConfig& cfg) {
  if (cfg.task != Task::Regression) throw ConfigError("run_regression: task mismatch");
  cfg.validate();

  const std::vector<Condition> conds = cfg.conditions();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t unit_count = conds.size() * trials;
  std::vector<std::vector<ReportRow>> unit_rows(unit_count);

  parallel_units(unit_count, cfg.jobs, [&](std::size_t unit) {
    const std::size_t ci = unit / trials;
    const int trial = static_cast<int>(unit % trials);
    const Condition& cond = conds[ci];
    const std::uint64_t trial_seed = cfg.base_seed + static_cast<std::uint64_t>(trial);

    const Polynomial poly = generate_polynomial(
        cond.degree, fold(trial_seed, {1, static_cast<std::uint64_t>(cond.degree)}));
    const NoiseSpec noise{cond.noise};
    const Dataset raw = generate_dataset(
        poly, cond.size, noise, cfg.feature_range,
        fold(trial_seed, {2, cond.size, static_cast<std::uint64_t>(cond.degree),
                          std::bit_cast<std::uint64_t>(cond.noise)}));
    SplitResult split =
        split_dataset(raw, cfg.test_fraction, cfg.parties, fold(trial_seed, {3}));

    // Targets are z-scored with training-split statistics; reported MSE is in
    // standardized units.
    const TargetStats tstats = fit_target_stats(concat_datasets(split.parts));
    TrialData td;
    for (auto& part : split.parts) td.parts.push_back(standardize_targets(tstats, part));
    td.test = standardize_targets(tstats, split.test);
    td.spec = cfg.architecture(cond.neurons);
    td.tcfg = cfg.train;
    td.tcfg.epochs = cond.epochs;
    td.tcfg.batch_size = cond.batch_size;
    td.tcfg.shuffle_seed = fold(trial_seed, {4});
    td.init_seed = fold(trial_seed, {5});

    auto& rows = unit_rows[unit];
    for (const Method method : cfg.methods) {
      const auto t0 = std::chrono::steady_clock::now();
      if (method == Method::Transfer) {
        auto [fwd, rev] = run_transfer_orders(td);
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
        ReportRow row = base_row(cfg, cond, trial, trial_seed, method, "fwd");
        row.pre_metric = fwd.pre;
        row.post_metric = fwd.post;
        row.wall_time_sec = secs / 2.0;
        rows.push_back(row);
        row = base_row(cfg, cond, trial, trial_seed, method, "rev");
        row.pre_metric = rev.pre;
        row.post_metric = rev.post;
        row.wall_time_sec = secs / 2.0;
        rows.push_back(row);
        continue;
      }
      const MethodOutcome out = run_plain_method(method, td);
      ReportRow row = base_row(cfg, cond, trial, trial_seed, method, "");
      row.pre_metric = out.pre;
      row.post_metric = out.post;
      row.wall_time_sec = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0).count();
      rows.push_back(row);
    }
  });

  std::vector<ReportRow> rows;
  for (auto& unit : unit_rows) {
    for (auto& row : unit) rows.push_back(std::move(row));
  }
  return rows;
}

ClassificationArtifacts run_classification(const ExperimentConfig& cfg) {
  if (cfg.task != Task::Classification) {
    throw ConfigError("run_classification: task mismatch");
  }
  cfg.validate();

  const Dataset wdbc = load_wdbc(cfg.wdbc_path);
  const std::vector<Condition> conds = cfg.conditions();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t unit_count = conds.size() * trials;
  std::vector<std::vector<ReportRow>> unit_rows(unit_count);
  std::vector<std::vector<std::pair<std::string, RocCurve>>> unit_curves(unit_count);

  parallel_units(unit_count, cfg.jobs, [&](std::size_t unit) {
    const std::size_t ci = unit / trials;
    const int trial = static_cast<int>(unit % trials);
    const Condition& cond = conds[ci];
    const std::uint64_t trial_seed = cfg.base_seed + static_cast<std::uint64_t>(trial);

    SplitResult split =
        split_dataset_count(wdbc, cfg.test_count, cfg.parties, fold(trial_seed, {3}));

    // Min-max scaling fit on the combined training rows, applied everywhere.
    const NormStats norm = fit_normalizer(concat_datasets(split.parts));
    TrialData td;
    for (auto& part : split.parts) td.parts.push_back(apply_normalizer(norm, part));
    td.test = apply_normalizer(norm, split.test);
    td.spec = cfg.architecture(cond.neurons);
    td.tcfg = cfg.train;
    td.tcfg.epochs = cond.epochs;
    td.tcfg.batch_size = cond.batch_size;
    td.tcfg.shuffle_seed = fold(trial_seed, {4});
    td.init_seed = fold(trial_seed, {5});

    auto& rows = unit_rows[unit];
    auto& curves = unit_curves[unit];
    const auto record = [&](Method method, const std::string& variant,
                            const MethodOutcome& out, double secs) {
      ReportRow row = base_row(cfg, cond, trial, trial_seed, method, variant);
      row.size = wdbc.size();
      row.pre_metric = out.pre;
      row.post_metric = out.post;
      row.wall_time_sec = secs;
      RocCurve curve;
      fill_classification_metrics(row, out.test_predictions, td.test.targets, &curve);
      if (trial == 0) {
        std::string stem = "roc_" + row.method;
        if (!variant.empty()) stem += "_" + variant;
        if (conds.size() > 1) stem += "_c" + std::to_string(ci);
        curves.emplace_back(std::move(stem), std::move(curve));
      }
      rows.push_back(std::move(row));
    };

    for (const Method method : cfg.methods) {
      const auto t0 = std::chrono::steady_clock::now();
      if (method == Method::Transfer) {
        auto [fwd, rev] = run_transfer_orders(td);
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0).count();
        record(method, "fwd", fwd, secs / 2.0);
        record(method, "rev", rev, secs / 2.0);
        continue;
      }
      const MethodOutcome out = run_plain_method(method, td);
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0).count();
      record(method, "", out, secs);
    }
  });

  ClassificationArtifacts artifacts;
  for (std::size_t unit = 0; unit < unit_count; ++unit) {
    for (auto& row : unit_rows[unit]) artifacts.rows.push_back(std::move(row));
    for (auto& curve : unit_curves[unit]) artifacts.roc_curves.push_back(std::move(curve));
  }
  return artifacts;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(context + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<ReportRow>& rows) {
  std::vector<AggregateRow> groups;
  std::vector<std::vector<const ReportRow*>> members;
  for (const auto& row : rows) {
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      const auto& a = groups[g];
      if (a.method == row.method && a.condition.size == row.size &&
          a.condition.degree == row.degree && a.condition.noise == row.noise &&
          a.condition.epochs == row.epochs &&
          a.condition.batch_size == row.batch_size &&
          a.condition.neurons == row.neurons) {
        break;
      }
    }
    if (g == groups.size()) {
      AggregateRow agg;
      agg.method = row.method;
      agg.condition = {row.size, row.degree, row.noise,
                       row.epochs, row.batch_size, row.neurons};
      agg.has_classification_metrics = row.has_classification_metrics;
      groups.push_back(agg);
      members.emplace_back();
    }
    members[g].push_back(&row);
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& agg = groups[g];
    const auto& rows_in = members[g];
    const double n = static_cast<double>(rows_in.size());
    double post_sum = 0.0, pre_sum = 0.0, f1_sum = 0.0, auc_sum = 0.0;
    for (const auto* row : rows_in) {
      post_sum += row->post_metric;
      pre_sum += row->pre_metric;
      f1_sum += row->f1;
      auc_sum += row->auc;
    }
    agg.count = static_cast<int>(rows_in.size());
    agg.post_mean = post_sum / n;
    agg.pre_mean = pre_sum / n;
    agg.f1_mean = f1_sum / n;
    agg.auc_mean = auc_sum / n;
    double ss = 0.0;
    for (const auto* row : rows_in) {
      const double d = row->post_metric - agg.post_mean;
      ss += d * d;
    }
    agg.post_std = rows_in.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return groups;
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const std::string& path) {
  if (rows.empty()) throw ConfigError("emit_report: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  if (format == ReportFormat::Csv) {
    out << "method,variant,task,size,degree,noise,epochs,batch_size,neurons,"
           "parties,trial,seed,pre_metric,post_metric,accuracy,precision,recall,"
           "f1,auc\n";
    for (const auto& row : rows) {
      out << row.method << ',' << row.variant << ',' << to_string(row.task) << ','
          << row.size << ',';
      if (row.task == Task::Regression) {
        out << row.degree << ',' << format_double(row.noise) << ',';
      } else {
        out << ",,";
      }
      out << row.epochs << ',' << row.batch_size << ',' << row.neurons << ','
          << row.parties << ',' << row.trial << ',' << row.seed << ','
          << format_double(row.pre_metric) << ',' << format_double(row.post_metric)
          << ',';
      if (row.has_classification_metrics) {
        out << format_double(row.accuracy) << ',' << format_double(row.precision)
            << ',' << format_double(row.recall) << ',' << format_double(row.f1)
            << ',' << format_double(row.auc);
      } else {
        out << ",,,,";
      }
      out << '\n';
    }
  } else {
    const auto groups = aggregate_rows(rows);
    out << "aggregated results (mean of post metric +- std across trials)\n";
    out << "---------------------------------------------------------------\n";
    for (const auto& agg : groups) {
      out << agg.method;
      if (agg.condition.size > 0) out << " size=" << agg.condition.size;
      if (agg.condition.degree > 0) out << " degree=" << agg.condition.degree;
      if (rows.front().task == Task::Regression) {
        out << " noise=" << format_double(agg.condition.noise);
      }
      out << " epochs=" << agg.condition.epochs
          << " batch=" << agg.condition.batch_size;
      if (agg.condition.neurons > 0) out << " neurons=" << agg.condition.neurons;
      out << " n=" << agg.count << " pre=" << format_double(agg.pre_mean)
          << " post=" << format_double(agg.post_mean)
          << " std=" << format_double(agg.post_std);
      if (agg.has_classification_metrics) {
        out << " f1=" << format_double(agg.f1_mean)
            << " auc=" << format_double(agg.auc_mean);
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<ReportRow> read_report_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty report");

  std::vector<ReportRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 19) cells.emplace_back();  // trailing empties
    const std::string ctx = path + ": row " + std::to_string(lineno);
    if (cells.size() != 19) throw ParseError(ctx + ": expected 19 columns");

    ReportRow row;
    row.method = cells[0];
    row.variant = cells[1];
    row.task = task_from_string(cells[2]);
    row.size = static_cast<std::size_t>(parse_double(cells[3], ctx));
    if (!cells[4].empty()) row.degree = static_cast<int>(parse_double(cells[4], ctx));
    if (!cells[5].empty()) row.noise = parse_double(cells[5], ctx);
    row.epochs = static_cast<int>(parse_double(cells[6], ctx));
    row.batch_size = static_cast<int>(parse_double(cells[7], ctx));
    row.neurons = static_cast<int>(parse_double(cells[8], ctx));
    row.parties = static_cast<int>(parse_double(cells[9], ctx));
    row.trial = static_cast<int>(parse_double(cells[10], ctx));
    row.seed = static_cast<std::uint64_t>(parse_double(cells[11], ctx));
    row.pre_metric = parse_double(cells[12], ctx);
    row.post_metric = parse_double(cells[13], ctx);
    if (!cells[14].empty()) {
      row.has_classification_metrics = true;
      row.accuracy = parse_double(cells[14], ctx);
      row.precision = parse_double(cells[15], ctx);
      row.recall = parse_double(cells[16], ctx);
      row.f1 = parse_double(cells[17], ctx);
      row.auc = parse_double(cells[18], ctx);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.erase(s.begin());
  while (!s.empty() && is_space(s.back())) s.pop_back();
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;  // section header
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ": line " + std::to_string(lineno) +
                       ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(path + ": line " + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig cfg;
  bool epochs_given = false;

  const auto parse_int = [](const std::string& s, const std::string& key) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("config: bad integer for '" + key + "': " + s);
    }
    return v;
  };

  for (const auto& [key, value] : kv) {
    if (key == "task") {
      cfg.task = task_from_string(value);
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& m : split_list(value)) cfg.methods.push_back(method_from_string(m));
    } else if (key == "size") {
      cfg.sizes.clear();
      for (const auto& s : split_list(value)) {
        cfg.sizes.push_back(static_cast<std::size_t>(parse_int(s, key)));
      }
    } else if (key == "degree") {
      cfg.degrees.clear();
      for (const auto& s : split_list(value)) cfg.degrees.push_back(parse_int(s, key));
    } else if (key == "noise") {
      cfg.noise_levels.clear();
      for (const auto& s : split_list(value)) {
        cfg.noise_levels.push_back(parse_double(s, "config noise"));
      }
    } else if (key == "epochs") {
      cfg.epochs_sweep.clear();
      for (const auto& s : split_list(value)) cfg.epochs_sweep.push_back(parse_int(s, key));
      epochs_given = true;
    } else if (key == "batch_size") {
      cfg.batch_sweep.clear();
      for (const auto& s : split_list(value)) cfg.batch_sweep.push_back(parse_int(s, key));
    } else if (key == "neurons") {
      cfg.neurons_sweep.clear();
      for (const auto& s : split_list(value)) cfg.neurons_sweep.push_back(parse_int(s, key));
    } else if (key == "hidden") {
      cfg.hidden.clear();
      for (const auto& s : split_list(value)) cfg.hidden.push_back(parse_int(s, key));
    } else if (key == "learning_rate") {
      cfg.train.learning_rate = parse_double(value, "config learning_rate");
    } else if (key == "optimizer") {
      cfg.train.optimizer = optimizer_from_string(value);
    } else if (key == "loss") {
      cfg.train.loss = loss_from_string(value);
    } else if (key == "adam_beta1") {
      cfg.train.adam.beta1 = parse_double(value, "config adam_beta1");
    } else if (key == "adam_beta2") {
      cfg.train.adam.beta2 = parse_double(value, "config adam_beta2");
    } else if (key == "adam_epsilon") {
      cfg.train.adam.epsilon = parse_double(value, "config adam_epsilon");
    } else if (key == "parties") {
      cfg.parties = parse_int(value, key);
    } else if (key == "test_fraction") {
      cfg.test_fraction = parse_double(value, "config test_fraction");
    } else if (key == "test_count") {
      cfg.test_count = static_cast<std::size_t>(parse_int(value, key));
    } else if (key == "trials") {
      cfg.trials = parse_int(value, key);
    } else if (key == "seed") {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("config: bad integer for 'seed': " + value);
      }
      cfg.base_seed = v;
    } else if (key == "jobs") {
      cfg.jobs = parse_int(value, key);
    } else if (key == "wdbc") {
      cfg.wdbc_path = value;
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "feature_range") {
      const auto parts = split_list(value);
      if (parts.size() != 2) throw ConfigError("config: feature_range needs 'lo, hi'");
      cfg.feature_range.lo = parse_double(parts[0], "config feature_range");
      cfg.feature_range.hi = parse_double(parts[1], "config feature_range");
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  if (!kv.contains("loss")) {
    cfg.train.loss = cfg.task == Task::Classification ? LossKind::Bce : LossKind::Mse;
  }
  if (!epochs_given) cfg.train.epochs = ExperimentConfig::default_epochs(cfg.task);
  return cfg;
}

}  // namespace nnagg
