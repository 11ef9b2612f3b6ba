#include <CLI11.hpp>
#include <sstream>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "nnagg/aggregate.hpp"
#include "nnagg/errors.hpp"
#include "nnagg/experiment.hpp"
#include "nnagg/model_io.hpp"
#include "nnagg/polynomial.hpp"
#include "nnagg/rng.hpp"

namespace fs = std::filesystem;
using namespace nnagg;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string data_path;
  std::string out_dir;
  std::vector<std::string> methods;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  int jobs = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config file (key = value)");
  cmd->add_option("--seed", flags.seed, "base seed override")
      ->each([&](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--trials", flags.trials, "trial count override");
  cmd->add_option("--method", flags.methods,
                  "method override (repeatable): average, average_size_weighted, "
                  "average_balance_weighted, series, transfer, none");
  cmd->add_option("--out", flags.out_dir, "output directory for reports");
  cmd->add_option("--jobs", flags.jobs, "parallel trial workers (0 = auto)");
}

ExperimentConfig load_config(const CommonFlags& flags, Task task) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = config_from_map(parse_config_file(flags.config_path));
  } else {
    cfg.task = task;
    cfg.train.loss = task == Task::Classification ? LossKind::Bce : LossKind::Mse;
    cfg.train.epochs = ExperimentConfig::default_epochs(task);
  }
  if (cfg.task != task) {
    throw ConfigError("config task does not match the subcommand");
  }
  if (flags.seed_set) cfg.base_seed = flags.seed;
  if (flags.trials > 0) cfg.trials = flags.trials;
  if (flags.jobs >= 0) cfg.jobs = flags.jobs;
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.data_path.empty()) cfg.wdbc_path = flags.data_path;
  if (!flags.methods.empty()) {
    cfg.methods.clear();
    for (const auto& m : flags.methods) cfg.methods.push_back(method_from_string(m));
  }
  return cfg;
}

void write_reports(const std::vector<ReportRow>& rows, const std::string& out_dir) {
  fs::create_directories(out_dir);
  emit_report(rows, ReportFormat::Csv, (fs::path(out_dir) / "report.csv").string());
  emit_report(rows, ReportFormat::Summary, (fs::path(out_dir) / "summary.txt").string());
}

void print_summary(const std::vector<ReportRow>& rows) {
  for (const auto& agg : aggregate_rows(rows)) {
    std::printf("%-26s", agg.method.c_str());
    if (agg.condition.size > 0) std::printf(" size=%zu", agg.condition.size);
    if (agg.condition.degree > 0) std::printf(" degree=%d", agg.condition.degree);
    if (rows.front().task == Task::Regression) {
      std::printf(" noise=%g", agg.condition.noise);
    }
    std::printf(" epochs=%d", agg.condition.epochs);
    std::printf("  post=%.6g +- %.6g", agg.post_mean, agg.post_std);
    if (agg.has_classification_metrics) {
      std::printf("  f1=%.4f auc=%.4f", agg.f1_mean, agg.auc_mean);
    }
    std::printf("\n");
  }
}

int cmd_regress(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_config(flags, Task::Regression);
  const auto rows = run_regression(cfg);
  write_reports(rows, cfg.out_dir);
  print_summary(rows);
  std::printf("wrote %zu rows to %s\n", rows.size(), cfg.out_dir.c_str());
  return 0;
}

int cmd_classify(const CommonFlags& flags) {
  const ExperimentConfig cfg = load_config(flags, Task::Classification);
  const auto artifacts = run_classification(cfg);
  write_reports(artifacts.rows, cfg.out_dir);
  for (const auto& [stem, curve] : artifacts.roc_curves) {
    write_roc_csv(curve, (fs::path(cfg.out_dir) / (stem + ".csv")).string());
  }
  print_summary(artifacts.rows);
  std::printf("wrote %zu rows and %zu roc curves to %s\n", artifacts.rows.size(),
              artifacts.roc_curves.size(), cfg.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"train and aggregate neural networks over disjoint datasets"};
  app.require_subcommand(1);

  CommonFlags regress_flags;
  CLI::App* regress = app.add_subcommand(
      "regress", "polynomial regression benchmark across aggregation methods");
  add_common_flags(regress, regress_flags);

  CommonFlags classify_flags;
  CLI::App* classify = app.add_subcommand(
      "classify", "breast-cancer classification benchmark across aggregation methods");
  add_common_flags(classify, classify_flags);
  classify->add_option("--data", classify_flags.data_path,
                       "breast-cancer csv (id, diagnosis, 30 features)");

  // gen-data
  std::size_t gen_size = 3200;
  int gen_degree = 2;
  double gen_noise = 0.0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  double gen_lo = -3.0, gen_hi = 3.0;
  CLI::App* gen = app.add_subcommand("gen-data", "generate a polynomial dataset csv");
  gen->add_option("--size", gen_size, "row count");
  gen->add_option("--degree", gen_degree, "polynomial degree");
  gen->add_option("--noise", gen_noise, "noise level n in y = f(x) + n*d*r");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--feature-lo", gen_lo, "feature range lower bound");
  gen->add_option("--feature-hi", gen_hi, "feature range upper bound");
  gen->add_option("--out", gen_out, "output csv path")->required();

  // eval-model
  std::string eval_model_path, eval_data_path, eval_loss = "mse";
  CLI::App* eval = app.add_subcommand("eval-model", "evaluate a saved model on a csv");
  eval->add_option("--model", eval_model_path, "model file")->required();
  eval->add_option("--data", eval_data_path, "dataset csv (features..., y)")->required();
  eval->add_option("--loss", eval_loss, "mse or bce");

  // train: the party-side step of the workflow; the produced model file is
  // what moves between parties.
  std::string train_data_path, train_out, train_loss = "mse";
  std::vector<int> train_hidden{64, 64};
  int train_epochs = 50, train_batch = 32;
  double train_lr = 1e-3;
  std::uint64_t train_seed = 1;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train one network on a csv and save it");
  train_cmd->add_option("--data", train_data_path, "dataset csv (features..., y)")
      ->required();
  train_cmd->add_option("--out", train_out, "output model file")->required();
  train_cmd->add_option("--hidden", train_hidden, "hidden layer widths");
  train_cmd->add_option("--epochs", train_epochs, "training epochs");
  train_cmd->add_option("--batch-size", train_batch, "mini-batch size");
  train_cmd->add_option("--learning-rate", train_lr, "learning rate");
  train_cmd->add_option("--seed", train_seed, "init and shuffle seed");
  train_cmd->add_option("--loss", train_loss, "mse or bce");

  // aggregate: models move, data never does.
  std::string agg_method = "average";
  std::vector<std::string> agg_models;
  std::string agg_out;
  std::string agg_weights;
  CLI::App* agg = app.add_subcommand(
      "aggregate", "average pre-trained model files into one model");
  agg->add_option("--method", agg_method, "aggregation method (average)");
  agg->add_option("--weights", agg_weights, "comma-separated weights, one per model");
  agg->add_option("models", agg_models, "model files")->required()->expected(-1);
  agg->add_option("--out", agg_out, "output model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*regress) return cmd_regress(regress_flags);
    if (*classify) return cmd_classify(classify_flags);
    if (*gen) {
      const Polynomial poly = generate_polynomial(gen_degree, mix_seed(gen_seed, 1));
      const Dataset ds = generate_dataset(poly, gen_size, NoiseSpec{gen_noise},
                                          FeatureRange{gen_lo, gen_hi},
                                          mix_seed(gen_seed, 2));
      write_dataset_csv(ds, gen_out);
      std::printf("wrote %zu rows to %s\n", ds.size(), gen_out.c_str());
      return 0;
    }
    if (*eval) {
      const Mlp model = load_model(eval_model_path);
      const LossKind kind = loss_from_string(eval_loss);
      const Dataset ds = read_dataset_csv(
          eval_data_path, kind == LossKind::Bce ? Task::Classification : Task::Regression);
      const Matrix preds = model.forward(ds.features);
      std::printf("%s = %.10g over %zu rows\n", eval_loss.c_str(),
                  loss_value(preds, ds.targets, kind), ds.size());
      return 0;
    }
    if (*train_cmd) {
      const LossKind kind = loss_from_string(train_loss);
      const Dataset ds = read_dataset_csv(
          train_data_path, kind == LossKind::Bce ? Task::Classification : Task::Regression);
      MlpSpec spec;
      spec.input_dim = static_cast<int>(ds.feature_dim());
      for (const int w : train_hidden) spec.hidden.push_back({w, Activation::Relu});
      spec.output_dim = static_cast<int>(ds.target_dim());
      spec.output_activation =
          kind == LossKind::Bce ? Activation::Sigmoid : Activation::Identity;
      TrainConfig tcfg;
      tcfg.epochs = train_epochs;
      tcfg.batch_size = train_batch;
      tcfg.learning_rate = train_lr;
      tcfg.loss = kind;
      tcfg.shuffle_seed = mix_seed(train_seed, 2);
      const auto [model, history] = nnagg::train(init_mlp(spec, mix_seed(train_seed, 1)),
                                                 ds, tcfg);
      save_model(model, train_out);
      std::printf("trained on %zu rows, final %s %.6g, saved to %s\n", ds.size(),
                  train_loss.c_str(),
                  history.per_epoch_train_loss.empty()
                      ? 0.0
                      : history.per_epoch_train_loss.back(),
                  train_out.c_str());
      return 0;
    }
    if (*agg) {
      if (agg_method != "average") {
        throw ConfigError("aggregate: unsupported method '" + agg_method + "'");
      }
      std::vector<Mlp> models;
      for (const auto& path : agg_models) models.push_back(load_model(path));
      AggregateWeights weights = AggregateWeights::uniform(models.size());
      if (!agg_weights.empty()) {
        weights.weights.clear();
        std::stringstream ss(agg_weights);
        std::string item;
        while (std::getline(ss, item, ',')) weights.weights.push_back(std::stod(item));
      }
      const Mlp combined = average_ensemble(models, weights);
      save_model(combined, agg_out);
      std::printf("averaged %zu models into %s\n", models.size(), agg_out.c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
