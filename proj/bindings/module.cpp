#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "nnagg/aggregate.hpp"
#include "nnagg/errors.hpp"
#include "nnagg/experiment.hpp"
#include "nnagg/metrics.hpp"
#include "nnagg/model_io.hpp"
#include "nnagg/polynomial.hpp"
#include "nnagg/wdbc.hpp"

namespace py = pybind11;
using namespace nnagg;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  const auto buf = arr.request();
  Matrix m;
  if (buf.ndim == 1) {
    m.rows = static_cast<std::size_t>(buf.shape[0]);
    m.cols = 1;
  } else if (buf.ndim == 2) {
    m.rows = static_cast<std::size_t>(buf.shape[0]);
    m.cols = static_cast<std::size_t>(buf.shape[1]);
  } else {
    throw ShapeError("expected a 1-d or 2-d array");
  }
  const auto* data = static_cast<const double*>(buf.ptr);
  m.data.assign(data, data + m.rows * m.cols);
  return m;
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> arr({m.rows, m.cols});
  std::copy(m.data.begin(), m.data.end(), arr.mutable_data());
  return arr;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style |
                                                            py::array::forcecast>& arr) {
  const auto buf = arr.request();
  const auto* data = static_cast<const double*>(buf.ptr);
  return {data, data + buf.size};
}

MlpSpec make_spec(int input_dim, const std::vector<std::pair<int, std::string>>& hidden,
                  int output_dim, const std::string& output_activation) {
  MlpSpec spec;
  spec.input_dim = input_dim;
  for (const auto& [width, act] : hidden) {
    spec.hidden.push_back({width, activation_from_string(act)});
  }
  spec.output_dim = output_dim;
  spec.output_activation = activation_from_string(output_activation);
  spec.validate();
  return spec;
}

Dataset make_dataset(const py::array_t<double>& features, const py::array_t<double>& targets,
                     const std::string& task, const std::string& name) {
  Dataset ds;
  ds.features = to_matrix(features);
  ds.targets = to_matrix(targets);
  ds.task = task_from_string(task);
  ds.name = name;
  ds.validate();
  return ds;
}

AggregateWeights weights_from(const std::vector<double>& w) {
  AggregateWeights out{w};
  out.validate();
  return out;
}

WeightingKind weighting_from_string(const std::string& name) {
  if (name == "uniform") return WeightingKind::Uniform;
  if (name == "size") return WeightingKind::Size;
  if (name == "balance") return WeightingKind::Balance;
  throw ConfigError("unknown weighting: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "neural network aggregation: averaging, series composition, transfer";

  py::register_exception<Error>(m, "Error");

  py::class_<MlpSpec>(m, "MlpSpec")
      .def(py::init(&make_spec), py::arg("input_dim"),
           py::arg("hidden") = std::vector<std::pair<int, std::string>>{},
           py::arg("output_dim") = 1, py::arg("output_activation") = "identity")
      .def_readonly("input_dim", &MlpSpec::input_dim)
      .def_readonly("output_dim", &MlpSpec::output_dim)
      .def_property_readonly("hidden",
                             [](const MlpSpec& spec) {
                               std::vector<std::pair<int, std::string>> out;
                               for (const auto& l : spec.hidden) {
                                 out.emplace_back(l.width, std::string(to_string(l.activation)));
                               }
                               return out;
                             })
      .def_property_readonly("output_activation",
                             [](const MlpSpec& spec) {
                               return std::string(to_string(spec.output_activation));
                             })
      .def("param_count", &MlpSpec::param_count)
      .def("__eq__", [](const MlpSpec& a, const MlpSpec& b) { return a == b; });

  py::class_<Mlp>(m, "Mlp")
      .def_readonly("spec", &Mlp::spec)
      .def_property(
          "params",
          [](const Mlp& net) {
            py::array_t<double> arr(net.params.size());
            std::copy(net.params.begin(), net.params.end(), arr.mutable_data());
            return arr;
          },
          [](Mlp& net, const py::array_t<double>& arr) {
            auto v = to_vector(arr);
            if (v.size() != net.spec.param_count()) {
              throw ShapeError("params length does not match the architecture");
            }
            net.params = std::move(v);
          })
      .def("forward",
           [](const Mlp& net, const py::array_t<double>& x) {
             return to_array(net.forward(to_matrix(x)));
           })
      .def("checksum", &Mlp::params_checksum);

  m.def("init_mlp", &init_mlp, py::arg("spec"), py::arg("seed"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init([](int epochs, int batch_size, double learning_rate,
                       const std::string& optimizer, const std::string& loss,
                       std::uint64_t shuffle_seed, double beta1, double beta2,
                       double epsilon) {
             TrainConfig cfg;
             cfg.epochs = epochs;
             cfg.batch_size = batch_size;
             cfg.learning_rate = learning_rate;
             cfg.optimizer = optimizer_from_string(optimizer);
             cfg.loss = loss_from_string(loss);
             cfg.shuffle_seed = shuffle_seed;
             cfg.adam = {beta1, beta2, epsilon};
             cfg.validate();
             return cfg;
           }),
           py::arg("epochs") = 50, py::arg("batch_size") = 32,
           py::arg("learning_rate") = 1e-3, py::arg("optimizer") = "adam",
           py::arg("loss") = "mse", py::arg("shuffle_seed") = 0,
           py::arg("beta1") = 0.9, py::arg("beta2") = 0.999, py::arg("epsilon") = 1e-8)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("shuffle_seed", &TrainConfig::shuffle_seed);

  py::class_<TrainHistory>(m, "TrainHistory")
      .def_readonly("per_epoch_train_loss", &TrainHistory::per_epoch_train_loss)
      .def_readonly("final_params_checksum", &TrainHistory::final_params_checksum);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("features"), py::arg("targets"),
           py::arg("task") = "regression", py::arg("name") = "")
      .def_property_readonly("features",
                             [](const Dataset& ds) { return to_array(ds.features); })
      .def_property_readonly("targets",
                             [](const Dataset& ds) { return to_array(ds.targets); })
      .def_property_readonly("task",
                             [](const Dataset& ds) { return std::string(to_string(ds.task)); })
      .def_readonly("name", &Dataset::name)
      .def("__len__", &Dataset::size);

  m.def("train",
        [](const Mlp& net, const Dataset& ds, const TrainConfig& cfg) {
          auto [out, history] = train(net, ds, cfg);
          return py::make_tuple(std::move(out), std::move(history));
        },
        py::arg("mlp"), py::arg("dataset"), py::arg("config"));

  m.def("loss_value",
        [](const py::array_t<double>& pred, const py::array_t<double>& target,
           const std::string& kind) {
          return loss_value(to_matrix(pred), to_matrix(target), loss_from_string(kind));
        },
        py::arg("predictions"), py::arg("targets"), py::arg("kind") = "mse");

  m.def("gradients",
        [](const Mlp& net, const py::array_t<double>& x, const py::array_t<double>& y,
           const std::string& kind) {
          const auto g = gradients(net, to_matrix(x), to_matrix(y), loss_from_string(kind));
          py::array_t<double> arr(g.size());
          std::copy(g.begin(), g.end(), arr.mutable_data());
          return arr;
        },
        py::arg("mlp"), py::arg("inputs"), py::arg("targets"), py::arg("kind") = "mse");

  // aggregation
  m.def("average_ensemble",
        [](const std::vector<Mlp>& nets, const std::optional<std::vector<double>>& weights) {
          const AggregateWeights w = weights ? weights_from(*weights)
                                             : AggregateWeights::uniform(nets.size());
          return average_ensemble(nets, w);
        },
        py::arg("networks"), py::arg("weights") = py::none());
  m.def("size_weights", [](const std::vector<Dataset>& ds) {
    return size_weights(ds).weights;
  });
  m.def("balance_weights", [](const std::vector<Dataset>& ds) {
    return balance_weights(ds).weights;
  });

  py::class_<SeriesModel>(m, "SeriesModel")
      .def_readonly("experts", &SeriesModel::experts)
      .def_readonly("head", &SeriesModel::head)
      .def_readonly("base_input_dim", &SeriesModel::base_input_dim)
      .def("forward", [](const SeriesModel& model, const py::array_t<double>& x) {
        return to_array(model.forward(to_matrix(x)));
      });

  m.def("build_series_model", &build_series_model, py::arg("experts"),
        py::arg("base_spec"), py::arg("seed"));

  py::class_<StageMetrics>(m, "StageMetrics")
      .def_readonly("stage", &StageMetrics::stage)
      .def_readonly("train_loss", &StageMetrics::train_loss)
      .def_readonly("test_loss", &StageMetrics::test_loss);

  py::class_<SeriesResult>(m, "SeriesResult")
      .def_readonly("model", &SeriesResult::model)
      .def_readonly("stages", &SeriesResult::stages)
      .def_readonly("pre_test_loss", &SeriesResult::pre_test_loss)
      .def_readonly("post_test_loss", &SeriesResult::post_test_loss);

  py::class_<TransferResult>(m, "TransferResult")
      .def_readonly("model", &TransferResult::model)
      .def_readonly("stages", &TransferResult::stages)
      .def_readonly("pre_test_loss", &TransferResult::pre_test_loss)
      .def_readonly("post_test_loss", &TransferResult::post_test_loss);

  py::class_<EnsembleResult>(m, "EnsembleResult")
      .def_readonly("model", &EnsembleResult::model)
      .def_readonly("party_models", &EnsembleResult::party_models)
      .def_readonly("stages", &EnsembleResult::stages)
      .def_readonly("pre_test_loss", &EnsembleResult::pre_test_loss)
      .def_readonly("post_test_loss", &EnsembleResult::post_test_loss);

  py::class_<BaselineResult>(m, "BaselineResult")
      .def_readonly("model", &BaselineResult::model)
      .def_readonly("stages", &BaselineResult::stages)
      .def_readonly("pre_test_loss", &BaselineResult::pre_test_loss)
      .def_readonly("post_test_loss", &BaselineResult::post_test_loss);

  m.def("train_series",
        [](const std::vector<Dataset>& parts, const Dataset& test, const MlpSpec& spec,
           const TrainConfig& cfg, std::uint64_t seed) {
          return train_series(parts, test, spec, cfg, seed);
        },
        py::arg("parts"), py::arg("test"), py::arg("base_spec"), py::arg("config"),
        py::arg("seed"));
  m.def("train_transfer",
        [](const std::vector<Dataset>& parts, const Dataset& test, const MlpSpec& spec,
           const TrainConfig& cfg, std::uint64_t seed) {
          return train_transfer(parts, test, spec, cfg, seed);
        },
        py::arg("parts"), py::arg("test"), py::arg("spec"), py::arg("config"),
        py::arg("seed"));
  m.def("train_average_ensemble",
        [](const std::vector<Dataset>& parts, const Dataset& test, const MlpSpec& spec,
           const TrainConfig& cfg, std::uint64_t seed, const std::string& weighting) {
          return train_average_ensemble(parts, test, spec, cfg, seed,
                                        weighting_from_string(weighting));
        },
        py::arg("parts"), py::arg("test"), py::arg("spec"), py::arg("config"),
        py::arg("seed"), py::arg("weighting") = "uniform");
  m.def("train_datasharing_baseline",
        [](const std::vector<Dataset>& parts, const Dataset& test, const MlpSpec& spec,
           const TrainConfig& cfg, std::uint64_t seed) {
          return train_datasharing_baseline(parts, test, spec, cfg, seed);
        },
        py::arg("parts"), py::arg("test"), py::arg("spec"), py::arg("config"),
        py::arg("seed"));

  // data
  py::class_<Polynomial>(m, "Polynomial")
      .def_readonly("degree", &Polynomial::degree)
      .def("__len__", [](const Polynomial& p) { return p.terms.size(); })
      .def_property_readonly("terms",
                             [](const Polynomial& p) {
                               std::vector<std::pair<std::vector<int>, double>> out;
                               for (const auto& t : p.terms) {
                                 out.emplace_back(std::vector<int>(t.exponents.begin(),
                                                                   t.exponents.end()),
                                                  t.coefficient);
                               }
                               return out;
                             })
      .def("evaluate", [](const Polynomial& p, const std::vector<double>& x) {
        return p.evaluate(x);
      });

  m.def("generate_polynomial", &generate_polynomial, py::arg("degree"), py::arg("seed"));
  m.def("generate_dataset",
        [](const Polynomial& p, std::size_t size, double noise, std::uint64_t seed,
           double feature_lo, double feature_hi) {
          return generate_dataset(p, size, NoiseSpec{noise},
                                  FeatureRange{feature_lo, feature_hi}, seed);
        },
        py::arg("polynomial"), py::arg("size"), py::arg("noise") = 0.0,
        py::arg("seed") = 0, py::arg("feature_lo") = -3.0, py::arg("feature_hi") = 3.0);

  m.def("split_dataset",
        [](const Dataset& ds, double test_fraction, int parties, std::uint64_t seed) {
          auto split = split_dataset(ds, test_fraction, parties, seed);
          return py::make_tuple(std::move(split.parts), std::move(split.test));
        },
        py::arg("dataset"), py::arg("test_fraction") = 0.2, py::arg("parties") = 2,
        py::arg("seed") = 0);
  m.def("split_dataset_count",
        [](const Dataset& ds, std::size_t test_count, int parties, std::uint64_t seed) {
          auto split = split_dataset_count(ds, test_count, parties, seed);
          return py::make_tuple(std::move(split.parts), std::move(split.test));
        },
        py::arg("dataset"), py::arg("test_count"), py::arg("parties") = 2,
        py::arg("seed") = 0);
  m.def("concat_datasets",
        [](const std::vector<Dataset>& parts) { return concat_datasets(parts); });
  m.def("load_wdbc", &load_wdbc, py::arg("path"));

  py::class_<NormStats>(m, "NormStats")
      .def_readonly("min", &NormStats::min)
      .def_readonly("max", &NormStats::max)
      .def_readonly("mean", &NormStats::mean)
      .def_readonly("stddev", &NormStats::stddev);
  m.def("fit_normalizer", &fit_normalizer);
  m.def("apply_normalizer", &apply_normalizer);

  py::class_<TargetStats>(m, "TargetStats")
      .def_readonly("mean", &TargetStats::mean)
      .def_readonly("stddev", &TargetStats::stddev);
  m.def("fit_target_stats", &fit_target_stats);
  m.def("standardize_targets", &standardize_targets);

  // metrics
  py::class_<ConfusionCounts>(m, "ConfusionCounts")
      .def_readonly("tp", &ConfusionCounts::tp)
      .def_readonly("fp", &ConfusionCounts::fp)
      .def_readonly("tn", &ConfusionCounts::tn)
      .def_readonly("fn", &ConfusionCounts::fn)
      .def("total", &ConfusionCounts::total);

  py::class_<RocCurve>(m, "RocCurve")
      .def_property_readonly("points",
                             [](const RocCurve& c) {
                               py::array_t<double> arr({c.points.size(), std::size_t{2}});
                               auto* data = arr.mutable_data();
                               for (std::size_t i = 0; i < c.points.size(); ++i) {
                                 data[2 * i] = c.points[i].fpr;
                                 data[2 * i + 1] = c.points[i].tpr;
                               }
                               return arr;
                             })
      .def_readonly("auc", &RocCurve::auc);

  m.def("mse", [](const py::array_t<double>& a, const py::array_t<double>& b) {
    return mse(to_vector(a), to_vector(b));
  });
  m.def("confusion",
        [](const py::array_t<double>& probs, const py::array_t<double>& targets,
           double threshold) {
          return confusion(to_vector(probs), to_vector(targets), threshold);
        },
        py::arg("pred_probs"), py::arg("targets"), py::arg("threshold") = 0.5);
  m.def("precision_recall_f1", [](const ConfusionCounts& c) {
    const auto prf = precision_recall_f1(c);
    return py::make_tuple(prf.precision, prf.recall, prf.f1);
  });
  m.def("roc", [](const py::array_t<double>& probs, const py::array_t<double>& targets) {
    return roc(to_vector(probs), to_vector(targets));
  });
  m.def("accuracy", &accuracy);

  // model io
  m.def("save_model", &save_model, py::arg("mlp"), py::arg("path"));
  m.def("load_model", &load_model, py::arg("path"));

  // experiment harness
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_property(
          "task",
          [](const ExperimentConfig& cfg) { return std::string(to_string(cfg.task)); },
          [](ExperimentConfig& cfg, const std::string& task) {
            cfg.task = task_from_string(task);
          })
      .def_property(
          "methods",
          [](const ExperimentConfig& cfg) {
            std::vector<std::string> out;
            for (const auto m_ : cfg.methods) out.emplace_back(to_string(m_));
            return out;
          },
          [](ExperimentConfig& cfg, const std::vector<std::string>& names) {
            cfg.methods.clear();
            for (const auto& n : names) cfg.methods.push_back(method_from_string(n));
          })
      .def_readwrite("sizes", &ExperimentConfig::sizes)
      .def_readwrite("degrees", &ExperimentConfig::degrees)
      .def_readwrite("noise_levels", &ExperimentConfig::noise_levels)
      .def_readwrite("wdbc_path", &ExperimentConfig::wdbc_path)
      .def_readwrite("test_count", &ExperimentConfig::test_count)
      .def_readwrite("epochs_sweep", &ExperimentConfig::epochs_sweep)
      .def_readwrite("batch_sweep", &ExperimentConfig::batch_sweep)
      .def_readwrite("neurons_sweep", &ExperimentConfig::neurons_sweep)
      .def_readwrite("test_fraction", &ExperimentConfig::test_fraction)
      .def_readwrite("parties", &ExperimentConfig::parties)
      .def_readwrite("hidden", &ExperimentConfig::hidden)
      .def_readwrite("train", &ExperimentConfig::train)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("base_seed", &ExperimentConfig::base_seed)
      .def_readwrite("jobs", &ExperimentConfig::jobs)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir);

  py::class_<ReportRow>(m, "ReportRow")
      .def_readonly("method", &ReportRow::method)
      .def_readonly("variant", &ReportRow::variant)
      .def_readonly("trial", &ReportRow::trial)
      .def_readonly("seed", &ReportRow::seed)
      .def_readonly("pre_metric", &ReportRow::pre_metric)
      .def_readonly("post_metric", &ReportRow::post_metric)
      .def_readonly("accuracy", &ReportRow::accuracy)
      .def_readonly("precision", &ReportRow::precision)
      .def_readonly("recall", &ReportRow::recall)
      .def_readonly("f1", &ReportRow::f1)
      .def_readonly("auc", &ReportRow::auc);

  m.def("run_regression", &run_regression, py::arg("config"));
  m.def("run_classification",
        [](const ExperimentConfig& cfg) {
          auto artifacts = run_classification(cfg);
          return py::make_tuple(std::move(artifacts.rows), std::move(artifacts.roc_curves));
        },
        py::arg("config"));
}
