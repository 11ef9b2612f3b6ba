#include <doctest.h>

#include <cmath>

#include "nnagg/aggregate.hpp"
#include "nnagg/errors.hpp"
#include "nnagg/rng.hpp"
#include "test_util.hpp"

using namespace nnagg;
using nnagg::testutil::make_dataset;

namespace {

Mlp two_param_net(double w, double b) {
  MlpSpec spec{1, {}, 1, Activation::Identity};
  Mlp net = init_mlp(spec, 0);
  net.params[0] = w;
  net.params[1] = b;
  return net;
}

Dataset labeled_dataset(std::size_t n, std::size_t positives) {
  Dataset ds;
  ds.features = Matrix(n, 2);
  ds.targets = Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) ds.targets(i, 0) = i < positives ? 1.0 : 0.0;
  ds.task = Task::Classification;
  return ds;
}

}  // namespace

TEST_CASE("average_ensemble: averaging a network with itself returns it bit-for-bit") {
  Rng rng(101);
  for (int rep = 0; rep < 20; ++rep) {
    const MlpSpec spec = testutil::random_small_spec(rng);
    const Mlp net = testutil::random_mlp(rng, spec);
    const std::vector<Mlp> nets{net, net};
    const Mlp avg = average_ensemble(nets, AggregateWeights::uniform(2));
    CHECK(avg.params == net.params);
  }
}

TEST_CASE("average_ensemble: weights (1,0) select the first network exactly") {
  Rng rng(102);
  const MlpSpec spec = testutil::random_small_spec(rng);
  const Mlp a = testutil::random_mlp(rng, spec);
  const Mlp b = testutil::random_mlp(rng, spec);
  const std::vector<Mlp> nets{a, b};
  const Mlp out = average_ensemble(nets, AggregateWeights{{1.0, 0.0}});
  CHECK(out.params == a.params);
}

TEST_CASE("average_ensemble: k=2 uniform on [2,4] and [4,8] gives [3,6]") {
  const std::vector<Mlp> nets{two_param_net(2, 4), two_param_net(4, 8)};
  const Mlp out = average_ensemble(nets, AggregateWeights::uniform(2));
  CHECK(out.params[0] == 3.0);
  CHECK(out.params[1] == 6.0);
}

TEST_CASE("average_ensemble: k=2 uniform equals (N1(i)+N2(i))/2 bit-for-bit") {
  Rng rng(103);
  for (int rep = 0; rep < 30; ++rep) {
    const MlpSpec spec = testutil::random_small_spec(rng);
    const Mlp a = testutil::random_mlp(rng, spec);
    const Mlp b = testutil::random_mlp(rng, spec);
    const std::vector<Mlp> nets{a, b};
    const Mlp out = average_ensemble(nets, AggregateWeights::uniform(2));
    for (std::size_t i = 0; i < out.params.size(); ++i) {
      CHECK(out.params[i] == (a.params[i] + b.params[i]) / 2.0);
    }
  }
}

TEST_CASE("average_ensemble: linearity, fixed left-to-right accumulation") {
  Rng rng(104);
  const MlpSpec spec = testutil::random_small_spec(rng);
  std::vector<Mlp> nets;
  for (int j = 0; j < 4; ++j) nets.push_back(testutil::random_mlp(rng, spec));
  const AggregateWeights w{{0.4, 0.3, 0.2, 0.1}};
  const Mlp out = average_ensemble(nets, w);
  for (std::size_t i = 0; i < out.params.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nets.size(); ++j) acc += w.weights[j] * nets[j].params[i];
    CHECK(out.params[i] - acc == 0.0);
  }
}

TEST_CASE("average_ensemble: permutation covariance") {
  Rng rng(105);
  const MlpSpec spec = testutil::random_small_spec(rng);
  const Mlp a = testutil::random_mlp(rng, spec);
  const Mlp b = testutil::random_mlp(rng, spec);
  const std::vector<Mlp> fwd{a, b};
  const std::vector<Mlp> rev{b, a};
  // k=2 swaps are exact: IEEE addition commutes.
  const Mlp x = average_ensemble(fwd, AggregateWeights{{0.7, 0.3}});
  const Mlp y = average_ensemble(rev, AggregateWeights{{0.3, 0.7}});
  CHECK(x.params == y.params);
}

TEST_CASE("average_ensemble: odd k stays within one ulp of idempotent") {
  // 1/3 is not representable, so averaging three copies cannot be bit-exact;
  // it must still land within a unit in the last place.
  Rng rng(106);
  const MlpSpec spec = testutil::random_small_spec(rng);
  const Mlp net = testutil::random_mlp(rng, spec);
  const std::vector<Mlp> copies(3, net);
  const Mlp avg = average_ensemble(copies, AggregateWeights::uniform(3));
  for (std::size_t i = 0; i < avg.params.size(); ++i) {
    const double a = net.params[i];
    const double ulp = std::nextafter(std::abs(a), 1e300) - std::abs(a);
    CHECK(std::abs(avg.params[i] - a) <= 2.0 * ulp);
  }
}

TEST_CASE("average_ensemble: architecture mismatch and bad weights rejected") {
  const Mlp a = init_mlp(MlpSpec{1, {}, 1, Activation::Identity}, 1);
  const Mlp b = init_mlp(MlpSpec{2, {}, 1, Activation::Identity}, 1);
  const std::vector<Mlp> mismatch{a, b};
  CHECK_THROWS_AS(average_ensemble(mismatch, AggregateWeights::uniform(2)),
                  ArchitectureError);
  const std::vector<Mlp> pair{a, a};
  CHECK_THROWS_AS(average_ensemble(pair, AggregateWeights{{0.6, 0.6}}), ConfigError);
  CHECK_THROWS_AS(average_ensemble(pair, AggregateWeights{{-0.5, 1.5}}), ConfigError);
  CHECK_THROWS_AS(average_ensemble(pair, AggregateWeights{{1.0}}), ConfigError);
}

TEST_CASE("size_weights: proportional to dataset sizes") {
  const std::vector<Dataset> equal{labeled_dataset(100, 50), labeled_dataset(100, 50)};
  auto w = size_weights(equal);
  CHECK(w.weights[0] == doctest::Approx(0.5));
  CHECK(w.weights[1] == doctest::Approx(0.5));

  const std::vector<Dataset> skewed{labeled_dataset(300, 150), labeled_dataset(100, 50)};
  w = size_weights(skewed);
  CHECK(w.weights[0] == doctest::Approx(0.75));
  CHECK(w.weights[1] == doctest::Approx(0.25));

  const std::vector<Dataset> single{labeled_dataset(42, 21)};
  w = size_weights(single);
  CHECK(w.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("balance_weights: symmetric, zero-information and skewed cases") {
  const std::vector<Dataset> balanced{labeled_dataset(80, 40), labeled_dataset(80, 40)};
  auto w = balance_weights(balanced);
  CHECK(w.weights[0] == doctest::Approx(0.5));
  CHECK(w.weights[1] == doctest::Approx(0.5));

  // Equal sizes, p = (0.5, 1.0): the single-class set is forced to zero.
  const std::vector<Dataset> one_sided{labeled_dataset(80, 40), labeled_dataset(80, 80)};
  w = balance_weights(one_sided);
  CHECK(w.weights[0] == doctest::Approx(1.0));
  CHECK(w.weights[1] == doctest::Approx(0.0));

  // Sizes (200, 100), both balanced -> (2/3, 1/3).
  const std::vector<Dataset> sized{labeled_dataset(200, 100), labeled_dataset(100, 50)};
  w = balance_weights(sized);
  CHECK(w.weights[0] == doctest::Approx(2.0 / 3.0));
  CHECK(w.weights[1] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("balance_weights: all single-class falls back to uniform") {
  const std::vector<Dataset> all_positive{labeled_dataset(10, 10), labeled_dataset(20, 20)};
  const auto w = balance_weights(all_positive);
  CHECK(w.weights[0] == doctest::Approx(0.5));
  CHECK(w.weights[1] == doctest::Approx(0.5));
}

TEST_CASE("balance_weights: regression datasets rejected") {
  std::vector<Dataset> reg{testutil::linear_dataset()};
  CHECK_THROWS_AS(balance_weights(reg), TaskKindError);
}

TEST_CASE("build_series_model: head input dim = base + expert outputs") {
  const MlpSpec base{7, {{8, Activation::Relu}}, 1, Activation::Identity};
  const Mlp expert = init_mlp(base, 1);

  const SeriesModel one = build_series_model({expert}, base, 2);
  CHECK(one.head.spec.input_dim == 8);

  const SeriesModel three = build_series_model({expert, expert, expert}, base, 2);
  CHECK(three.head.spec.input_dim == 10);

  // multi-output experts contribute every output
  const MlpSpec wide{7, {}, 2, Activation::Identity};
  const SeriesModel multi = build_series_model({init_mlp(wide, 3)}, base, 2);
  CHECK(multi.head.spec.input_dim == 9);
}

TEST_CASE("build_series_model: zero experts reproduce plain initialization") {
  const MlpSpec base{3, {{4, Activation::Tanh}}, 1, Activation::Identity};
  const SeriesModel model = build_series_model({}, base, 77);
  const Mlp plain = init_mlp(base, 77);
  CHECK(model.head.spec == plain.spec);
  CHECK(model.head.params == plain.params);
}

TEST_CASE("zero-expert series training reproduces plain training exactly") {
  const Dataset ds = testutil::linear_dataset(48);
  const MlpSpec spec{1, {{4, Activation::Tanh}}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 7;
  cfg.batch_size = 12;
  cfg.shuffle_seed = 2;

  SeriesModel model = build_series_model({}, spec, 19);
  Dataset head_set = ds;
  head_set.features = model.augment(ds.features);
  const auto [head, h1] = train(model.head, head_set, cfg);
  const auto [plain, h2] = train(init_mlp(spec, 19), ds, cfg);
  CHECK(head.params == plain.params);
}

TEST_CASE("build_series_model: expert input mismatch rejected") {
  const MlpSpec base{7, {}, 1, Activation::Identity};
  const Mlp bad_expert = init_mlp(MlpSpec{5, {}, 1, Activation::Identity}, 1);
  CHECK_THROWS_AS(build_series_model({bad_expert}, base, 1), ArchitectureError);
}

TEST_CASE("series forward: hand-built composition, expert(x)=2x, head sums") {
  Mlp expert = two_param_net(2.0, 0.0);
  const MlpSpec base{1, {}, 1, Activation::Identity};
  SeriesModel model = build_series_model({expert}, base, 3);
  // head: 2 inputs, unit weights, zero bias
  model.head.params = {1.0, 1.0, 0.0};
  Matrix in(1, 1);
  in(0, 0) = 3.0;
  CHECK(model.forward(in)(0, 0) == doctest::Approx(9.0));  // 3 + 6
}

TEST_CASE("series forward: zero expert plus zero-weighted augmentation = head alone") {
  Mlp zero_expert = two_param_net(0.0, 0.0);
  const MlpSpec base{1, {}, 1, Activation::Identity};
  SeriesModel model = build_series_model({zero_expert}, base, 3);
  model.head.params = {1.5, 0.0, 0.25};  // ignores the augmented coordinate

  MlpSpec solo{1, {}, 1, Activation::Identity};
  Mlp solo_net = init_mlp(solo, 1);
  solo_net.params = {1.5, 0.25};

  Matrix in(4, 1);
  for (std::size_t i = 0; i < 4; ++i) in(i, 0) = 0.5 * static_cast<double>(i) - 1.0;
  const Matrix a = model.forward(in);
  const Matrix b = solo_net.forward(in);
  for (std::size_t i = 0; i < 4; ++i) CHECK(a(i, 0) == b(i, 0));
}

TEST_CASE("series forward: perfect expert with pass-through head has zero loss") {
  // Target y = 2x; expert already computes it; head copies the augmented input.
  Mlp oracle = two_param_net(2.0, 0.0);
  const MlpSpec base{1, {}, 1, Activation::Identity};
  SeriesModel model = build_series_model({oracle}, base, 9);
  model.head.params = {0.0, 1.0, 0.0};
  const Dataset ds = testutil::linear_dataset(16, 2.0);
  CHECK(loss_value(model.forward(ds.features), ds.targets, LossKind::Mse) == 0.0);
}

TEST_CASE("series forward: shape mismatch throws") {
  const MlpSpec base{2, {}, 1, Activation::Identity};
  const SeriesModel model = build_series_model({}, base, 1);
  CHECK_THROWS_AS(model.forward(Matrix(1, 3)), ShapeError);
}

TEST_CASE("train_series: experts stay frozen and dimensions chain for k=3") {
  Rng rng(42);
  std::vector<Dataset> parts;
  for (int p = 0; p < 3; ++p) {
    parts.push_back(make_dataset(testutil::random_matrix(rng, 24, 2),
                                 testutil::random_matrix(rng, 24, 1)));
  }
  const Dataset test = make_dataset(testutil::random_matrix(rng, 10, 2),
                                    testutil::random_matrix(rng, 10, 1));
  const MlpSpec base{2, {{4, Activation::Tanh}}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;

  const SeriesResult result = train_series(parts, test, base, cfg, 7);
  CHECK(result.model.head.spec.input_dim == 4);  // base 2 + 2 expert outputs
  REQUIRE(result.model.experts.size() == 2);
  REQUIRE(result.stages.size() == 3);

  // Frozen experts: retraining the same stages reproduces their checksums.
  const Mlp expert1 = train(init_mlp(base, mix_seed(7, 1)), parts[0], cfg).first;
  const Mlp expert2 = train(init_mlp(base, mix_seed(7, 2)), parts[1], cfg).first;
  CHECK(result.model.experts[0].params_checksum() == expert1.params_checksum());
  CHECK(result.model.experts[1].params_checksum() == expert2.params_checksum());
}

TEST_CASE("train_series: identical datasets with an easy target reach the expert") {
  // y = 2x is exactly representable, so the head can match the expert.
  const Dataset ds = testutil::linear_dataset(64, 2.0);
  const std::vector<Dataset> parts{ds, ds};
  const MlpSpec base{1, {}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 400;
  cfg.batch_size = 64;
  cfg.learning_rate = 0.05;
  cfg.optimizer = OptimizerKind::Sgd;
  const SeriesResult result = train_series(parts, ds, base, cfg, 3);
  CHECK(result.post_test_loss <= result.pre_test_loss + 1e-3);
}

TEST_CASE("train_series: fewer than two parties rejected") {
  const Dataset ds = testutil::linear_dataset();
  const std::vector<Dataset> one{ds};
  const MlpSpec base{1, {}, 1, Activation::Identity};
  CHECK_THROWS_AS(train_series(one, ds, base, TrainConfig{}, 1), ConfigError);
}

TEST_CASE("train_transfer: single dataset identical to plain training") {
  const Dataset ds = testutil::linear_dataset(40);
  const MlpSpec spec{1, {{3, Activation::Tanh}}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.batch_size = 10;
  cfg.shuffle_seed = 5;
  const std::vector<Dataset> single{ds};
  const TransferResult result = train_transfer(single, ds, spec, cfg, 21);
  const auto [plain, history] = train(init_mlp(spec, 21), ds, cfg);
  CHECK(result.model.params == plain.params);
  CHECK(result.stages.size() == 1);
}

TEST_CASE("train_transfer: two identical datasets replay two sequential calls") {
  const Dataset ds = testutil::linear_dataset(32);
  const MlpSpec spec{1, {{3, Activation::Tanh}}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 8;
  cfg.shuffle_seed = 17;
  const std::vector<Dataset> twice{ds, ds};
  const TransferResult result = train_transfer(twice, ds, spec, cfg, 4);

  const Mlp stage1 = train(init_mlp(spec, 4), ds, cfg).first;
  const Mlp stage2 = train(stage1, ds, cfg).first;
  CHECK(result.model.params == stage2.params);
}

TEST_CASE("train_transfer: both orders produce finite per-stage records") {
  Rng rng(99);
  const Dataset d1 = make_dataset(testutil::random_matrix(rng, 30, 2),
                                  testutil::random_matrix(rng, 30, 1));
  const Dataset d2 = make_dataset(testutil::random_matrix(rng, 30, 2),
                                  testutil::random_matrix(rng, 30, 1));
  const Dataset test = make_dataset(testutil::random_matrix(rng, 12, 2),
                                    testutil::random_matrix(rng, 12, 1));
  const MlpSpec spec{2, {{4, Activation::Relu}}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.batch_size = 8;

  const std::vector<Dataset> fwd{d1, d2};
  const std::vector<Dataset> rev{d2, d1};
  for (const auto& order : {fwd, rev}) {
    const TransferResult result = train_transfer(order, test, spec, cfg, 6);
    REQUIRE(result.stages.size() == 2);
    for (const auto& stage : result.stages) {
      CHECK(std::isfinite(stage.train_loss));
      CHECK(std::isfinite(stage.test_loss));
    }
  }
}

TEST_CASE("train_transfer: empty list rejected") {
  const MlpSpec spec{1, {}, 1, Activation::Identity};
  CHECK_THROWS_AS(
      train_transfer({}, testutil::linear_dataset(), spec, TrainConfig{}, 1),
      ConfigError);
}

TEST_CASE("baseline: equals plain training on the concatenation") {
  Rng rng(7);
  const Dataset d1 = make_dataset(testutil::random_matrix(rng, 20, 2),
                                  testutil::random_matrix(rng, 20, 1));
  const Dataset d2 = make_dataset(testutil::random_matrix(rng, 20, 2),
                                  testutil::random_matrix(rng, 20, 1));
  const Dataset test = make_dataset(testutil::random_matrix(rng, 8, 2),
                                    testutil::random_matrix(rng, 8, 1));
  const MlpSpec spec{2, {{3, Activation::Tanh}}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 16;
  cfg.shuffle_seed = 3;

  const std::vector<Dataset> parts{d1, d2};
  const BaselineResult result = train_datasharing_baseline(parts, test, spec, cfg, 11);
  const auto [plain, history] = train(init_mlp(spec, 11), concat_datasets(parts), cfg);
  CHECK(result.model.params == plain.params);
}

TEST_CASE("train_average_ensemble: k=1 degenerates to plain training") {
  const Dataset ds = testutil::linear_dataset(40);
  const MlpSpec spec{1, {{3, Activation::Tanh}}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 6;
  cfg.batch_size = 8;
  const std::vector<Dataset> single{ds};
  const EnsembleResult result = train_average_ensemble(single, ds, spec, cfg, 13,
                                                       WeightingKind::Uniform);
  const auto [plain, history] = train(init_mlp(spec, 13), ds, cfg);
  CHECK(result.model.params == plain.params);
}

TEST_CASE("train_average_ensemble: stage metrics cover parties plus the average") {
  Rng rng(55);
  std::vector<Dataset> parts;
  for (int p = 0; p < 2; ++p) {
    parts.push_back(make_dataset(testutil::random_matrix(rng, 16, 2),
                                 testutil::random_matrix(rng, 16, 1)));
  }
  const Dataset test = make_dataset(testutil::random_matrix(rng, 8, 2),
                                    testutil::random_matrix(rng, 8, 1));
  const MlpSpec spec{2, {}, 1, Activation::Identity};
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 8;
  const EnsembleResult result =
      train_average_ensemble(parts, test, spec, cfg, 2, WeightingKind::Size);
  CHECK(result.stages.size() == 3);
  CHECK(result.party_models.size() == 2);
}
