#include <doctest.h>

#include <cmath>
#include <vector>

#include "nnagg/errors.hpp"
#include "nnagg/metrics.hpp"
#include "nnagg/rng.hpp"

using namespace nnagg;

namespace {

// Mann-Whitney oracle: P(score_pos > score_neg) + 0.5 * P(tie).
double pair_count_auc(std::span<const double> probs, std::span<const double> targets) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (targets[i] == 0.0) continue;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      if (targets[j] != 0.0) continue;
      pairs += 1.0;
      if (probs[i] > probs[j]) wins += 1.0;
      else if (probs[i] == probs[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("mse: identical vectors give 0; ([0],[3]) gives 9") {
  const std::vector<double> a{1, 2, 3};
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(std::vector<double>{0}, std::vector<double>{3}) == doctest::Approx(9.0));
  CHECK_THROWS_AS(mse(std::vector<double>{1}, std::vector<double>{1, 2}), ShapeError);
}

TEST_CASE("confusion: basic tally") {
  const ConfusionCounts c =
      confusion(std::vector<double>{0.9, 0.1}, std::vector<double>{1, 0});
  CHECK(c.tp == 1);
  CHECK(c.tn == 1);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);
}

TEST_CASE("confusion: probability exactly at the threshold counts positive") {
  const ConfusionCounts c = confusion(std::vector<double>{0.5}, std::vector<double>{0});
  CHECK(c.fp == 1);
}

TEST_CASE("confusion: all-positive predictions on a balanced set of 10") {
  std::vector<double> probs(10, 0.99);
  std::vector<double> targets{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  const ConfusionCounts c = confusion(probs, targets);
  CHECK(c.tp == 5);
  CHECK(c.fp == 5);
  CHECK(c.tn == 0);
  CHECK(c.fn == 0);
}

TEST_CASE("confusion: length mismatch throws") {
  CHECK_THROWS_AS(confusion(std::vector<double>{0.5}, std::vector<double>{0, 1}),
                  ShapeError);
}

TEST_CASE("precision/recall/f1: reported rounding case p=1.00 r=0.93") {
  // With tp=93, fn=7, fp=0: f1 = 2*0.93/1.93
  const ConfusionCounts c{93, 0, 0, 7};
  const auto prf = precision_recall_f1(c);
  CHECK(prf.precision == doctest::Approx(1.0));
  CHECK(prf.recall == doctest::Approx(0.93));
  CHECK(prf.f1 == doctest::Approx(2.0 * 0.93 / 1.93));
  CHECK(prf.f1 == doctest::Approx(0.96).epsilon(0.01));
}

TEST_CASE("precision/recall/f1: 0/0 resolves to 0") {
  const auto prf = precision_recall_f1(ConfusionCounts{0, 0, 5, 0});
  CHECK(prf.precision == 0.0);
  CHECK(prf.recall == 0.0);
  CHECK(prf.f1 == 0.0);
}

TEST_CASE("precision/recall/f1: tp=3 fp=1 fn=0") {
  const auto prf = precision_recall_f1(ConfusionCounts{3, 1, 0, 0});
  CHECK(prf.precision == doctest::Approx(0.75));
  CHECK(prf.recall == doctest::Approx(1.0));
  CHECK(prf.f1 == doctest::Approx(6.0 / 7.0));
}

TEST_CASE("roc: perfect classifier has AUC 1") {
  const std::vector<double> targets{1, 0, 0, 1, 0};
  const RocCurve curve = roc(targets, targets);
  CHECK(curve.auc == doctest::Approx(1.0));
}

TEST_CASE("roc: constant predictions give the two-point diagonal, AUC 0.5") {
  const std::vector<double> probs(6, 0.5);
  const std::vector<double> targets{1, 1, 1, 0, 0, 0};
  const RocCurve curve = roc(probs, targets);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points.front().fpr == 0.0);
  CHECK(curve.points.front().tpr == 0.0);
  CHECK(curve.points.back().fpr == 1.0);
  CHECK(curve.points.back().tpr == 1.0);
  CHECK(curve.auc == doctest::Approx(0.5));
}

TEST_CASE("roc: probs (0.9,0.8,0.3) targets (1,0,0) via the pair-count oracle") {
  const std::vector<double> probs{0.9, 0.8, 0.3};
  const std::vector<double> targets{1, 0, 0};
  CHECK(pair_count_auc(probs, targets) == doctest::Approx(1.0));
  CHECK(roc(probs, targets).auc == doctest::Approx(1.0));
}

TEST_CASE("roc: single-class targets are undefined") {
  CHECK_THROWS_AS(roc(std::vector<double>{0.5, 0.7}, std::vector<double>{1, 1}),
                  MetricError);
}

TEST_CASE("roc: AUC equals the Mann-Whitney statistic on random inputs") {
  Rng rng(13579);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.below(49);
    std::vector<double> probs(n), targets(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Quantized probabilities force plenty of ties.
      probs[i] = static_cast<double>(rng.below(8)) / 8.0;
      targets[i] = static_cast<double>(rng.below(2));
      if (targets[i] == 1.0) has_pos = true;
      else has_neg = true;
    }
    if (!has_pos || !has_neg) continue;
    const RocCurve curve = roc(probs, targets);
    CHECK(curve.auc == doctest::Approx(pair_count_auc(probs, targets)).epsilon(1e-12));
  }
}

TEST_CASE("roc: curve starts at (0,0), ends at (1,1), both axes non-decreasing") {
  Rng rng(8642);
  std::vector<double> probs(40), targets(40);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i] = rng.uniform();
    targets[i] = static_cast<double>(rng.below(2));
  }
  targets[0] = 1.0;
  targets[1] = 0.0;
  const RocCurve curve = roc(probs, targets);
  CHECK(curve.points.front().fpr == 0.0);
  CHECK(curve.points.front().tpr == 0.0);
  CHECK(curve.points.back().fpr == doctest::Approx(1.0));
  CHECK(curve.points.back().tpr == doctest::Approx(1.0));
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
    CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
  }
}

TEST_CASE("accuracy: basic cases and the empty error") {
  CHECK(accuracy(ConfusionCounts{5, 0, 5, 0}) == doctest::Approx(1.0));
  CHECK(accuracy(ConfusionCounts{5, 1, 3, 1}) == doctest::Approx(0.8));
  CHECK(accuracy(ConfusionCounts{0, 5, 0, 5}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(accuracy(ConfusionCounts{}), MetricError);
}

TEST_CASE("accuracy at a threshold equals 1 - normalized hamming distance") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 5 + rng.below(60);
    std::vector<double> probs(n), targets(n);
    for (std::size_t i = 0; i < n; ++i) {
      probs[i] = rng.uniform();
      targets[i] = static_cast<double>(rng.below(2));
    }
    const double t = rng.uniform();
    double hamming = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double thresholded = probs[i] >= t ? 1.0 : 0.0;
      if (thresholded != targets[i]) hamming += 1.0;
    }
    CHECK(accuracy(confusion(probs, targets, t)) ==
          doctest::Approx(1.0 - hamming / static_cast<double>(n)));
  }
}

TEST_CASE("f1 never exceeds 1 and vanishes only with zero precision*recall") {
  Rng rng(91);
  for (int rep = 0; rep < 200; ++rep) {
    const ConfusionCounts c{static_cast<long>(rng.below(20)),
                            static_cast<long>(rng.below(20)),
                            static_cast<long>(rng.below(20)),
                            static_cast<long>(rng.below(20))};
    const auto prf = precision_recall_f1(c);
    CHECK(prf.f1 <= 1.0);
    if (prf.f1 == 0.0) {
      CHECK(prf.precision * prf.recall == 0.0);
    } else {
      CHECK(prf.precision * prf.recall > 0.0);
    }
  }
}
