#include "nnagg/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "nnagg/errors.hpp"
#include "nnagg/train.hpp"

namespace nnagg {

double mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw ShapeError("mse: length mismatch");
  // Same definition as the training loss; wrapped here for reporting.
  Matrix p(pred.size(), 1), t(target.size(), 1);
  std::copy(pred.begin(), pred.end(), p.data.begin());
  std::copy(target.begin(), target.end(), t.data.begin());
  return loss_value(p, t, LossKind::Mse);
}

ConfusionCounts confusion(std::span<const double> pred_probs,
                          std::span<const double> targets, double threshold) {
  if (pred_probs.size() != targets.size()) throw ShapeError("confusion: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred_probs.size(); ++i) {
    const bool predicted = pred_probs[i] >= threshold;
    const bool actual = targets[i] != 0.0;
    if (predicted && actual) ++c.tp;
    else if (predicted && !actual) ++c.fp;
    else if (!predicted && !actual) ++c.tn;
    else ++c.fn;
  }
  return c;
}

PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c) {
  PrecisionRecallF1 out;
  out.precision = (c.tp + c.fp) == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
  out.recall = (c.tp + c.fn) == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
  const double pr = out.precision + out.recall;
  out.f1 = pr == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / pr;
  return out;
}

RocCurve roc(std::span<const double> pred_probs, std::span<const double> targets) {
  if (pred_probs.size() != targets.size()) throw ShapeError("roc: length mismatch");
  long positives = 0, negatives = 0;
  for (const double t : targets) {
    if (t != 0.0) ++positives;
    else ++negatives;
  }
  if (positives == 0 || negatives == 0) {
    throw MetricError("roc: needs at least one positive and one negative target");
  }

  std::vector<std::size_t> order(pred_probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pred_probs[a] > pred_probs[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    // One point per unique threshold: consume the whole tie group.
    const double prob = pred_probs[order[i]];
    while (i < order.size() && pred_probs[order[i]] == prob) {
      if (targets[order[i]] != 0.0) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }

  double auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  curve.auc = auc;
  return curve;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw MetricError("accuracy: no evaluated examples");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.precision(17);
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) out << p.fpr << ',' << p.tpr << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace nnagg
