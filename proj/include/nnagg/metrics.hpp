#pragma once

#include <span>
#include <string>
#include <vector>

namespace nnagg {

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// Points run from (0,0) to (1,1) with non-decreasing fpr; auc by trapezoid.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

double mse(std::span<const double> pred, std::span<const double> target);

// Positive iff prob >= threshold (ties count positive).
ConfusionCounts confusion(std::span<const double> pred_probs,
                          std::span<const double> targets, double threshold = 0.5);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 0/0 cases resolve to 0 by convention.
PrecisionRecallF1 precision_recall_f1(const ConfusionCounts& c);

// Thresholds swept over the sorted unique probabilities; tied probabilities
// collapse to one point. Needs at least one positive and one negative target.
RocCurve roc(std::span<const double> pred_probs, std::span<const double> targets);

double accuracy(const ConfusionCounts& c);

// Two-column comma-separated export (fpr,tpr) for plotting.
void write_roc_csv(const RocCurve& curve, const std::string& path);

}  // namespace nnagg
