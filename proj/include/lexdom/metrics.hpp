#pragma once

#include <span>
#include <utility>
#include <vector>

namespace lexdom::metrics {

/// Fraction of cases where (prob > threshold) disagrees with the label. A
/// probability exactly at the threshold predicts class 0.
double mcr(std::span<const double> probs, std::span<const int> labels, double threshold = 0.5);

/// Mann-Whitney AUC with half credit for ties, via midranks in O(n log n).
double auc(std::span<const double> scores, std::span<const int> labels);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  ///< (fpr, tpr), from (0,0) to (1,1)

  /// Trapezoidal area under the points.
  double area() const;
};

/// One point per distinct score, sweeping the threshold from +inf down.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

}  // namespace lexdom::metrics
