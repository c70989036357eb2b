#include "lexdom/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "lexdom/error.hpp"

namespace lexdom::metrics {
namespace {

struct ClassCounts {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
};

ClassCounts check_binary(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
  ClassCounts c;
  for (int l : labels) {
    if (l == 1) ++c.pos;
    else if (l == 0) ++c.neg;
    else throw Error("labels must be 0 or 1");
  }
  if (c.pos == 0 || c.neg == 0) throw DegenerateLabels();
  return c;
}

// Indices ordered by descending score.
std::vector<std::size_t> order_desc(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

}  // namespace

double mcr(std::span<const double> probs, std::span<const int> labels, double threshold) {
  if (probs.size() != labels.size()) throw Error("probabilities and labels differ in length");
  if (probs.empty()) throw Error("cannot compute a misclassification rate on no cases");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int predicted = probs[i] > threshold ? 1 : 0;
    if (predicted != labels[i]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(probs.size());
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  const auto counts = check_binary(scores, labels);
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the positive rank sum, in integers: a tie group spanning ranks
  // [lo+1, hi] gives each member a midrank of (lo+1+hi)/2.
  std::uint64_t twice_rank_sum = 0;
  std::size_t lo = 0;
  while (lo < idx.size()) {
    std::size_t hi = lo + 1;
    while (hi < idx.size() && scores[idx[hi]] == scores[idx[lo]]) ++hi;
    std::uint64_t pos_in_group = 0;
    for (std::size_t k = lo; k < hi; ++k) pos_in_group += labels[idx[k]] == 1;
    twice_rank_sum += pos_in_group * (lo + 1 + hi);
    lo = hi;
  }
  const std::uint64_t twice_u = twice_rank_sum - counts.pos * (counts.pos + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(counts.pos) * static_cast<double>(counts.neg));
}

double RocCurve::area() const {
  double a = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto [x0, y0] = points[k - 1];
    const auto [x1, y1] = points[k];
    a += (x1 - x0) * (y0 + y1) / 2.0;
  }
  return a;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const auto counts = check_binary(scores, labels);
  const auto idx = order_desc(scores);
  const double npos = static_cast<double>(counts.pos);
  const double nneg = static_cast<double>(counts.neg);

  RocCurve roc;
  roc.points.emplace_back(0.0, 0.0);
  std::uint64_t tp = 0, fp = 0;
  std::size_t k = 0;
  while (k < idx.size()) {
    const double s = scores[idx[k]];
    while (k < idx.size() && scores[idx[k]] == s) {
      if (labels[idx[k]] == 1) ++tp;
      else ++fp;
      ++k;
    }
    roc.points.emplace_back(static_cast<double>(fp) / nneg, static_cast<double>(tp) / npos);
  }
  return roc;
}

}  // namespace lexdom::metrics
