#include "lexdom/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lexdom/error.hpp"
#include "lexdom/metrics.hpp"
#include "lexdom/rng.hpp"

namespace lexdom::lasso {
namespace {

constexpr double kWeightFloor = 1e-10;
constexpr std::size_t kMaxInnerPasses = 100'000;
constexpr int kMaxHalvings = 50;

double label_mean(std::span<const double> y) {
  if (y.empty()) throw DegenerateLabels();
  double s = 0.0;
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw Error("labels must be 0 or 1");
    s += v;
  }
  const double mean = s / static_cast<double>(y.size());
  if (mean <= 0.0 || mean >= 1.0) throw DegenerateLabels();
  return mean;
}

// Working state for one design matrix; coefficients persist across lambdas.
class Solver {
 public:
  Solver(const BinaryMatrix& x, std::span<const double> y, const FitOptions& opt)
      : x_(x),
        y_(y),
        opt_(opt),
        k_(opt.kernels ? *opt.kernels : kernels::active()),
        n_(x.rows()),
        inv_n_(1.0 / static_cast<double>(x.rows())),
        beta_(x.cols(), 0.0),
        in_active_(x.cols(), 0),
        eta_(n_),
        eta_try_(n_),
        delta_eta_(n_),
        w_(n_),
        resid_(n_),
        col_weight_(x.cols(), 0.0),
        col_weight_stamp_(x.cols(), 0) {
    const double ybar = label_mean(y);
    intercept_ = std::log(ybar / (1.0 - ybar));
    std::fill(eta_.begin(), eta_.end(), intercept_);
  }

  void reset_to_null() {
    for (auto j : active_) {
      beta_[j] = 0.0;
      in_active_[j] = 0;
    }
    active_.clear();
    const double ybar = label_mean(y_);
    intercept_ = std::log(ybar / (1.0 - ybar));
    std::fill(eta_.begin(), eta_.end(), intercept_);
  }

  std::size_t solve(double lambda) {
    double f_old = objective_at(eta_, l1_norm(), lambda);
    for (std::size_t outer = 1; outer <= opt_.max_iter; ++outer) {
      ++stamp_;
      k_.logistic_working(eta_.data(), y_.data(), w_.data(), resid_.data(), n_, kWeightFloor);
      std::fill(delta_eta_.begin(), delta_eta_.end(), 0.0);
      undo_.clear();
      const double old_intercept = intercept_;

      minimize_quadratic(lambda);

      // Backtrack along (beta_new - beta_old) until the objective does not rise.
      const double d_intercept = intercept_ - old_intercept;
      step_.clear();
      for (const auto& [j, old] : undo_) step_.emplace_back(j, beta_[j] - old);
      double t = 1.0;
      double f_new = 0.0;
      for (int h = 0;; ++h) {
        for (const auto& [j, old] : undo_) beta_[j] = old;
        for (const auto& [j, d] : step_) beta_[j] += t * d;
        for (std::size_t i = 0; i < n_; ++i) eta_try_[i] = eta_[i] + t * delta_eta_[i];
        f_new = objective_at(eta_try_, l1_norm(), lambda);
        if (f_new <= f_old + 1e-13 * std::abs(f_old) || h == kMaxHalvings) break;
        t *= 0.5;
      }
      intercept_ = old_intercept + t * d_intercept;
      eta_.swap(eta_try_);

      double max_change = std::abs(t * d_intercept);
      for (const auto& [j, d] : step_) max_change = std::max(max_change, std::abs(t * d));
      refresh_active();
      if (opt_.on_iteration) opt_.on_iteration(lambda, f_new);
      f_old = f_new;
      if (max_change < opt_.tol) return outer;
    }
    throw ConvergenceError(lambda, opt_.max_iter);
  }

  LassoModel snapshot(double lambda, std::size_t iterations) const {
    LassoModel m;
    m.intercept = intercept_;
    m.lambda = lambda;
    for (std::uint32_t j : sorted_active()) m.coefficients.emplace(j, beta_[j]);
    m.meta.tol = opt_.tol;
    m.meta.max_iter = opt_.max_iter;
    m.meta.iterations = iterations;
    return m;
  }

 private:
  double objective_at(const std::vector<double>& eta, double l1, double lambda) const {
    return k_.logistic_loss(eta.data(), y_.data(), n_) * inv_n_ + lambda * l1;
  }

  double l1_norm() const {
    double s = 0.0;
    for (auto j : sorted_active()) s += std::abs(beta_[j]);
    return s;
  }

  std::vector<std::uint32_t> sorted_active() const {
    std::vector<std::uint32_t> out;
    out.reserve(active_.size());
    for (auto j : active_)
      if (beta_[j] != 0.0) out.push_back(j);
    std::sort(out.begin(), out.end());
    return out;
  }

  double column_weight(std::uint32_t j) {
    if (col_weight_stamp_[j] != stamp_) {
      const auto c = x_.col(j);
      col_weight_[j] = k_.gather_sum(w_.data(), c.data(), c.size()) * inv_n_;
      col_weight_stamp_[j] = stamp_;
    }
    return col_weight_[j];
  }

  // One coordinate step on the quadratic model; returns |change|.
  double update(std::uint32_t j, double lambda) {
    const auto c = x_.col(j);
    if (c.empty()) return 0.0;
    const double v = column_weight(j);
    const double g = k_.gather_sum(resid_.data(), c.data(), c.size()) * inv_n_;
    const double old = beta_[j];
    const double next = soft_threshold(g + v * old, lambda) / v;
    const double d = next - old;
    if (d == 0.0) return 0.0;
    record_undo(j, old);
    beta_[j] = next;
    if (!in_active_[j]) {
      in_active_[j] = 1;
      active_.push_back(j);
    }
    for (auto i : c) {
      resid_[i] -= d * w_[i];
      delta_eta_[i] += d;
    }
    return std::abs(d);
  }

  double update_intercept() {
    const double d = k_.sum(resid_.data(), n_) / k_.sum(w_.data(), n_);
    if (d == 0.0) return 0.0;
    intercept_ += d;
    k_.axpy(-d, w_.data(), resid_.data(), n_);
    for (auto& e : delta_eta_) e += d;
    return std::abs(d);
  }

  void record_undo(std::uint32_t j, double old) {
    if (undo_stamp_.size() < beta_.size()) undo_stamp_.assign(beta_.size(), 0);
    if (undo_stamp_[j] == stamp_) return;
    undo_stamp_[j] = stamp_;
    undo_.emplace_back(j, old);
  }

  // Cycle over the active set until stable, then sweep every column; stop
  // when a full sweep leaves every coefficient within tolerance.
  void minimize_quadratic(double lambda) {
    for (std::size_t pass = 0; pass < kMaxInnerPasses;) {
      double full = update_intercept();
      for (std::uint32_t j = 0; j < x_.cols(); ++j) full = std::max(full, update(j, lambda));
      ++pass;
      if (full < opt_.tol) return;
      while (pass < kMaxInnerPasses) {
        double change = update_intercept();
        for (std::size_t a = 0; a < active_.size(); ++a) change = std::max(change, update(active_[a], lambda));
        ++pass;
        if (change < opt_.tol) break;
      }
    }
    throw ConvergenceError(lambda, kMaxInnerPasses);
  }

  void refresh_active() {
    std::erase_if(active_, [&](std::uint32_t j) {
      if (beta_[j] != 0.0) return false;
      in_active_[j] = 0;
      return true;
    });
  }

  const BinaryMatrix& x_;
  std::span<const double> y_;
  const FitOptions& opt_;
  const kernels::KernelTable& k_;
  std::size_t n_;
  double inv_n_;

  double intercept_ = 0.0;
  std::vector<double> beta_;
  std::vector<std::uint32_t> active_;
  std::vector<char> in_active_;
  std::vector<double> eta_, eta_try_, delta_eta_, w_, resid_;
  std::vector<double> col_weight_;
  std::vector<std::uint64_t> col_weight_stamp_;
  std::vector<std::uint64_t> undo_stamp_;
  std::vector<std::pair<std::uint32_t, double>> undo_, step_;
  std::uint64_t stamp_ = 0;
};

}  // namespace

BinaryMatrix::BinaryMatrix(std::size_t cols, std::span<const features::SparseVector> rows) : cols_(cols) {
  row_ptr_.reserve(rows.size() + 1);
  row_ptr_.push_back(0);
  std::vector<std::size_t> col_count(cols + 1, 0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
      const auto j = r.indices[k];
      if (j >= cols) throw Error("column index " + std::to_string(j) + " out of range");
      if (k > 0 && r.indices[k - 1] >= j) throw Error("row indices must be strictly increasing");
      col_idx_.push_back(j);
      ++col_count[j + 1];
    }
    row_ptr_.push_back(col_idx_.size());
  }
  col_ptr_.resize(cols + 1);
  std::partial_sum(col_count.begin(), col_count.end(), col_ptr_.begin());
  row_idx_.resize(col_idx_.size());
  std::vector<std::size_t> fill(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      row_idx_[fill[col_idx_[k]]++] = static_cast<std::uint32_t>(i);
}

BinaryMatrix BinaryMatrix::select_rows(std::span<const std::size_t> which) const {
  std::vector<features::SparseVector> sub;
  sub.reserve(which.size());
  for (auto i : which) {
    const auto r = row(i);
    sub.push_back({std::vector<std::uint32_t>(r.begin(), r.end())});
  }
  return BinaryMatrix(cols_, sub);
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

double lambda_max(const BinaryMatrix& x, std::span<const double> y) {
  if (y.size() != x.rows()) throw Error("label count does not match design rows");
  const double ybar = label_mean(y);
  double best = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double s = 0.0;
    for (auto i : x.col(j)) s += y[i] - ybar;
    best = std::max(best, std::abs(s));
  }
  return best / static_cast<double>(y.size());
}

std::vector<double> lambda_path(double lmax, std::size_t count, double ratio) {
  if (count == 0) throw Error("lambda path needs at least one value");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error("lambda ratio must be in (0, 1)");
  if (!(lmax > 0.0)) return {0.0};
  std::vector<double> out(count);
  out[0] = lmax;
  const double log_step = count > 1 ? std::log(ratio) / static_cast<double>(count - 1) : 0.0;
  for (std::size_t k = 1; k < count; ++k) out[k] = lmax * std::exp(log_step * static_cast<double>(k));
  return out;
}

PathFit fit_path(const BinaryMatrix& x, std::span<const double> y, std::span<const double> lambdas,
                 const FitOptions& options) {
  if (y.size() != x.rows()) throw Error("label count does not match design rows");
  if (lambdas.empty()) throw Error("empty lambda sequence");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (lambdas[k] < 0.0) throw Error("lambda must be non-negative");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1])) throw Error("lambdas must be strictly decreasing");
  }
  const double lmax = lambda_max(x, y);

  PathFit out;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  Solver solver(x, y, options);
  for (double lambda : lambdas) {
    if (lambda >= lmax) {
      // Every score is inside the penalty: the null model is the exact optimum.
      solver.reset_to_null();
      out.models.push_back(solver.snapshot(lambda, 0));
      continue;
    }
    const std::size_t iters = solver.solve(lambda);
    out.models.push_back(solver.snapshot(lambda, iters));
  }
  return out;
}

CvResult cross_validate(const BinaryMatrix& x, std::span<const double> y, std::span<const double> lambdas,
                        std::size_t folds, std::uint64_t seed, const FitOptions& options) {
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (y.size() != x.rows()) throw Error("label count does not match design rows");
  label_mean(y);

  // Stratified assignment: shuffle each class, deal rows round-robin.
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1.0 ? pos : neg).push_back(i);
  if (pos.size() < folds || neg.size() < folds)
    throw Error("each class needs at least " + std::to_string(folds) + " rows for " + std::to_string(folds) +
                "-fold cross-validation");
  Rng rng(seed);
  rng.shuffle(std::span(pos));
  rng.shuffle(std::span(neg));
  std::vector<std::size_t> fold_of(y.size());
  for (std::size_t k = 0; k < pos.size(); ++k) fold_of[pos[k]] = k % folds;
  for (std::size_t k = 0; k < neg.size(); ++k) fold_of[neg[k]] = k % folds;

  CvResult cv;
  cv.lambdas.assign(lambdas.begin(), lambdas.end());
  cv.fold_count = folds;
  cv.seed = seed;
  cv.fold_auc.resize(folds);

  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == f ? test : train).push_back(i);
    const BinaryMatrix x_train = x.select_rows(train);
    std::vector<double> y_train;
    y_train.reserve(train.size());
    for (auto i : train) y_train.push_back(y[i]);
    std::vector<int> y_test;
    for (auto i : test) y_test.push_back(static_cast<int>(y[i]));

    PathFit path;
    try {
      path = fit_path(x_train, y_train, lambdas, options);
    } catch (const ConvergenceError& e) {
      throw Error("fold " + std::to_string(f) + ": " + e.what());
    }
    auto& aucs = cv.fold_auc[f];
    std::vector<double> scores(test.size());
    for (const auto& m : path.models) {
      for (std::size_t k = 0; k < test.size(); ++k) {
        double eta = m.intercept;
        for (auto j : x.row(test[k]))
          if (const auto it = m.coefficients.find(j); it != m.coefficients.end()) eta += it->second;
        scores[k] = eta;
      }
      aucs.push_back(metrics::auc(scores, y_test));
    }
  }

  const double kf = static_cast<double>(folds);
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    double mean = 0.0;
    for (std::size_t f = 0; f < folds; ++f) mean += cv.fold_auc[f][l];
    mean /= kf;
    double ss = 0.0;
    for (std::size_t f = 0; f < folds; ++f) ss += (cv.fold_auc[f][l] - mean) * (cv.fold_auc[f][l] - mean);
    cv.mean_auc.push_back(mean);
    cv.se_auc.push_back(std::sqrt(ss / (kf - 1.0)) / std::sqrt(kf));
  }
  return cv;
}

std::size_t best_index(const CvResult& cv) {
  if (cv.mean_auc.empty()) throw Error("empty cross-validation result");
  std::size_t best = 0;
  for (std::size_t l = 1; l < cv.mean_auc.size(); ++l)
    if (cv.mean_auc[l] > cv.mean_auc[best]) best = l;
  return best;
}

std::size_t one_se_index(const CvResult& cv) {
  const std::size_t best = best_index(cv);
  const double threshold = cv.mean_auc[best] - cv.se_auc[best];
  // Lambdas are decreasing, so the first qualifying index is the largest lambda.
  for (std::size_t l = 0; l < cv.mean_auc.size(); ++l)
    if (cv.mean_auc[l] >= threshold) return l;
  return best;
}

double select_one_se(const CvResult& cv) { return cv.lambdas[one_se_index(cv)]; }

double linear_predictor(const LassoModel& model, const features::SparseVector& v) {
  double eta = model.intercept;
  for (auto j : v.indices)
    if (const auto it = model.coefficients.find(j); it != model.coefficients.end()) eta += it->second;
  return eta;
}

double predict_prob(const LassoModel& model, const features::SparseVector& v, std::string_view space_fingerprint) {
  if (model.feature_fingerprint != space_fingerprint)
    throw FingerprintMismatch("model was trained on feature space " + model.feature_fingerprint +
                              " but the vector comes from " + std::string(space_fingerprint));
  return 1.0 / (1.0 + std::exp(-linear_predictor(model, v)));
}

double objective(const BinaryMatrix& x, std::span<const double> y, const LassoModel& model) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double eta = model.intercept;
    for (auto j : x.row(i))
      if (const auto it = model.coefficients.find(j); it != model.coefficients.end()) eta += it->second;
    loss += std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta))) - y[i] * eta;
  }
  double l1 = 0.0;
  for (const auto& [j, b] : model.coefficients) l1 += std::abs(b);
  return loss / static_cast<double>(x.rows()) + model.lambda * l1;
}

double kkt_violation(const BinaryMatrix& x, std::span<const double> y, const LassoModel& model) {
  const std::size_t n = x.rows();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = model.intercept;
    for (auto j : x.row(i))
      if (const auto it = model.coefficients.find(j); it != model.coefficients.end()) eta += it->second;
    r[i] = y[i] - 1.0 / (1.0 + std::exp(-eta));
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double worst = std::abs(std::accumulate(r.begin(), r.end(), 0.0)) * inv_n;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double g = 0.0;
    for (auto i : x.col(j)) g += r[i];
    g *= inv_n;
    const auto it = model.coefficients.find(static_cast<std::uint32_t>(j));
    const double v = it != model.coefficients.end()
                         ? std::abs(g - model.lambda * (it->second > 0 ? 1.0 : -1.0))
                         : std::max(std::abs(g) - model.lambda, 0.0);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace lexdom::lasso
