#pragma once

// L1-penalized logistic regression over sparse binary designs.
//
// For a penalty lambda the solver minimizes
//
//   (1/n) sum_i [log(1 + exp(eta_i)) - y_i eta_i] + lambda * sum_j |beta_j|,
//   eta = beta_0 + X beta,
//
// with an unpenalized intercept. Each outer iteration forms the quadratic
// (IRLS) approximation of the loss at the current iterate and minimizes it by
// cyclic coordinate descent with soft-thresholding; the step is then
// backtracked until the full objective does not increase. Paths are fit from
// the largest penalty down, warm-starting each solve.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexdom/features.hpp"
#include "lexdom/kernels.hpp"

namespace lexdom::lasso {

/// Sparse 0/1 design matrix stored both row-major and column-major.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t cols, std::span<const features::SparseVector> rows);

  std::size_t rows() const noexcept { return row_ptr_.empty() ? 0 : row_ptr_.size() - 1; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nonzeros() const noexcept { return row_idx_.size(); }

  std::span<const std::uint32_t> row(std::size_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const std::uint32_t> col(std::size_t j) const {
    return {row_idx_.data() + col_ptr_[j], col_ptr_[j + 1] - col_ptr_[j]};
  }

  BinaryMatrix select_rows(std::span<const std::size_t> which) const;

 private:
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_idx_;
  std::vector<std::size_t> col_ptr_;
  std::vector<std::uint32_t> row_idx_;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::size_t max_iter = 0;
  std::size_t iterations = 0;  ///< outer iterations spent at this lambda
};

struct LassoModel {
  double intercept = 0.0;
  std::map<std::uint32_t, double> coefficients;  ///< nonzero entries only
  double lambda = 0.0;
  std::string feature_fingerprint;
  TrainingMeta meta;
};

struct PathFit {
  std::vector<double> lambdas;
  std::vector<LassoModel> models;
};

struct FitOptions {
  double tol = 1e-7;                ///< max coefficient change at convergence
  std::size_t max_iter = 10'000;    ///< outer (IRLS) iterations per lambda
  const kernels::KernelTable* kernels = nullptr;  ///< null: kernels::active()
  /// Called after every accepted outer iteration with (lambda, objective).
  std::function<void(double, double)> on_iteration;
};

struct CvResult {
  std::vector<double> lambdas;
  std::vector<double> mean_auc;
  std::vector<double> se_auc;  ///< sample standard deviation across folds / sqrt(K)
  std::vector<std::vector<double>> fold_auc;  ///< [fold][lambda]
  std::size_t fold_count = 0;
  std::uint64_t seed = 0;
};

/// sign(z) * max(|z| - gamma, 0).
double soft_threshold(double z, double gamma);

/// max_j |sum_i x_ij (y_i - ybar)| / n. Throws DegenerateLabels for one class.
double lambda_max(const BinaryMatrix& x, std::span<const double> y);

/// `count` values log-spaced from lambda_max down to ratio * lambda_max.
/// A zero lambda_max (no column carries signal) yields the single value 0.
std::vector<double> lambda_path(double lambda_max, std::size_t count = 100, double ratio = 0.01);

/// Fits every lambda in `lambdas` (strictly decreasing), warm-started.
/// Throws ConvergenceError or DegenerateLabels.
PathFit fit_path(const BinaryMatrix& x, std::span<const double> y, std::span<const double> lambdas,
                 const FitOptions& options = {});

/// Stratified K-fold cross-validation of the path, scored by held-out AUC.
/// Fold fits are independent and merged in fold order.
CvResult cross_validate(const BinaryMatrix& x, std::span<const double> y, std::span<const double> lambdas,
                        std::size_t folds, std::uint64_t seed, const FitOptions& options = {});

/// Index of the largest mean AUC (first one on ties, i.e. the largest lambda).
std::size_t best_index(const CvResult& cv);

/// Index of the largest lambda whose mean AUC is within one standard error
/// of the best.
std::size_t one_se_index(const CvResult& cv);

double select_one_se(const CvResult& cv);

/// beta_0 + sum of coefficients at the set indices.
double linear_predictor(const LassoModel& model, const features::SparseVector& v);

/// Logistic of the linear predictor. Throws FingerprintMismatch when the
/// vector was built from a different feature space than the model.
double predict_prob(const LassoModel& model, const features::SparseVector& v, std::string_view space_fingerprint);

/// Objective value of `model` on (x, y) at the model's lambda.
double objective(const BinaryMatrix& x, std::span<const double> y, const LassoModel& model);

/// Largest KKT violation: for active j, |g_j - lambda sign(beta_j)|; for
/// inactive j, max(|g_j| - lambda, 0); g_j = (1/n) sum_i x_ij (y_i - p_i).
/// The intercept contributes |(1/n) sum_i (y_i - p_i)|.
double kkt_violation(const BinaryMatrix& x, std::span<const double> y, const LassoModel& model);

}  // namespace lexdom::lasso
