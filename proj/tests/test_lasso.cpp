#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "lexdom/error.hpp"
#include "lexdom/lasso.hpp"
#include "problems.hpp"

using namespace lexdom;
using namespace lexdom::lasso;
using lexdom::testing::dense;
using lexdom::testing::random_problem;

namespace {

features::SparseVector sv(std::initializer_list<std::uint32_t> idx) { return {std::vector<std::uint32_t>(idx)}; }

double inf_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("lasso") {

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(3.0, 1.0) == 2.0);
  CHECK(soft_threshold(-3.0, 1.0) == -2.0);
  CHECK(soft_threshold(0.5, 1.0) == 0.0);
  CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("binary matrix views") {
  std::vector<features::SparseVector> rows = {sv({0, 2}), sv({}), sv({2})};
  const BinaryMatrix x(3, rows);
  CHECK(x.rows() == 3);
  CHECK(x.nonzeros() == 3);
  CHECK(x.col(2).size() == 2);
  CHECK(x.col(1).empty());
  const std::size_t pick[] = {2, 0};
  const auto sub = x.select_rows(pick);
  CHECK(sub.rows() == 2);
  CHECK(std::vector<std::uint32_t>(sub.row(1).begin(), sub.row(1).end()) == std::vector<std::uint32_t>{0, 2});
  CHECK_THROWS_AS(BinaryMatrix(2, rows), Error);
}

TEST_CASE("lambda_max") {
  std::vector<features::SparseVector> rows = {sv({0, 1}), sv({0, 1}), sv({1}), sv({1})};
  const BinaryMatrix x(2, rows);
  const std::vector<double> y = {1, 1, 0, 0};
  CHECK(lambda_max(x, y) == doctest::Approx(0.25).epsilon(1e-15));

  std::vector<features::SparseVector> ones = {sv({0}), sv({0}), sv({0}), sv({0})};
  CHECK(lambda_max(BinaryMatrix(1, ones), y) == 0.0);
  CHECK_THROWS_AS(lambda_max(x, std::vector<double>{1, 1, 1, 1}), DegenerateLabels);
}

TEST_CASE("lambda path shape") {
  const auto path = lambda_path(2.0);
  REQUIRE(path.size() == 100);
  CHECK(path.front() == 2.0);
  CHECK(path.back() == doctest::Approx(0.02).epsilon(1e-12));
  for (std::size_t k = 1; k < path.size(); ++k) CHECK(path[k] < path[k - 1]);
  CHECK(lambda_path(0.0) == std::vector<double>{0.0});
}

TEST_CASE("at lambda_max the fit is the null model") {
  Rng rng(11);
  const auto pr = random_problem(rng, 120, 30, 0.2, 5);
  const auto x = pr.matrix();
  const double lmax = lambda_max(x, pr.y);
  const double lambdas[] = {lmax * 4.0, lmax};
  const auto fit = fit_path(x, pr.y, lambdas);
  const double ybar = std::accumulate(pr.y.begin(), pr.y.end(), 0.0) / static_cast<double>(pr.y.size());
  for (const auto& m : fit.models) {
    CHECK(m.coefficients.empty());
    CHECK(m.intercept == doctest::Approx(std::log(ybar / (1.0 - ybar))).epsilon(1e-12));
  }
}

TEST_CASE("a column with zero score stays at zero") {
  // Column 0 is set in one positive and one negative row of a balanced set.
  std::vector<features::SparseVector> rows = {sv({0}), sv({}), sv({0}), sv({})};
  const std::vector<double> y = {1, 1, 0, 0};
  const BinaryMatrix x(1, rows);
  CHECK(lambda_max(x, y) == 0.0);
  const double lambdas[] = {0.1, 0.01, 0.001};
  for (const auto& m : fit_path(x, y, lambdas).models) CHECK(m.coefficients.empty());
}

TEST_CASE("path satisfies KKT and matches the proximal-gradient oracle") {
  Rng rng(2024);
  const auto pr = random_problem(rng, 200, 50, 0.15, 8);
  const auto x = pr.matrix();
  const auto lambdas = lambda_path(lambda_max(x, pr.y), 20, 0.02);
  FitOptions opt;
  const auto fit = fit_path(x, pr.y, lambdas, opt);
  for (const auto& m : fit.models) CHECK(kkt_violation(x, pr.y, m) <= 10 * opt.tol);

  const auto prox = pr.prox();
  for (std::size_t k : {0u, 4u, 9u, 14u, 19u}) {
    const auto ref = oracle::prox_grad(prox, lambdas[k]);
    REQUIRE(ref.gradient_map < 1e-10);
    INFO("lambda index " << k);
    CHECK(inf_norm_diff(dense(fit.models[k], pr.cols), ref.beta) <= 1e-4);
    CHECK(std::abs(fit.models[k].intercept - ref.intercept) <= 1e-4);
  }
}

TEST_CASE("objective never increases across outer iterations") {
  Rng rng(77);
  const auto pr = random_problem(rng, 300, 80, 0.1, 10);
  const auto x = pr.matrix();
  const auto lambdas = lambda_path(lambda_max(x, pr.y), 15, 0.01);
  double last_lambda = -1.0, last_obj = INFINITY;
  std::size_t checks = 0;
  FitOptions opt;
  opt.on_iteration = [&](double lambda, double obj) {
    if (lambda != last_lambda) {
      last_lambda = lambda;
      last_obj = INFINITY;
    }
    CHECK(obj <= last_obj + 1e-15 * std::abs(last_obj));
    last_obj = obj;
    ++checks;
  };
  fit_path(x, pr.y, lambdas, opt);
  CHECK(checks > lambdas.size());
}

TEST_CASE("row order does not matter") {
  Rng rng(5150);
  auto pr = random_problem(rng, 150, 40, 0.2, 6);
  const auto lambdas = lambda_path(lambda_max(pr.matrix(), pr.y), 10, 0.05);
  const auto a = fit_path(pr.matrix(), pr.y, lambdas);
  std::vector<std::size_t> perm(pr.rows.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span(perm));
  auto shuffled = pr;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.rows[i] = pr.rows[perm[i]];
    shuffled.y[i] = pr.y[perm[i]];
  }
  const auto b = fit_path(shuffled.matrix(), shuffled.y, lambdas);
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    CHECK(inf_norm_diff(dense(a.models[k], pr.cols), dense(b.models[k], pr.cols)) <= 1e-5);
    CHECK(a.models[k].intercept == doctest::Approx(b.models[k].intercept).epsilon(1e-5));
  }
}

TEST_CASE("cold and warm starts reach the same objective") {
  Rng rng(8);
  const auto pr = random_problem(rng, 250, 60, 0.12, 8);
  const auto x = pr.matrix();
  const auto lambdas = lambda_path(lambda_max(x, pr.y), 12, 0.02);
  FitOptions opt;
  const auto warm = fit_path(x, pr.y, lambdas, opt);
  for (std::size_t k = 1; k < lambdas.size(); k += 3) {
    const double single[] = {lambdas[k]};
    const auto cold = fit_path(x, pr.y, single, opt);
    CHECK(std::abs(objective(x, pr.y, cold.models[0]) - objective(x, pr.y, warm.models[k])) <= 10 * opt.tol);
  }
}

TEST_CASE("scalar and avx2 kernels give the same path") {
  if (!kernels::avx2_kernels()) return;
  Rng rng(99);
  const auto pr = random_problem(rng, 300, 70, 0.1, 8);
  const auto x = pr.matrix();
  const auto lambdas = lambda_path(lambda_max(x, pr.y), 10, 0.02);
  FitOptions a, b;
  a.kernels = &kernels::scalar_kernels();
  b.kernels = kernels::avx2_kernels();
  const auto fa = fit_path(x, pr.y, lambdas, a);
  const auto fb = fit_path(x, pr.y, lambdas, b);
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    CHECK(inf_norm_diff(dense(fa.models[k], pr.cols), dense(fb.models[k], pr.cols)) <= 1e-5);
}

TEST_CASE("fit_path argument checks") {
  std::vector<features::SparseVector> rows = {sv({0}), sv({})};
  const BinaryMatrix x(1, rows);
  const std::vector<double> y = {1, 0};
  const double increasing[] = {0.1, 0.2};
  CHECK_THROWS_AS(fit_path(x, y, increasing), Error);
  const double ok[] = {0.1};
  CHECK_THROWS_AS(fit_path(x, std::vector<double>{1, 1}, ok), DegenerateLabels);
}

TEST_CASE("cross-validation on a perfectly predictive toy") {
  std::vector<features::SparseVector> rows = {sv({0}), sv({0}), sv({}), sv({})};
  const std::vector<double> y = {1, 1, 0, 0};
  const BinaryMatrix x(1, rows);
  const double lambdas[] = {0.2, 0.05, 0.01};
  const auto cv = cross_validate(x, y, lambdas, 2, 1);
  CHECK(cv.mean_auc.back() == 1.0);
  CHECK(cv.fold_count == 2);
}

TEST_CASE("duplicated rows give identical folds") {
  std::vector<features::SparseVector> rows;
  std::vector<double> y;
  for (int i = 0; i < 10; ++i) {
    rows.push_back(sv({0, 1}));
    y.push_back(1);
    rows.push_back(sv({1}));
    y.push_back(0);
  }
  const BinaryMatrix x(2, rows);
  const auto lambdas = lambda_path(lambda_max(x, y), 5, 0.1);
  const auto cv = cross_validate(x, y, lambdas, 5, 3);
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    CHECK(cv.se_auc[l] == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t f = 1; f < 5; ++f) CHECK(cv.fold_auc[f][l] == cv.fold_auc[0][l]);
  }
}

TEST_CASE("cross-validation is deterministic and checks fold counts") {
  Rng rng(4);
  const auto pr = random_problem(rng, 200, 30, 0.2, 5);
  const auto x = pr.matrix();
  const auto lambdas = lambda_path(lambda_max(x, pr.y), 10, 0.05);
  const auto a = cross_validate(x, pr.y, lambdas, 5, 42);
  const auto b = cross_validate(x, pr.y, lambdas, 5, 42);
  CHECK(a.mean_auc == b.mean_auc);
  CHECK(a.fold_auc == b.fold_auc);
  CHECK(a.se_auc == b.se_auc);

  std::vector<features::SparseVector> rows = {sv({0}), sv({}), sv({}), sv({})};
  const std::vector<double> y = {1, 0, 0, 0};
  CHECK_THROWS_AS(cross_validate(BinaryMatrix(1, rows), y, lambdas, 2, 1), Error);
  CHECK_THROWS_AS(cross_validate(x, pr.y, lambdas, 1, 1), Error);
}

TEST_CASE("one standard error rule") {
  CvResult cv;
  cv.lambdas = {1.0, 0.5, 0.25};
  cv.mean_auc = {0.72, 0.75, 0.74};
  cv.se_auc = {0.02, 0.02, 0.02};
  CHECK(best_index(cv) == 1);
  CHECK(select_one_se(cv) == 0.5);
  cv.se_auc = {0.05, 0.05, 0.05};
  CHECK(select_one_se(cv) == 1.0);
}

TEST_CASE("prediction") {
  LassoModel m;
  m.intercept = std::log(3.0);
  m.feature_fingerprint = "abc";
  CHECK(predict_prob(m, sv({}), "abc") == doctest::Approx(0.75).epsilon(1e-15));
  m.coefficients[2] = -std::log(3.0);
  CHECK(linear_predictor(m, sv({1, 2})) == doctest::Approx(0.0));
  CHECK_THROWS_AS(predict_prob(m, sv({}), "abd"), FingerprintMismatch);
}

}  // TEST_SUITE
