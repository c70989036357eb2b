#include <cmath>

#include "doctest.h"
#include "lexdom/error.hpp"
#include "lexdom/metrics.hpp"
#include "lexdom/rng.hpp"
#include "oracles/pairwise_auc.hpp"

using namespace lexdom;
using namespace lexdom::metrics;

TEST_SUITE("metrics") {

TEST_CASE("mcr examples") {
  const std::vector<double> p = {0.9, 0.2, 0.6, 0.4};
  const std::vector<int> y = {1, 0, 0, 1};
  CHECK(mcr(p, y) == 0.5);
  CHECK(mcr(std::vector<double>{0.5}, std::vector<int>{1}) == 1.0);
  CHECK(mcr(std::vector<double>{0.5}, std::vector<int>{0}) == 0.0);
  CHECK(mcr(p, y, -INFINITY) == 0.5);  // everything predicted positive: share of label 0
  CHECK(mcr(p, y, 1.0) == 0.5);
  CHECK_THROWS_AS(mcr(std::vector<double>{}, std::vector<int>{}), Error);
  CHECK_THROWS_AS(mcr(std::vector<double>{0.1}, std::vector<int>{1, 0}), Error);
}

TEST_CASE("auc examples") {
  CHECK(auc(std::vector<double>{0.9, 0.6, 0.4, 0.2}, std::vector<int>{1, 0, 0, 1}) == 0.5);
  CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(auc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{0, 1, 1}) == 0.5);
  CHECK_THROWS_AS(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DegenerateLabels);
}

TEST_CASE("roc examples") {
  const auto perfect = roc_curve(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{0, 0, 1, 1});
  CHECK(std::find(perfect.points.begin(), perfect.points.end(), std::pair{0.0, 1.0}) != perfect.points.end());
  const auto flat = roc_curve(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{0, 1, 0});
  CHECK(flat.points == std::vector<std::pair<double, double>>{{0.0, 0.0}, {1.0, 1.0}});
  const auto mixed = roc_curve(std::vector<double>{0.9, 0.6, 0.4, 0.2}, std::vector<int>{1, 0, 0, 1});
  CHECK(mixed.area() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("auc equals the pairwise oracle exactly, trapezoid agrees") {
  Rng rng(314159);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(150);
    const std::size_t levels = 1 + rng.below(20);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(levels)) / 7.0;
      y[i] = rng.bernoulli(0.3) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(auc(s, y) == oracle::pairwise_auc(s, y));
    CHECK(std::abs(roc_curve(s, y).area() - auc(s, y)) <= 1e-12);
  }
}

TEST_CASE("auc invariants") {
  Rng rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(80);
    std::vector<double> s(n), t(n);
    std::vector<int> y(n), flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::floor(rng.uniform() * 10.0) - 3.0;
      t[i] = std::exp(s[i]) * 5.0 + 1.0;  // strictly increasing transform
      y[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    for (std::size_t i = 0; i < n; ++i) flipped[i] = 1 - y[i];
    CHECK(auc(s, y) == auc(t, y));
    CHECK(auc(s, y) + auc(s, flipped) == doctest::Approx(1.0).epsilon(1e-15));
    const double m = mcr(s, y, 0.0);
    CHECK(m >= 0.0);
    CHECK(m <= 1.0);
  }
}

TEST_CASE("roc curve is monotone from (0,0) to (1,1)") {
  Rng rng(5);
  std::vector<double> s(500);
  std::vector<int> y(500);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = rng.uniform();
    y[i] = rng.bernoulli(0.2) ? 1 : 0;
  }
  const auto roc = roc_curve(s, y);
  CHECK(roc.points.front() == std::pair{0.0, 0.0});
  CHECK(roc.points.back() == std::pair{1.0, 1.0});
  for (std::size_t k = 1; k < roc.points.size(); ++k) {
    CHECK(roc.points[k].first >= roc.points[k - 1].first);
    CHECK(roc.points[k].second >= roc.points[k - 1].second);
  }
}

}  // TEST_SUITE
