#include <cmath>
#include <vector>

#include "doctest.h"
#include "lexdom/kernels.hpp"
#include "lexdom/rng.hpp"

using namespace lexdom;
using namespace lexdom::kernels;

namespace {

struct Inputs {
  std::vector<double> eta, y, v;
  std::vector<std::uint32_t> idx;
};

Inputs random_inputs(Rng& rng, std::size_t n, double scale) {
  Inputs in;
  for (std::size_t i = 0; i < n; ++i) {
    in.eta.push_back((rng.uniform() * 2.0 - 1.0) * scale);
    in.y.push_back(rng.bernoulli(0.4) ? 1.0 : 0.0);
    in.v.push_back(rng.uniform() * 2.0 - 1.0);
  }
  for (std::size_t k = 0; k < 2 * n; ++k) in.idx.push_back(static_cast<std::uint32_t>(rng.below(n == 0 ? 1 : n)));
  if (n == 0) in.idx.clear();
  return in;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)}); }

void check_equivalent(const KernelTable& ref, const KernelTable& simd) {
  Rng rng(7);
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1001}) {
    for (double scale : {1.0, 10.0, 40.0, 800.0}) {
      const auto in = random_inputs(rng, n, scale);
      std::vector<double> w1(n), r1(n), w2(n), r2(n), p1(n), p2(n);
      ref.logistic_working(in.eta.data(), in.y.data(), w1.data(), r1.data(), n, 1e-10);
      simd.logistic_working(in.eta.data(), in.y.data(), w2.data(), r2.data(), n, 1e-10);
      ref.sigmoid(in.eta.data(), p1.data(), n);
      simd.sigmoid(in.eta.data(), p2.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        INFO("n=" << n << " eta=" << in.eta[i]);
        CHECK(close(w1[i], w2[i], 1e-13));
        CHECK(close(r1[i], r2[i], 1e-13));
        CHECK(close(p1[i], p2[i], 1e-13));
        CHECK(std::isfinite(w2[i]));
      }
      INFO("n=" << n << " scale=" << scale);
      CHECK(close(ref.logistic_loss(in.eta.data(), in.y.data(), n),
                  simd.logistic_loss(in.eta.data(), in.y.data(), n), 1e-12));
      CHECK(close(ref.sum(in.v.data(), n), simd.sum(in.v.data(), n), 1e-12));
      CHECK(close(ref.gather_sum(in.v.data(), in.idx.data(), in.idx.size()),
                  simd.gather_sum(in.v.data(), in.idx.data(), in.idx.size()), 1e-12));
      std::vector<double> a1 = in.v, a2 = in.v;
      ref.axpy(0.37, in.eta.data(), a1.data(), n);
      simd.axpy(0.37, in.eta.data(), a2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(close(a1[i], a2[i], 1e-15));
    }
  }
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
  const auto& k = scalar_kernels();
  const double eta[] = {0.0, std::log(3.0), -1000.0, 1000.0};
  const double y[] = {1.0, 0.0, 0.0, 1.0};
  double w[4], r[4];
  k.logistic_working(eta, y, w, r, 4, 1e-10);
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(r[0] == doctest::Approx(0.5));
  CHECK(r[1] == doctest::Approx(-0.75));
  CHECK(w[2] == 1e-10);
  CHECK(w[3] == 1e-10);
  // log(1+e^0) - 0 + log(1+3) + ~0 + ~0
  CHECK(k.logistic_loss(eta, y, 4) == doctest::Approx(std::log(2.0) + std::log(4.0)));
  const double v[] = {1.0, 2.0, 4.0};
  const std::uint32_t idx[] = {2, 2, 0};
  CHECK(k.gather_sum(v, idx, 3) == 9.0);
  CHECK(k.sum(v, 3) == 7.0);
}

TEST_CASE("avx2 matches scalar") {
  const auto* simd = avx2_kernels();
  if (!simd) {
    MESSAGE("AVX2 kernels unavailable on this machine; equivalence not exercised");
    return;
  }
  check_equivalent(scalar_kernels(), *simd);
}

TEST_CASE("selection by name") {
  CHECK(select("scalar").name == "scalar");
  CHECK(&select("auto") == &active());
  CHECK_THROWS(select("sse9"));
  if (avx2_kernels()) CHECK(select("avx2").name == "avx2");
}

}  // TEST_SUITE
