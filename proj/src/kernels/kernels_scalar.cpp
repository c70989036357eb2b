#include <algorithm>
#include <cmath>

#include "lexdom/kernels.hpp"

namespace lexdom::kernels {
namespace {

inline double sigmoid1(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void logistic_working(const double* eta, const double* y, double* w, double* resid, std::size_t n,
                      double w_floor) {
  for (std::size_t i = 0; i < n; ++i) {
    const double p = sigmoid1(eta[i]);
    w[i] = std::max(p * (1.0 - p), w_floor);
    resid[i] = y[i] - p;
  }
}

double logistic_loss(const double* eta, const double* y, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = eta[i];
    total += std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))) - y[i] * x;
  }
  return total;
}

void sigmoid(const double* eta, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid1(eta[i]);
}

double gather_sum(const double* v, const std::uint32_t* idx, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += v[idx[k]];
  return s;
}

double sum(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", logistic_working, logistic_loss, sigmoid, gather_sum, sum, axpy};
  return table;
}

}  // namespace lexdom::kernels
