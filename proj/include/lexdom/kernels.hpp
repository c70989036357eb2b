#pragma once

// Dense and gathered arithmetic used by the lasso solver's inner loops.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2+FMA
// variant is selected at runtime when the CPU supports it. Results agree with
// the scalar versions up to floating-point reassociation (sums are split over
// four lanes) and the few-ulp error of the vector exp/log.
//
// The LEXDOM_KERNELS environment variable ("scalar", "avx2", "auto") overrides
// the selection at first use.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace lexdom::kernels {

struct KernelTable {
  std::string_view name;

  /// p = 1/(1+exp(-eta)); w = max(p(1-p), w_floor); resid = y - p.
  void (*logistic_working)(const double* eta, const double* y, double* w, double* resid, std::size_t n,
                           double w_floor);

  /// sum over i of (log(1+exp(eta_i)) - y_i * eta_i).
  double (*logistic_loss)(const double* eta, const double* y, std::size_t n);

  /// p = 1/(1+exp(-eta)).
  void (*sigmoid)(const double* eta, double* p, std::size_t n);

  /// sum over k of v[idx[k]].
  double (*gather_sum)(const double* v, const std::uint32_t* idx, std::size_t n);

  /// sum of v[0..n).
  double (*sum)(const double* v, std::size_t n);

  /// y += a * x.
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr if this build or this CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// The table chosen for this process (see LEXDOM_KERNELS).
const KernelTable& active();

/// Returns the table matching `name` ("scalar", "avx2", "auto"); throws Error
/// if it is unavailable.
const KernelTable& select(std::string_view name);

}  // namespace lexdom::kernels
