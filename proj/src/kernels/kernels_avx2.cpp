// Compiled with -mavx2 -mfma. Nothing here may run before the dispatcher has
// confirmed CPU support, and no inline templates from the standard library are
// instantiated here (the linker could pick the AVX2 copy for other TUs).

#include <immintrin.h>

#include <cmath>

#include "lexdom/kernels.hpp"

namespace lexdom::kernels {
namespace {

// Cephes-style exp: range reduction by ln2 and a (3,4) Pade approximant.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), r);

  const __m256d rr = _mm256_mul_pd(r, r);
  __m256d px = _mm256_set1_pd(1.26177193074810590878E-4);
  px = _mm256_fmadd_pd(px, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  px = _mm256_fmadd_pd(px, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_set1_pd(3.00198505138664455042E-6);
  qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  qx = _mm256_fmadd_pd(qx, rr, _mm256_set1_pd(2.00000000000000000009E0));
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // 2^fx built directly in the exponent field.
  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(e, _mm256_castsi256_pd(n64));
}

// Cephes-style natural log for positive, normal inputs.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i exp_bits = _mm256_srli_epi64(bits, 52);
  // int64 -> double for small non-negative values via the 2^52 magic number.
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(exp_bits, _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_exp = _mm256_set1_epi64x(0x3FE0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_exp));  // [0.5, 1)

  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, _mm256_set1_pd(1.0)));
  const __m256d one = _mm256_set1_pd(1.0);
  // m < sqrt(1/2): 2m - 1, else m - 1.
  __m256d t = _mm256_sub_pd(_mm256_add_pd(m, _mm256_and_pd(small, m)), one);

  const __m256d z = _mm256_mul_pd(t, t);
  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(7.70838733755885391666E0));
  __m256d q = _mm256_add_pd(t, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(7.11544750618167680940E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(2.31251620126765340583E1));

  __m256d y = _mm256_mul_pd(t, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fmadd_pd(e, _mm256_set1_pd(-2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d out = _mm256_add_pd(t, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), out);
}

inline __m256d sigmoid_pd(__m256d eta) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d neg = _mm256_sub_pd(_mm256_setzero_pd(), eta);
  return _mm256_div_pd(one, _mm256_add_pd(one, exp_pd(neg)));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void logistic_working(const double* eta, const double* y, double* w, double* resid, std::size_t n,
                      double w_floor) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d floor = _mm256_set1_pd(w_floor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = sigmoid_pd(_mm256_loadu_pd(eta + i));
    _mm256_storeu_pd(w + i, _mm256_max_pd(_mm256_mul_pd(p, _mm256_sub_pd(one, p)), floor));
    _mm256_storeu_pd(resid + i, _mm256_sub_pd(_mm256_loadu_pd(y + i), p));
  }
  for (; i < n; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-eta[i]));
    const double pq = p * (1.0 - p);
    w[i] = pq > w_floor ? pq : w_floor;
    resid[i] = y[i] - p;
  }
}

double logistic_loss(const double* eta, const double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(eta + i);
    const __m256d neg_abs = _mm256_or_pd(x, sign_mask);
    const __m256d soft = _mm256_add_pd(_mm256_max_pd(x, zero), log_pd(_mm256_add_pd(one, exp_pd(neg_abs))));
    acc = _mm256_add_pd(acc, _mm256_fnmadd_pd(_mm256_loadu_pd(y + i), x, soft));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double x = eta[i];
    total += (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::fabs(x))) - y[i] * x;
  }
  return total;
}

void sigmoid(const double* eta, double* p, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(p + i, sigmoid_pd(_mm256_loadu_pd(eta + i)));
  for (; i < n; ++i) p[i] = 1.0 / (1.0 + std::exp(-eta[i]));
}

double gather_sum(const double* v, const std::uint32_t* idx, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m128i i0 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    const __m128i i1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_i32gather_pd(v, i0, 8));
    acc1 = _mm256_add_pd(acc1, _mm256_i32gather_pd(v, i1, 8));
  }
  for (; k + 4 <= n; k += 4) {
    const __m128i i0 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
    acc0 = _mm256_add_pd(acc0, _mm256_i32gather_pd(v, i0, 8));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) s += v[idx[k]];
  return s;
}

double sum(const double* v, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(v + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += v[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", logistic_working, logistic_loss, sigmoid, gather_sum, sum, axpy};
  return table;
}

}  // namespace lexdom::kernels
