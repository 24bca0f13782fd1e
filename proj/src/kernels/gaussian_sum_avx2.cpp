// Compiled with -mavx2 -mfma; only called after a runtime CPU check.
#include <immintrin.h>

#include "tsgaudit/kernels.hpp"

namespace tsgaudit::kernels {
namespace {

// exp(x) for x <= 0. Range reduction x = k ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation error < 1e-17 on that interval).
// Inputs below -708 flush to zero; those terms are < 1e-307 and do not move
// any sum we care about.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d lower = _mm256_set1_pd(-708.0);

  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double kInvFact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        1.0 / 2.0,
      1.0,                1.0};
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[i]));

  // 2^k through the exponent field; k is in [-1022, 0] here.
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scaled = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, scaled);
}

inline double horizontal_sum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

void gaussian_sum_avx2(PointView points, double scale_s, double scale_e,
                       std::span<const double> qs, std::span<const double> qe,
                       std::span<double> out) {
  const std::size_t n = points.s.size();
  const std::size_t full = n - n % 4;
  const double* ps = points.s.data();
  const double* pe = points.e.data();
  const __m256d neg_scale_s = _mm256_set1_pd(-scale_s);
  const __m256d neg_scale_e = _mm256_set1_pd(-scale_e);

  const std::size_t rem = n - full;
  const __m256i tail_mask = _mm256_set_epi64x(rem > 3 ? -1 : 0, rem > 2 ? -1 : 0,
                                              rem > 1 ? -1 : 0, rem > 0 ? -1 : 0);

  for (std::size_t q = 0; q < qs.size(); ++q) {
    const __m256d xs = _mm256_set1_pd(qs[q]);
    const __m256d xe = _mm256_set1_pd(qe[q]);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < full; i += 4) {
      const __m256d ds = _mm256_sub_pd(xs, _mm256_loadu_pd(ps + i));
      const __m256d de = _mm256_sub_pd(xe, _mm256_loadu_pd(pe + i));
      __m256d arg = _mm256_mul_pd(_mm256_mul_pd(ds, ds), neg_scale_s);
      arg = _mm256_fmadd_pd(_mm256_mul_pd(de, de), neg_scale_e, arg);
      acc = _mm256_add_pd(acc, exp_nonpositive(arg));
    }
    if (rem != 0) {
      const __m256d ds = _mm256_sub_pd(xs, _mm256_maskload_pd(ps + full, tail_mask));
      const __m256d de = _mm256_sub_pd(xe, _mm256_maskload_pd(pe + full, tail_mask));
      __m256d arg = _mm256_mul_pd(_mm256_mul_pd(ds, ds), neg_scale_s);
      arg = _mm256_fmadd_pd(_mm256_mul_pd(de, de), neg_scale_e, arg);
      const __m256d term = _mm256_and_pd(exp_nonpositive(arg), _mm256_castsi256_pd(tail_mask));
      acc = _mm256_add_pd(acc, term);
    }
    out[q] = horizontal_sum(acc);
  }
}

}  // namespace tsgaudit::kernels
