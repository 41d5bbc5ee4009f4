#include <immintrin.h>

#include <cmath>

#include "difflab/kernels.hpp"

#define DIFFLAB_AVX2 __attribute__((target("avx2,fma")))

namespace difflab::kernels {

namespace {

// exp(x) for x <= 0: x = k·ln2 + s with |s| <= ln2/2, exp(s) by a degree-13
// Taylor polynomial (truncation below 1e-17), 2^k assembled in the exponent
// field. Inputs below −708 flush to zero.
DIFFLAB_AVX2 inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  x = _mm256_min_pd(x, _mm256_setzero_pd());

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d s = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), x);
  s = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), s);

  static constexpr double kCoef[14] = {
      1.0,
      1.0,
      1.0 / 2,
      1.0 / 6,
      1.0 / 24,
      1.0 / 120,
      1.0 / 720,
      1.0 / 5040,
      1.0 / 40320,
      1.0 / 362880,
      1.0 / 3628800,
      1.0 / 39916800,
      1.0 / 479001600,
      1.0 / 6227020800.0,
  };
  __m256d p = _mm256_set1_pd(kCoef[13]);
  for (int i = 12; i >= 0; --i) p = _mm256_fmadd_pd(p, s, _mm256_set1_pd(kCoef[i]));

  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, result);
}

DIFFLAB_AVX2 void decay_terms(std::size_t n, const double* c, const double* r, const double* dt,
                              double* out_x, double* out_tail) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d rv = _mm256_loadu_pd(r + i);
    const __m256d arg = _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(rv, _mm256_loadu_pd(dt + i)));
    const __m256d tail = _mm256_mul_pd(_mm256_loadu_pd(c + i), exp_nonpositive(arg));
    _mm256_storeu_pd(out_tail + i, tail);
    _mm256_storeu_pd(out_x + i, _mm256_mul_pd(tail, rv));
  }
  for (; i < n; ++i) {
    const double tail = c[i] * std::exp(-r[i] * dt[i]);
    out_tail[i] = tail;
    out_x[i] = tail * r[i];
  }
}

DIFFLAB_AVX2 void or_accumulate(std::size_t words, std::uint64_t* dst, const std::uint64_t* src) {
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    auto* d = reinterpret_cast<__m256i*>(dst + i);
    const auto* s = reinterpret_cast<const __m256i*>(src + i);
    _mm256_storeu_si256(d, _mm256_or_si256(_mm256_loadu_si256(d), _mm256_loadu_si256(s)));
  }
  for (; i < words; ++i) dst[i] |= src[i];
}

DIFFLAB_AVX2 void multiply(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

DIFFLAB_AVX2 void affine(std::size_t n, double alpha, double beta, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), vb));
  }
  for (; i < n; ++i) y[i] = alpha * y[i] + beta;
}

DIFFLAB_AVX2 double l1_distance(std::size_t n, const double* a, const double* b) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

constexpr KernelTable kAvx2{"avx2", decay_terms, or_accumulate, multiply, affine, l1_distance};

}  // namespace

const KernelTable* avx2_table() noexcept {
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2;
  return nullptr;
}

}  // namespace difflab::kernels
