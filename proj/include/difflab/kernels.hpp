#pragma once

#include <cstddef>
#include <cstdint>

namespace difflab::kernels {

/// Data-parallel inner loops with a scalar reference and an AVX2 variant.
/// All pointers may alias only where stated; lengths may be any size.
struct KernelTable {
  const char* name;
  /// out_x[i] = c[i]·r[i]·exp(−r[i]·dt[i]); out_tail[i] = c[i]·exp(−r[i]·dt[i]).
  /// Requires r[i]·dt[i] >= 0.
  void (*decay_terms)(std::size_t n, const double* c, const double* r, const double* dt,
                      double* out_x, double* out_tail);
  /// dst[i] |= src[i].
  void (*or_accumulate)(std::size_t words, std::uint64_t* dst, const std::uint64_t* src);
  /// out[i] = a[i]·b[i]; out may alias a or b.
  void (*multiply)(std::size_t n, const double* a, const double* b, double* out);
  /// y[i] = alpha·y[i] + beta.
  void (*affine)(std::size_t n, double alpha, double beta, double* y);
  /// Σ |a[i] − b[i]|.
  double (*l1_distance)(std::size_t n, const double* a, const double* b);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the CPU lacks AVX2/FMA.
const KernelTable* avx2_table() noexcept;

/// Table chosen once per process: AVX2 when supported unless the environment
/// variable DIFFLAB_KERNELS=scalar forces the reference path.
const KernelTable& active() noexcept;

}  // namespace difflab::kernels
