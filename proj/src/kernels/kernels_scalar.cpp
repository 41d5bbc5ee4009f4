#include <cmath>

#include "difflab/kernels.hpp"

namespace difflab::kernels {

namespace {

void decay_terms(std::size_t n, const double* c, const double* r, const double* dt, double* out_x,
                 double* out_tail) {
  for (std::size_t i = 0; i < n; ++i) {
    const double tail = c[i] * std::exp(-r[i] * dt[i]);
    out_tail[i] = tail;
    out_x[i] = tail * r[i];
  }
}

void or_accumulate(std::size_t words, std::uint64_t* dst, const std::uint64_t* src) {
  for (std::size_t i = 0; i < words; ++i) dst[i] |= src[i];
}

void multiply(std::size_t n, const double* a, const double* b, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void affine(std::size_t n, double alpha, double beta, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * y[i] + beta;
}

double l1_distance(std::size_t n, const double* a, const double* b) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

constexpr KernelTable kScalar{"scalar", decay_terms, or_accumulate, multiply, affine, l1_distance};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace difflab::kernels
