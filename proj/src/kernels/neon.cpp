// NEON variants (aarch64 only; NEON is architecturally guaranteed there).
#include <arm_neon.h>

#include "spectramax/kernels.hpp"

namespace spectramax::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0), s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
    s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wdot_neon(const double* w, const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) s0 = vfmaq_f64(s0, vmulq_f64(vld1q_f64(w + i), vld1q_f64(a + i)), vld1q_f64(b + i));
  double s = vaddvq_f64(s0);
  for (; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_neon(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
               const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(A + r * ld, x, cols);
}

void gemv_t_neon(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_neon(x[r], A + r * ld, y, cols);
}

void spmv_neon(const CsrView& A, const double* x, double* y) {
  for (std::size_t r = 0; r < A.rows; ++r) {
    double s = 0.0;
    for (std::int32_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable* neon_table_impl() {
  static const KernelTable table{Isa::neon, dot_neon, wdot_neon, axpy_neon,
                                 gemv_neon, gemv_t_neon, spmv_neon};
  return &table;
}

}  // namespace spectramax::kernels
