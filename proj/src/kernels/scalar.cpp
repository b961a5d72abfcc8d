#include "spectramax/kernels.hpp"

namespace spectramax::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wdot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(A + r * ld, x, cols);
}

void gemv_t_scalar(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
                   const double* x, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(x[r], A + r * ld, y, cols);
}

void spmv_scalar(const CsrView& A, const double* x, double* y) {
  for (std::size_t r = 0; r < A.rows; ++r) {
    double s = 0.0;
    for (std::int32_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) s += A.values[k] * x[A.col_idx[k]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, dot_scalar, wdot_scalar, axpy_scalar,
                                 gemv_scalar, gemv_t_scalar, spmv_scalar};
  return table;
}

}  // namespace spectramax::kernels
