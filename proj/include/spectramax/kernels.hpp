#pragma once
// Data-parallel inner loops used by the solvers.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, a SIMD variant (AVX2+FMA on x86-64, NEON on aarch64). The
// variant is picked once at runtime from CPU features; the environment
// variable SPECTRAMAX_SIMD=scalar|avx2|neon or set_isa() overrides it.
// Variants differ only in summation order.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace spectramax::kernels {

enum class Isa { scalar, avx2, neon };

/// Compressed sparse row view. Indices are 0-based; row_ptr has rows+1 entries.
struct CsrView {
  std::size_t rows = 0;
  const std::int32_t* row_ptr = nullptr;
  const std::int32_t* col_idx = nullptr;
  const double* values = nullptr;
};

/// Table of kernel entry points for one instruction set.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*wdot)(const double* w, const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A row-major rows x cols with leading dimension ld.
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
               const double* x, double* y);
  // y = A^T x, A row-major rows x cols with leading dimension ld; y has cols entries.
  void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
                 const double* x, double* y);
  void (*spmv)(const CsrView& A, const double* x, double* y);
};

const KernelTable& scalar_table();
/// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Currently active table.
const KernelTable& active();
Isa active_isa();
/// Returns false if the requested ISA is unavailable (active table unchanged).
bool set_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Convenience wrappers over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double wdot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
          std::span<const double> x, std::span<double> y);
void gemv_t(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
            std::span<const double> x, std::span<double> y);
void spmv(const CsrView& A, std::span<const double> x, std::span<double> y);

}  // namespace spectramax::kernels
