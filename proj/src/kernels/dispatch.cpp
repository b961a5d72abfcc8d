#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "spectramax/kernels.hpp"

namespace spectramax::kernels {

#if defined(SPECTRAMAX_HAVE_AVX2)
const KernelTable* avx2_table_impl();
#endif
#if defined(SPECTRAMAX_HAVE_NEON)
const KernelTable* neon_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(SPECTRAMAX_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(SPECTRAMAX_HAVE_NEON)
  return neon_table_impl();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar: return &scalar_table();
    case Isa::avx2: return avx2_table();
    case Isa::neon: return neon_table();
  }
  return nullptr;
}

const KernelTable* detect() {
  if (const char* env = std::getenv("SPECTRAMAX_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return &scalar_table();
    if (v == "avx2" && avx2_table()) return avx2_table();
    if (v == "neon" && neon_table()) return neon_table();
  }
  if (const KernelTable* t = avx2_table()) return t;
  if (const KernelTable* t = neon_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }
Isa active_isa() { return active().isa; }

bool set_isa(Isa isa) {
  const KernelTable* t = table_for(isa);
  if (!t) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double wdot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  assert(w.size() == a.size() && a.size() == b.size());
  return active().wdot(w.data(), a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void gemv(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
          std::span<const double> x, std::span<double> y) {
  assert(x.size() == cols && y.size() == rows);
  active().gemv(A, rows, cols, ld, x.data(), y.data());
}

void gemv_t(const double* A, std::size_t rows, std::size_t cols, std::size_t ld,
            std::span<const double> x, std::span<double> y) {
  assert(x.size() == rows && y.size() == cols);
  active().gemv_t(A, rows, cols, ld, x.data(), y.data());
}

void spmv(const CsrView& A, std::span<const double> x, std::span<double> y) {
  assert(y.size() == A.rows);
  active().spmv(A, x.data(), y.data());
}

}  // namespace spectramax::kernels
