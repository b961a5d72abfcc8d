#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "spectramax/kernels.hpp"
#include "support.hpp"

using namespace spectramax::kernels;

namespace {

std::vector<const KernelTable*> simd_tables() {
  std::vector<const KernelTable*> out;
  if (auto* t = avx2_table()) out.push_back(t);
  if (auto* t = neon_table()) out.push_back(t);
  return out;
}

std::vector<double> rnd(std::size_t n, std::uint64_t seed) {
  auto v = testing::random_vec(n, seed);
  return {v.data(), v.data() + v.size()};
}

double abs_sum(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]);
  return s;
}

// Random CSR with a few entries per row, including empty rows.
struct Csr {
  std::vector<std::int32_t> ptr{0}, idx;
  std::vector<double> val;
  CsrView view(std::size_t rows) const { return {rows, ptr.data(), idx.data(), val.data()}; }
};

Csr random_csr(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Csr c;
  for (std::size_t r = 0; r < rows; ++r) {
    const int nnz = static_cast<int>(rng() % 13);
    for (int k = 0; k < nnz; ++k) {
      c.idx.push_back(static_cast<std::int32_t>(rng() % rows));
      c.val.push_back(std::uniform_real_distribution<double>(-1, 1)(rng));
    }
    c.ptr.push_back(static_cast<std::int32_t>(c.idx.size()));
  }
  return c;
}

}  // namespace

TEST_CASE("scalar table is always available and selectable") {
  CHECK(scalar_table().isa == Isa::scalar);
  CHECK(set_isa(Isa::scalar));
  CHECK(active_isa() == Isa::scalar);
  CHECK(isa_name(Isa::scalar) == "scalar");
}

TEST_CASE("SIMD variants agree with the scalar reference") {
  const auto& ref = scalar_table();
  const auto tables = simd_tables();
  if (tables.empty()) MESSAGE("no SIMD variant on this machine; equivalence checks skipped");
  for (const KernelTable* t : tables) {
    CAPTURE(isa_name(t->isa));
    for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 16, 17, 31, 64, 100, 1023}) {
      CAPTURE(n);
      const auto a = rnd(n, 1 + n), b = rnd(n, 2 + n), w = rnd(n, 3 + n);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
            1e-14 * (1.0 + abs_sum(a, b)));
      std::vector<double> wa(n);
      for (std::size_t i = 0; i < n; ++i) wa[i] = w[i] * a[i];
      CHECK(std::abs(t->wdot(w.data(), a.data(), b.data(), n) - ref.wdot(w.data(), a.data(), b.data(), n)) <=
            1e-14 * (1.0 + abs_sum(wa, b)));

      auto y1 = b, y2 = b;
      t->axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1.0 + std::abs(y2[i])));
    }
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {5, 3}, {9, 17}, {33, 8}, {64, 64}}) {
      CAPTURE(rows);
      CAPTURE(cols);
      const std::size_t ld = cols + 3;
      const auto A = rnd(rows * ld, 7 * rows + cols);
      const auto x = rnd(cols, 11), xt = rnd(rows, 12);
      std::vector<double> y1(rows), y2(rows), z1(cols), z2(cols);
      t->gemv(A.data(), rows, cols, ld, x.data(), y1.data());
      ref.gemv(A.data(), rows, cols, ld, x.data(), y2.data());
      for (std::size_t i = 0; i < rows; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-13);
      t->gemv_t(A.data(), rows, cols, ld, xt.data(), z1.data());
      ref.gemv_t(A.data(), rows, cols, ld, xt.data(), z2.data());
      for (std::size_t i = 0; i < cols; ++i) CHECK(std::abs(z1[i] - z2[i]) <= 1e-13);
    }
    for (std::size_t rows : {1, 10, 257}) {
      const Csr c = random_csr(rows, rows);
      const auto x = rnd(rows, 99);
      std::vector<double> y1(rows), y2(rows);
      t->spmv(c.view(rows), x.data(), y1.data());
      ref.spmv(c.view(rows), x.data(), y2.data());
      for (std::size_t i = 0; i < rows; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-13);
    }
  }
}

TEST_CASE("scalar kernels match naive loops") {
  const std::size_t n = 37;
  const auto a = rnd(n, 5), b = rnd(n, 6);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) d += a[i] * b[i];
  CHECK(scalar_table().dot(a.data(), b.data(), n) == doctest::Approx(d).epsilon(1e-14));

  const Csr c = random_csr(20, 3);
  const auto x = rnd(20, 4);
  std::vector<double> y(20);
  scalar_table().spmv(c.view(20), x.data(), y.data());
  for (std::size_t r = 0; r < 20; ++r) {
    double s = 0.0;
    for (auto k = c.ptr[r]; k < c.ptr[r + 1]; ++k) s += c.val[k] * x[c.idx[k]];
    CHECK(y[r] == doctest::Approx(s).epsilon(1e-14));
  }
}

TEST_CASE("wrappers dispatch to the active table") {
  const auto a = rnd(50, 8), b = rnd(50, 9);
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (!set_isa(isa)) continue;
    CHECK(dot(a, b) == doctest::Approx(scalar_table().dot(a.data(), b.data(), 50)).epsilon(1e-13));
  }
  set_isa(Isa::scalar);
}
