#pragma once
// Linear finite elements: cotangent stiffness and lumped density-weighted mass.

#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "spectramax/kernels.hpp"
#include "spectramax/mesh.hpp"

namespace spectramax {

using Vec = Eigen::VectorXd;
using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// Per-vertex density e^{2u} against the background area element.
struct ConformalDensity {
  std::vector<double> rho;
  double total_volume = 0.0;  // sum rho_v * area_v

  /// Constant density rho_v = value.
  static ConformalDensity constant(const TriMesh& m, double value);
  /// Takes rho as is and caches its volume. Throws DimensionMismatch, ZeroNorm
  /// (non-positive entries).
  static ConformalDensity from_values(const TriMesh& m, std::vector<double> rho);
  /// Rescaled copy with unit total volume.
  ConformalDensity normalized() const;
};

/// Symmetric cotangent stiffness; row sums vanish.
struct StiffnessForm {
  SparseMat matrix;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
  kernels::CsrView csr() const;
  /// y = S x through the active SIMD kernel.
  void apply(std::span<const double> x, std::span<double> y) const;
  double energy(std::span<const double> f) const;
};

/// Lumped diagonal mass rho_v * area_v.
struct MassForm {
  std::vector<double> weights;

  double trace() const;
  double inner(std::span<const double> f, std::span<const double> g) const;
};

StiffnessForm stiffness(const TriMesh& m);
/// Throws DimensionMismatch.
MassForm mass(const TriMesh& m, const ConformalDensity& d);
/// (S f . f) / (M f . f). Throws ZeroNorm, DimensionMismatch.
double rayleigh(const StiffnessForm& S, const MassForm& M, std::span<const double> f);

inline std::span<const double> span_of(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
inline std::span<double> span_of(Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace spectramax
