#pragma once
// Discrete heat semigroup K_eps = exp(-eps L), L = M0^{-1} S, on the
// background (rho = 1) metric.

#include <memory>

#include "spectramax/eig.hpp"

namespace spectramax {

/// Probability weights on vertices.
struct VertexMeasure {
  std::vector<double> nu;

  /// nu_v proportional to vertex area.
  static VertexMeasure uniform(const TriMesh& m);
  static VertexMeasure dirac(const TriMesh& m, int v);
  /// Clips negatives to zero and rescales to unit sum. Throws ZeroNorm.
  static VertexMeasure from_weights(std::vector<double> w);
};

/// Eigen-decomposition of the background pencil, shared across epsilons.
/// phi columns are M0-orthonormal; lambda ascending.
struct BackgroundSpectrum {
  Vec lambda;
  Mat phi;
  Vec mass;  // background lumped mass (vertex areas)
};

/// Full dense decomposition through LAPACK (dsyevd on M0^{-1/2} S M0^{-1/2}).
std::shared_ptr<const BackgroundSpectrum> dense_background_spectrum(const TriMesh& m);
/// Lowest `modes` eigenpairs from the sparse solver.
std::shared_ptr<const BackgroundSpectrum> truncated_background_spectrum(const TriMesh& m, int modes,
                                                                        double tol = 1e-10);

enum class HeatBackend { spectral, implicit_euler };

class HeatOperator {
 public:
  HeatOperator() = default;
  /// Spectral backend over a precomputed background spectrum.
  HeatOperator(const TriMesh& m, double epsilon, std::shared_ptr<const BackgroundSpectrum> spectrum);
  /// Implicit-Euler backend with `substeps` backward steps of size eps/substeps.
  HeatOperator(const TriMesh& m, double epsilon, int substeps);

  /// Same backend and spectrum, new time parameter.
  HeatOperator with_epsilon(double epsilon) const;

  double epsilon() const { return epsilon_; }
  HeatBackend backend() const { return backend_; }
  int substeps() const { return substeps_; }
  const std::shared_ptr<const BackgroundSpectrum>& spectrum() const { return spectrum_; }
  const std::vector<double>& background_mass() const { return mass_; }

  Vec apply(const Vec& f) const;
  /// Column-wise application.
  Mat apply(const Mat& F) const;

 private:
  struct Factor;
  double epsilon_ = 0.0;
  HeatBackend backend_ = HeatBackend::spectral;
  int substeps_ = 0;
  std::vector<double> mass_;
  std::shared_ptr<const BackgroundSpectrum> spectrum_;
  std::shared_ptr<const Factor> factor_;
};

inline Vec heat_apply(const HeatOperator& K, const Vec& f) { return K.apply(f); }

/// Floor applied to smoothed densities, relative to their mean.
inline constexpr double kDensityFloor = 1e-12;

/// rho = K[nu / area], unit total volume. Entries below -1e-8 * max raise
/// PositivityBreach; small negatives are clamped to the floor.
ConformalDensity heat_of_measure(const HeatOperator& K, const TriMesh& m, const VertexMeasure& nu);

/// (1 / (4 pi eps)) exp(-d^2 / (4 eps)).
double gaussian_reference(double d, double epsilon);

/// h^2 with h the mean edge length.
double epsilon_min(const TriMesh& m);

}  // namespace spectramax
