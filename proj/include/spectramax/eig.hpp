#pragma once
// Lowest eigenpairs of the pencil (S, M) and first-eigenvalue cluster detection.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "spectramax/fem.hpp"

namespace spectramax {

using Mat = Eigen::MatrixXd;

/// lambda_0 <= ... <= lambda_m with M-orthonormal eigenvectors (columns).
/// Column 0 is the exact constant mode with lambda_0 = 0.
struct SpectralData {
  Vec eigenvalues;
  Mat eigenvectors;
  Vec residuals;  // ||S phi - lambda M phi|| / ||S phi||, 0 for the constant mode
  int iterations = 0;
};

struct EigOptions {
  std::uint64_t seed = 0x5eed;
  int max_iterations = 500;
  /// Optional initial block (columns need not be orthonormal). Missing
  /// columns are filled with seeded random vectors.
  const Mat* warm_start = nullptr;
};

/// Shift-invert block subspace iteration with Rayleigh-Ritz in the M inner
/// product. The constant mode is deflated exactly. Throws NoConvergence,
/// DimensionMismatch.
SpectralData solve_spectrum(const StiffnessForm& S, const MassForm& M, int m, double tol,
                            const EigOptions& opts = {});

struct EigenspaceFrame {
  int k = 0;
  Mat phi;  // V x k, M-orthonormal
  double lambda = 0.0;  // cluster mean
};

inline constexpr double kDefaultClusterRtol = 1e-5;
inline constexpr int kDefaultMultiplicityCap = 8;

/// Cluster {lambda_i : |lambda_i - lambda_1| <= rtol * lambda_1}. Throws
/// AmbiguousCluster when the next eigenvalue is closer than 2 * rtol
/// (relative), when no computed eigenvalue lies above the cluster, or when
/// the cluster exceeds the multiplicity cap.
EigenspaceFrame first_eigenspace(const SpectralData& sd, double cluster_rtol = kDefaultClusterRtol,
                                 int multiplicity_cap = kDefaultMultiplicityCap);

/// Lenient variant used inside the optimizer: every eigenvalue within
/// rtol * lambda_1 of lambda_1 joins, capped, with no gap requirement.
EigenspaceFrame leading_cluster(const SpectralData& sd, double rtol, int multiplicity_cap);

}  // namespace spectramax
