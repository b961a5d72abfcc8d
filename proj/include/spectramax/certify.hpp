#pragma once
// Optimality certificates and concentration diagnostics for optimizer states.

#include <vector>

#include "spectramax/maximize.hpp"

namespace spectramax {

struct ELCertificate {
  Mat Q;                        // k x k, PSD, unit trace
  std::vector<double> slack;    // F_Q(x) - 1 per vertex
  std::vector<int> support;     // vertices with nu above the support threshold
  double max_violation = 0.0;   // max(0, 1 - min_x F_Q(x))
  double support_equality = 0.0;  // max over support of |F_Q(x) - 1|
  int planes = 0;               // working-set size at exit
  bool certified = false;
};

/// nu_x > kSupportThreshold / V counts as support.
inline constexpr double kSupportThreshold = 1e-6;
inline constexpr int kMaxPlanes = 200;

/// F_Q(x) = sum_ij Q_ij K[phi_i phi_j](x).
Vec certificate_field(const OptState& s, const Mat& Q);

/// Maximizes min_x F_Q(x) over the PSD unit-trace set by cutting planes on
/// violated vertices. Throws CertificateSolveFailure.
ELCertificate el_certificate(const OptState& s, double tol);

CertificateSummary summarize(const ELCertificate& c, const OptState& s);

/// Euclidean projection onto {Q symmetric, Q >= 0, tr Q = 1}.
Mat project_spectraplex(const Mat& Q);

/// Components of {f > 0} plus components of {f < 0}; |f| <= 1e-12 max|f| counts as zero.
int nodal_domains(const TriMesh& m, const Vec& f);

struct ProfileRow {
  double r;
  double value;  // max ball mass or energy
  double fit;    // fitted law at r
};

struct ConcentrationProfile {
  std::vector<ProfileRow> rows;
  double C = 0.0;
  bool flagged = false;
  double total = 0.0;  // value over the whole surface
};

inline constexpr std::size_t kMaxBallCenters = 256;

/// Max Dijkstra-ball mass of rho against C / log(1/r'), r' = r / sqrt(area).
/// Radii must be decreasing.
ConcentrationProfile nonconcentration_profile(const TriMesh& m, const ConformalDensity& rho,
                                              const std::vector<double>& radii);

/// Max ball Dirichlet energy of the frame, weighted 1/k so the total is the
/// cluster eigenvalue, against C / sqrt(log(1/r')).
ConcentrationProfile gradient_nonconcentration(const TriMesh& m, const EigenspaceFrame& frame,
                                               const std::vector<double>& radii);

struct HarmonicMapReport {
  std::vector<double> norm_field;         // |Phi| per vertex
  std::vector<double> energy_density;     // |grad Phi|^2 per face
  std::vector<double> harmonic_residual;  // |Delta Phi - |grad Phi|^2 Phi| per vertex
  std::vector<int> conical_candidates;
  double measure_match = 0.0;
  double max_norm_deviation = 0.0;
};

/// Phi = Q^{1/2} phi from a certified state. Throws NotCertified.
HarmonicMapReport harmonic_map_report(const OptState& s, const ELCertificate& c);
/// Runs el_certificate(s, tol) first.
HarmonicMapReport harmonic_map_report(const OptState& s, double tol);

}  // namespace spectramax
