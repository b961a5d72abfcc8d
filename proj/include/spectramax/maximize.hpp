#pragma once
// Heat-regularized maximization of lambda_1 over vertex probability measures.

#include <cstdint>
#include <vector>

#include "spectramax/heat.hpp"

namespace spectramax {

struct OptOptions {
  double slack_tol = 1e-3;
  int max_iterations = 200;
  int support_size = 16;      // q: vertices carrying the ascent measure
  int max_halvings = 30;
  double armijo = 1e-4;       // fraction of the predicted increase required
  double active_rtol = 2e-3;  // eigenvalues this close to lambda_1 share the ascent
  int multiplicity_cap = kDefaultMultiplicityCap;
  int eigenpairs = 10;
  double eig_tol = 1e-9;
  std::uint64_t seed = 0x5eed;
  /// Meshes above this size use the implicit-Euler heat backend.
  std::size_t dense_heat_limit = 6000;
  int implicit_substeps = 64;
  /// Spread ascent measure at multiple eigenvalues: mirror descent on a
  /// soft-max of lambda_max(sum_x mu_x G(x)).
  int spread_iterations = 300;
  double spread_sharpness = 200.0;
  double spread_rate = 2.0;
};

struct OptRecord {
  int iteration;
  double lambda;
  double step;
  double slack;  // stationarity gap before the step
};

/// State of one run at a fixed epsilon. Holds a pointer to the mesh, which
/// must outlive it.
struct OptState {
  const TriMesh* mesh = nullptr;
  StiffnessForm S;
  HeatOperator K;
  VertexMeasure nu;
  ConformalDensity rho;
  SpectralData spectrum;
  EigenspaceFrame frame;
  double lambda = 0.0;
  std::vector<OptRecord> history;

  double epsilon() const { return K.epsilon(); }
};

/// Builds a coherent state: rho = K[nu], spectrum of (S, M_rho), active cluster.
OptState make_state(const TriMesh& m, const HeatOperator& K, VertexMeasure nu, const OptOptions& opts);

/// G(x)_{ij} = K[phi_i phi_j](x) for all vertices, packed upper triangle
/// per row (k(k+1)/2 columns, i <= j, row-major order over (i, j)).
Mat gram_fields(const OptState& s);

/// s(x) = 1 - lambda_max(G(x)) for every vertex.
Vec directional_scores(const OptState& s);
double directional_score(const OptState& s, int x);

/// One Frank-Wolfe step toward the top-scoring vertices, or toward a spread
/// measure when the first eigenvalue is multiple and no single vertex
/// ascends. Throws StallDetected.
OptState ascent_step(const OptState& s, double stepsize, const OptOptions& opts);

/// max(max_x s(x), 1 - min over probability measures mu of
/// lambda_max(sum_x mu_x G(x))), the latter estimated. Zero at a stationary point.
double stationarity_gap(const OptState& s, const OptOptions& opts);

/// Ascent to stationarity_gap <= slack_tol or the iteration cap. Throws EpsilonTooSmall.
OptState maximize_at_epsilon(const TriMesh& m, const HeatOperator& K, const VertexMeasure& init,
                             const OptOptions& opts);

struct CertificateSummary {
  bool certified = false;
  int k = 0;
  double max_violation = 0.0;
  double support_equality = 0.0;
  double epsilon = 0.0;
};

struct OptReport {
  double Lambda1_estimate = 0.0;  // lambda_1 * Vol with Vol = 1
  std::vector<double> schedule;    // epsilons actually run
  std::vector<double> skipped;     // schedule entries below epsilon_min
  std::vector<double> lambda_per_epsilon;
  std::vector<int> iterations_per_epsilon;
  CertificateSummary certificate;
  bool yang_yau_ok = true;
  int genus = 0;
  OptState final_state;
};

/// Warm-started continuation over a decreasing schedule, certificate at the
/// final epsilon. Entries below epsilon_min(m) are skipped.
OptReport optimize_conformal(const TriMesh& m, const std::vector<double>& schedule,
                             const OptOptions& opts, double certificate_tol = 5e-3);

/// Heat operator with the backend picked by mesh size.
HeatOperator make_heat_operator(const TriMesh& m, double epsilon, const OptOptions& opts);

}  // namespace spectramax
