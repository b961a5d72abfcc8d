#pragma once
// Discrete Moser-Trudinger functional
//   J(u) = (1/4pi) u.S u + 2 sum_v w_v u_v - log sum_v w_v e^{2 u_v},
// with w_v = e^{2 v_v} area_v normalized to unit sum, and its minimization.

#include <cstdint>
#include <vector>

#include "spectramax/eig.hpp"

namespace spectramax {

/// Stiffness and normalized weights for one background e^{2v} g.
struct MTProblem {
  StiffnessForm S;
  Vec w;
  Vec v;
};

/// Throws DimensionMismatch. An empty v means v = 0.
MTProblem make_mt_problem(const TriMesh& m, const Vec& v = Vec());

/// Log-sum-exp is evaluated with max subtraction.
double mt_value(const MTProblem& p, const Vec& u);
/// Derivative of J: (1/2pi) S u + 2 w - 2 w e^{2u} / Z.
Vec mt_gradient(const MTProblem& p, const Vec& u);
/// Euler-Lagrange residual (S u)/w + 4pi - 4pi e^{2u}/Z, i.e. the gradient
/// rescaled by 2pi / w; vanishes at critical points.
Vec mt_residual(const MTProblem& p, const Vec& u);
/// sqrt(sum_v w_v F_v^2) for the residual F.
double mt_residual_norm(const MTProblem& p, const Vec& u);

double mt_value(const TriMesh& m, const Vec& u, const Vec& v = Vec());
Vec mt_gradient(const TriMesh& m, const Vec& u, const Vec& v = Vec());

/// Shifts u so that sum_v w_v e^{2 u_v} = 1.
Vec mt_normalize(const MTProblem& p, Vec u);

struct MTOptions {
  double tol = 1e-6;
  int max_iterations = 2000;
  double armijo = 1e-4;
  double descent_slack = 1e-12;  // relative tolerance on J increases
  int memory = 8;                // quasi-Newton pairs
  int threads = 0;               // perturb_search workers, 0 = hardware
};

struct MTState {
  Vec u;
  Vec v;
  double J = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> J_history;
  bool rigidity_applicable = true;  // false on spheres
};

/// Descent preconditioned by S/2pi + 4 diag w, with limited-memory
/// quasi-Newton updates and Armijo backtracking. Throws FlowNoConvergence.
MTState mt_flow(const TriMesh& m, const Vec& v, const Vec& u0, const MTOptions& opts = {});

struct SecondVariation {
  double lambda1_times_vol = 0.0;
  double margin = 0.0;  // lambda1 * Vol - 8 pi
  bool pass = false;
  bool eight_pi_excluded = true;  // 8 pi outside the spectrum of e^{2v} g, window 1e-3
  double nearest_to_eight_pi = 0.0;
};

/// lambda_1 of e^{2(u+v)} g at unit volume; pass when >= 8 pi (1 - tol).
SecondVariation second_variation_check(const MTState& s, const TriMesh& m, double tol = 0.01);

struct PerturbResult {
  Vec best_v;
  double best_margin = 0.0;
  std::vector<double> margins;
};

/// Trial 0 uses v = 0, the others random low-frequency v with sup-norm
/// radius; mt_flow and the second variation check for each; largest margin
/// wins. Trials run on
/// opts.threads workers; results depend only on the seed.
PerturbResult perturb_search(const TriMesh& m, int trials, double radius, std::uint64_t seed,
                             const MTOptions& opts = {});

/// Seeded low-frequency field (combination of the lowest background modes)
/// with sup-norm equal to amplitude.
Vec low_mode_field(const TriMesh& m, double amplitude, std::uint64_t seed, int modes = 8);

}  // namespace spectramax
