#pragma once
// Collar cylinders of short hyperbolic geodesics, piecewise-linear cutoff
// test functions, Moebius balancing on S^2 and the degeneration bound.

#include <Eigen/Core>
#include <array>
#include <vector>

namespace spectramax {

/// Half-length mu(l) = (pi / l)(pi - 2 arctan(sinh(l / 2))).
double collar_mu(double l);

/// (-mu, mu) x [0, 2 pi) with metric factor (l / (2 pi cos(l t / 2 pi)))^2.
struct CollarCylinder {
  double l = 0.0;
  double mu = 0.0;
  int n_t = 8192;
  int n_theta = 64;
};

/// Throws OutOfDomain for l <= 0 or non-positive grid sizes.
CollarCylinder make_collar(double l, int n_t = 8192, int n_theta = 64);

/// Throws OutOfDomain for |t| >= mu.
double cylinder_conformal_factor(const CollarCylinder& c, double t);

enum class TestKind { psi, phi_l, phi_r, theta_l, theta_r, phi_double, phi_inset };

/// Piecewise-linear function of t on the cylinder. `a` is the ramp width
/// (b for phi_inset). phi_double is phi_l + phi_r.
struct TestFunctionFamily {
  TestKind kind;
  double a;
  CollarCylinder cylinder;
};

/// Throws DomainViolation when the ramps do not fit in (-mu, mu).
void check_domain(const TestFunctionFamily& f);
double test_value(const TestFunctionFamily& f, double t);
/// Closed-form Dirichlet energy in the flat (t, theta) coordinates:
/// 2 pi / a per ramp. Throws DomainViolation.
double test_energy(const TestFunctionFamily& f);
/// Number of ramps of the function.
int ramp_count(TestKind kind);

using Point3 = Eigen::Vector3d;

/// Conformal cylinder-to-sphere map (1 / (1 + e^{2t}))(2e^t cos, 2e^t sin, e^{2t} - 1).
Point3 stereo_map(double t, double theta);

/// x -> ((1 - |c|^2) x + 2 (1 + c.x) c) / (1 + 2 c.x + |c|^2), |c| < 1,
/// followed by a rotation. Pushes mass toward c / |c|.
struct MobiusTransform {
  Point3 center = Point3::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  Point3 apply(const Point3& x) const;
};

struct BalanceOptions {
  double damping = 0.5;  // backtracking factor
  int max_iterations = 500;
  double tol = 1e-10;
};

/// Center c with |sum_i w_i T_c(p_i)| <= tol via damped Newton with a
/// finite-difference Jacobian. Throws DegenerateMass (a point carries >= 1/2
/// of the weight, or weights are invalid), BalanceNoConvergence.
MobiusTransform hersch_balance(const std::vector<Point3>& points, const std::vector<double>& weights,
                               const BalanceOptions& opts = {});

/// Per-cell volume probabilities on the (n_t x n_theta) grid, row-major in t.
struct MassProfile {
  int n_t = 0;
  int n_theta = 0;
  std::vector<double> p;
};

/// Uniform in (t, theta) on |t| <= mu - a, zero outside.
MassProfile uniform_inner_profile(const CollarCylinder& c, double a);

struct DegenerationBreakdown {
  double bound = 0.0;       // sum_i E_i / sum_i L_i
  double excess = 0.0;      // bound - 8 pi
  double C = 0.0;           // excess * a
  std::array<double, 3> energy{};
  std::array<double, 3> l2{};
  int coordinate = 0;       // coordinate with largest L^2 mass
  double coordinate_ratio = 0.0;  // energy / l2 for that coordinate
  double outside_mass = 0.0;      // profile mass where the cutoff is below 1
  double balance_center_norm = 0.0;
  double balance_residual = 0.0;
};

/// Rayleigh bound from the Hersch-balanced coordinate test functions
/// eta * (x_i o T o Phi), where eta ramps from 0 at |t| = mu to 1 at
/// |t| = mu - a. Requires 0 < a < mu. Throws DomainViolation, DegenerateMass.
DegenerationBreakdown degeneration_breakdown(const CollarCylinder& c, double a, const MassProfile& mass);
double degeneration_bound(double l, double a, const MassProfile& mass);

/// (4 pi / b, 2 pi m / b). Requires 3b < mu(l), m >= 1 and, when genus >= 2
/// is given, m <= 2 (3 genus - 3). Throws DomainViolation.
std::pair<double, double> dichotomy_energies(double l, double b, int m, int genus = -1);

}  // namespace spectramax
