#include "spectramax/hyperbolic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spectramax/error.hpp"

namespace spectramax {

using std::numbers::pi;

double collar_mu(double l) {
  if (!(l > 0.0)) throw OutOfDomain("geodesic length must be positive");
  return (pi / l) * (pi - 2.0 * std::atan(std::sinh(0.5 * l)));
}

CollarCylinder make_collar(double l, int n_t, int n_theta) {
  if (n_t < 2 || n_theta < 3) throw OutOfDomain("cylinder grid too coarse");
  return {l, collar_mu(l), n_t, n_theta};
}

double cylinder_conformal_factor(const CollarCylinder& c, double t) {
  if (!(std::abs(t) < c.mu)) throw OutOfDomain("t = " + std::to_string(t) + " outside (-mu, mu)");
  const double s = c.l / (2.0 * pi * std::cos(c.l * t / (2.0 * pi)));
  return s * s;
}

int ramp_count(TestKind kind) {
  switch (kind) {
    case TestKind::phi_l:
    case TestKind::phi_r: return 1;
    default: return 2;
  }
}

void check_domain(const TestFunctionFamily& f) {
  const double a = f.a, mu = f.cylinder.mu;
  if (!(a > 0.0)) throw DomainViolation("ramp width must be positive");
  double need = 0.0;  // ramps occupy (-mu, -mu + need] and symmetric counterparts
  switch (f.kind) {
    case TestKind::phi_l:
    case TestKind::phi_r: need = 2.0 * a; break;
    case TestKind::psi:
    case TestKind::phi_double: need = 2.0 * a; break;
    case TestKind::theta_l:
    case TestKind::theta_r: need = 4.0 * a; break;
    case TestKind::phi_inset: need = 3.0 * a; break;
  }
  const bool two_sided = f.kind == TestKind::psi || f.kind == TestKind::phi_double ||
                         f.kind == TestKind::phi_inset;
  const double room = two_sided ? mu : 2.0 * mu;
  if (!(need < room))
    throw DomainViolation("ramps of width " + std::to_string(a) + " do not fit in a cylinder of half-length " +
                          std::to_string(mu));
}

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double theta_l(double t, double mu, double a) {
  const double s = t + mu;
  if (s <= a) return clamp01(s / a);
  if (s <= 3.0 * a) return 1.0;
  return clamp01((4.0 * a - s) / a);
}

double phi_l(double t, double mu, double a) { return clamp01((2.0 * a - mu - t) / a); }

}  // namespace

double test_value(const TestFunctionFamily& f, double t) {
  const double a = f.a, mu = f.cylinder.mu;
  switch (f.kind) {
    case TestKind::psi: return std::min(clamp01((t + mu - a) / a), clamp01((mu - a - t) / a));
    case TestKind::phi_l: return phi_l(t, mu, a);
    case TestKind::phi_r: return phi_l(-t, mu, a);
    case TestKind::phi_double: return phi_l(t, mu, a) + phi_l(-t, mu, a);
    case TestKind::theta_l: return theta_l(t, mu, a);
    case TestKind::theta_r: return theta_l(-t, mu, a);
    case TestKind::phi_inset:
      return std::min(clamp01((mu - 2.0 * a + t) / a), clamp01((mu - 2.0 * a - t) / a));
  }
  return 0.0;
}

double test_energy(const TestFunctionFamily& f) {
  check_domain(f);
  return ramp_count(f.kind) * 2.0 * pi / f.a;
}

Point3 stereo_map(double t, double theta) {
  // Written with sech / tanh to stay finite for large |t|.
  const double s = 1.0 / std::cosh(t);
  return {s * std::cos(theta), s * std::sin(theta), std::tanh(t)};
}

Point3 MobiusTransform::apply(const Point3& x) const {
  const double c2 = center.squaredNorm(), cx = center.dot(x);
  const Point3 y = ((1.0 - c2) * x + 2.0 * (1.0 + cx) * center) / (1.0 + 2.0 * cx + c2);
  return rotation * y;
}

namespace {

Point3 mass_center(const std::vector<Point3>& p, const std::vector<double>& w, const Point3& c) {
  MobiusTransform T;
  T.center = c;
  Point3 s = Point3::Zero();
  for (std::size_t i = 0; i < p.size(); ++i)
    if (w[i] != 0.0) s += w[i] * T.apply(p[i]);
  return s;
}

}  // namespace

MobiusTransform hersch_balance(const std::vector<Point3>& points, const std::vector<double>& weights,
                               const BalanceOptions& opts) {
  if (points.size() != weights.size() || points.empty()) throw DegenerateMass("points and weights differ in size");
  double total = 0.0, top = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DegenerateMass("weights must be nonnegative and finite");
    total += w;
    top = std::max(top, w);
  }
  if (!(total > 0.0)) throw DegenerateMass("weights have zero total");
  if (top >= 0.5 * total) throw DegenerateMass("a single point carries at least half of the mass");
  std::vector<double> w(weights);
  for (double& x : w) x /= total;

  Point3 c = Point3::Zero();
  Point3 F = mass_center(points, w, c);
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (F.norm() <= opts.tol) {
      MobiusTransform T;
      T.center = c;
      return T;
    }
    Eigen::Matrix3d J;
    const double h = 1e-7;
    for (int j = 0; j < 3; ++j) {
      Point3 e = Point3::Zero();
      e(j) = h;
      J.col(j) = (mass_center(points, w, c + e) - mass_center(points, w, c - e)) / (2.0 * h);
    }
    const Point3 step = -J.fullPivLu().solve(F);
    double s = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, s *= opts.damping) {
      const Point3 cn = c + s * step;
      if (cn.norm() >= 1.0 || !step.allFinite()) continue;
      const Point3 Fn = mass_center(points, w, cn);
      if (Fn.norm() < F.norm()) {
        c = cn;
        F = Fn;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (F.norm() <= opts.tol) {
    MobiusTransform T;
    T.center = c;
    return T;
  }
  throw BalanceNoConvergence("balancing residual " + std::to_string(F.norm()) + " above tolerance");
}

MassProfile uniform_inner_profile(const CollarCylinder& c, double a) {
  MassProfile m{c.n_t, c.n_theta, std::vector<double>(static_cast<std::size_t>(c.n_t) * c.n_theta, 0.0)};
  const double dt = 2.0 * c.mu / c.n_t;
  double total = 0.0;
  for (int j = 0; j < c.n_t; ++j) {
    const double t = -c.mu + (j + 0.5) * dt;
    if (std::abs(t) > c.mu - a) continue;
    for (int k = 0; k < c.n_theta; ++k) m.p[static_cast<std::size_t>(j) * c.n_theta + k] = 1.0;
    total += c.n_theta;
  }
  if (!(total > 0.0)) throw DomainViolation("inner region contains no grid cells");
  for (double& x : m.p) x /= total;
  return m;
}

DegenerationBreakdown degeneration_breakdown(const CollarCylinder& c, double a, const MassProfile& mass) {
  // The cutoff ramp has to fit in each half of the cylinder.
  if (!(a > 0.0 && a < c.mu))
    throw DomainViolation("cutoff width " + std::to_string(a) + " must lie in (0, mu = " + std::to_string(c.mu) + ")");
  if (mass.n_t != c.n_t || mass.n_theta != c.n_theta ||
      mass.p.size() != static_cast<std::size_t>(c.n_t) * c.n_theta)
    throw DomainViolation("mass profile grid does not match the cylinder grid");
  double total = 0.0;
  for (double x : mass.p) {
    if (!(x >= 0.0)) throw DegenerateMass("mass profile has negative entries");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DegenerateMass("mass profile must sum to 1");

  const int nt = c.n_t, nq = c.n_theta;
  const double dt = 2.0 * c.mu / nt, dq = 2.0 * pi / nq;
  auto eta = [&](double t) { return clamp01((c.mu - std::abs(t)) / a); };

  std::vector<Point3> pts;
  std::vector<double> w;
  pts.reserve(mass.p.size());
  w.reserve(mass.p.size());
  DegenerationBreakdown r;
  for (int j = 0; j < nt; ++j) {
    const double t = -c.mu + (j + 0.5) * dt;
    const double e = eta(t);
    for (int k = 0; k < nq; ++k) {
      const double p = mass.p[static_cast<std::size_t>(j) * nq + k];
      if (e < 1.0) r.outside_mass += p;
      pts.push_back(stereo_map(t, (k + 0.5) * dq));
      w.push_back(e * p);
    }
  }
  const MobiusTransform T = hersch_balance(pts, w);
  r.balance_center_norm = T.center.norm();
  double wsum = 0.0;
  for (double x : w) wsum += x;
  r.balance_residual = mass_center(pts, w, T.center).norm() / wsum;

  // L^2 masses at cell centres.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = eta(-c.mu + (static_cast<double>(i / nq) + 0.5) * dt);
    const Point3 y = T.apply(pts[i]);
    for (int d = 0; d < 3; ++d) r.l2[d] += mass.p[i] * e * e * y(d) * y(d);
  }

  // Dirichlet energy of eta * (x_d o T o Phi) on the node grid; eta vanishes at |t| = mu.
  const int nn = nt + 1;
  std::vector<Point3> u(static_cast<std::size_t>(nn) * nq);
  for (int j = 0; j < nn; ++j) {
    const double t = -c.mu + j * dt;
    const double e = (j == 0 || j == nt) ? 0.0 : eta(t);
    for (int k = 0; k < nq; ++k) u[static_cast<std::size_t>(j) * nq + k] = e * T.apply(stereo_map(t, k * dq));
  }
  for (int j = 0; j < nn; ++j)
    for (int k = 0; k < nq; ++k) {
      const Point3& here = u[static_cast<std::size_t>(j) * nq + k];
      const Point3& next_q = u[static_cast<std::size_t>(j) * nq + (k + 1) % nq];
      // theta links carry half weight on the two boundary rows (trapezoid in t).
      const double wq = (j == 0 || j == nt) ? 0.5 : 1.0;
      for (int d = 0; d < 3; ++d) r.energy[d] += wq * (next_q(d) - here(d)) * (next_q(d) - here(d)) * dt / dq;
      if (j + 1 < nn) {
        const Point3& next_t = u[static_cast<std::size_t>(j + 1) * nq + k];
        for (int d = 0; d < 3; ++d) r.energy[d] += (next_t(d) - here(d)) * (next_t(d) - here(d)) * dq / dt;
      }
    }

  const double E = r.energy[0] + r.energy[1] + r.energy[2];
  const double L = r.l2[0] + r.l2[1] + r.l2[2];
  if (!(L > 0.0)) throw DegenerateMass("cutoff test functions have zero L2 mass");
  r.bound = E / L;
  r.excess = r.bound - 8.0 * pi;
  r.C = r.excess * a;
  r.coordinate = static_cast<int>(std::max_element(r.l2.begin(), r.l2.end()) - r.l2.begin());
  r.coordinate_ratio = r.energy[r.coordinate] / r.l2[r.coordinate];
  return r;
}

double degeneration_bound(double l, double a, const MassProfile& mass) {
  return degeneration_breakdown(make_collar(l, mass.n_t, mass.n_theta), a, mass).bound;
}

std::pair<double, double> dichotomy_energies(double l, double b, int m, int genus) {
  const double mu = collar_mu(l);
  if (!(b > 0.0 && 3.0 * b < mu)) throw DomainViolation("need 0 < 3b < mu(l)");
  if (m < 1) throw DomainViolation("component boundary count must be at least 1");
  if (genus >= 2 && m > 2 * (3 * genus - 3))
    throw DomainViolation("boundary count exceeds 2(3 genus - 3)");
  return {4.0 * pi / b, 2.0 * pi * m / b};
}

}  // namespace spectramax
