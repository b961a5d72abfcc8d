#include "spectramax/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spectramax/error.hpp"

namespace spectramax {

namespace {

// Packed upper-triangle fields -> per-vertex dense k x k, flattened column-major.
Mat expand_fields(const Mat& packed, int k) {
  Mat out(packed.rows(), k * k);
  int c = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j, ++c) {
      out.col(i + j * k) = packed.col(c);
      out.col(j + i * k) = packed.col(c);
    }
  return out;
}

Vec flat(const Mat& Q) { return Eigen::Map<const Vec>(Q.data(), Q.size()); }

std::vector<double> simplex_projection(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
  return v;
}

// Accelerated projected ascent on a softmin of <G_x, Q> over the rows of G.
Mat solve_working_set(const Mat& G, int k, const Mat& Q0) {
  const double gmax = G.rowwise().norm().maxCoeff();
  Mat best = Q0;
  double best_val = (G * flat(Q0)).minCoeff();
  Mat Q = Q0, Y = Q0;
  for (double tau : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5}) {
    const double step = tau / std::max(gmax * gmax, 1e-300);
    double theta = 1.0;
    Y = Q = best;
    for (int it = 0; it < 400; ++it) {
      const Vec F = G * flat(Y);
      const double fmin = F.minCoeff();
      Vec p = (-(F.array() - fmin) / tau).exp();
      p /= p.sum();
      const Vec grad = G.transpose() * p;
      const Mat Qn = project_spectraplex(Y + step * Eigen::Map<const Mat>(grad.data(), k, k));
      const double theta_n = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      Y = Qn + ((theta - 1.0) / theta_n) * (Qn - Q);
      Q = Qn;
      theta = theta_n;
      const double val = (G * flat(Q)).minCoeff();
      if (!std::isfinite(val)) throw CertificateSolveFailure("inner ascent produced a non-finite value");
      if (val > best_val) {
        best_val = val;
        best = Q;
      }
    }
  }
  return best;
}

}  // namespace

Mat project_spectraplex(const Mat& Q) {
  const Mat S = 0.5 * (Q + Q.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  ev = simplex_projection(std::move(ev));
  const Vec d = Eigen::Map<const Vec>(ev.data(), static_cast<Eigen::Index>(ev.size()));
  Mat P = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (P + P.transpose());
}

Vec certificate_field(const OptState& s, const Mat& Q) {
  return expand_fields(gram_fields(s), s.frame.k) * flat(Q);
}

ELCertificate el_certificate(const OptState& s, double tol) {
  const int k = s.frame.k;
  const Mat G = expand_fields(gram_fields(s), k);
  const int n = static_cast<int>(G.rows());

  ELCertificate c;
  for (int v = 0; v < n; ++v)
    if (s.nu.nu[v] > kSupportThreshold / n) c.support.push_back(v);

  Mat Q = Mat::Identity(k, k) / k;
  if (k > 1) {
    std::vector<int> work;
    std::vector<char> in(n, 0);
    auto add_lowest = [&](const Vec& F, double below, std::size_t count) {
      std::vector<int> cand;
      for (int v = 0; v < n; ++v)
        if (!in[v] && F(v) < below) cand.push_back(v);
      const std::size_t m = std::min(count, cand.size());
      std::partial_sort(cand.begin(), cand.begin() + m, cand.end(),
                        [&](int a, int b) { return F(a) < F(b) || (F(a) == F(b) && a < b); });
      for (std::size_t i = 0; i < m; ++i) {
        in[cand[i]] = 1;
        work.push_back(cand[i]);
      }
      return m;
    };
    Vec F = G * flat(Q);
    add_lowest(F, std::numeric_limits<double>::infinity(), 8);
    while (static_cast<int>(work.size()) < kMaxPlanes) {
      Mat Gw(work.size(), k * k);
      for (std::size_t i = 0; i < work.size(); ++i) Gw.row(i) = G.row(work[i]);
      Q = solve_working_set(Gw, k, Q);
      F = G * flat(Q);
      const double tw = (Gw * flat(Q)).minCoeff();
      const std::size_t room = static_cast<std::size_t>(kMaxPlanes) - work.size();
      if (add_lowest(F, tw - 1e-10, std::min<std::size_t>(8, room)) == 0) break;
    }
    c.planes = static_cast<int>(work.size());
  } else {
    c.planes = 1;
  }
  c.Q = Q;

  const Vec F = G * flat(Q);
  if (!F.allFinite()) throw CertificateSolveFailure("certificate field is not finite");
  c.slack.resize(n);
  for (int v = 0; v < n; ++v) c.slack[v] = F(v) - 1.0;
  c.max_violation = std::max(0.0, 1.0 - F.minCoeff());
  for (int v : c.support) c.support_equality = std::max(c.support_equality, std::abs(F(v) - 1.0));
  c.certified = c.max_violation <= tol && c.support_equality <= tol;
  return c;
}

CertificateSummary summarize(const ELCertificate& c, const OptState& s) {
  return {c.certified, s.frame.k, c.max_violation, c.support_equality, s.epsilon()};
}

int nodal_domains(const TriMesh& m, const Vec& f) {
  const double thr = 1e-12 * f.cwiseAbs().maxCoeff();
  const std::size_t n = m.num_vertices();
  std::vector<char> pos(n), neg(n);
  for (std::size_t v = 0; v < n; ++v) {
    pos[v] = f(v) > thr;
    neg[v] = f(v) < -thr;
  }
  return count_components(m, pos) + count_components(m, neg);
}

namespace {

struct Balls {
  std::vector<int> centers;
  std::vector<std::vector<double>> dist;
};

Balls sample_balls(const TriMesh& m) {
  Balls b;
  b.centers = farthest_point_sample(m, kMaxBallCenters);
  for (int c : b.centers) b.dist.push_back(edge_distances(m, c));
  return b;
}

// C minimizing sum (value - C * law)^2, and whether value / law grows by
// more than 2x toward smaller radii.
void fit_law(ConcentrationProfile& p, const std::vector<double>& law) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    num += p.rows[i].value * law[i];
    den += law[i] * law[i];
  }
  p.C = den > 0.0 ? num / den : 0.0;
  for (std::size_t i = 0; i < p.rows.size(); ++i) p.rows[i].fit = p.C * law[i];
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const double c = p.rows[i].value / law[i];
    if (c > 2.0 * lo) p.flagged = true;
    lo = std::min(lo, c);
  }
}

double reduced_log(const TriMesh& m, double r) { return std::log(std::sqrt(m.total_area()) / r); }

void check_radii(const std::vector<double>& radii) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] < radii[i - 1])) throw DimensionMismatch("radii must be decreasing");
}

}  // namespace

ConcentrationProfile nonconcentration_profile(const TriMesh& m, const ConformalDensity& rho,
                                              const std::vector<double>& radii) {
  check_radii(radii);
  const Balls b = sample_balls(m);
  ConcentrationProfile p;
  std::vector<double> law;
  for (std::size_t v = 0; v < m.num_vertices(); ++v) p.total += rho.rho[v] * m.vertex_area(static_cast<int>(v));
  for (double r : radii) {
    double best = 0.0;
    for (const auto& d : b.dist) {
      double mass = 0.0;
      for (std::size_t v = 0; v < d.size(); ++v)
        if (d[v] < r) mass += rho.rho[v] * m.vertex_area(static_cast<int>(v));
      best = std::max(best, mass);
    }
    p.rows.push_back({r, best, 0.0});
    law.push_back(1.0 / reduced_log(m, r));
  }
  fit_law(p, law);
  return p;
}

namespace {

// Per-face sum over columns of |grad f|^2 * area.
std::vector<double> face_energies(const TriMesh& m, const Mat& F) {
  std::vector<double> e(m.num_faces(), 0.0);
  for (int f = 0; f < static_cast<int>(m.num_faces()); ++f) {
    const auto& c = m.corners(f);
    const Face& t = m.faces()[f];
    const double twice_area = (c[1] - c[0]).cross(c[2] - c[0]).norm();
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3, l = (i + 2) % 3;
      const double w = 0.5 * (c[j] - c[i]).dot(c[l] - c[i]) / twice_area;
      for (Eigen::Index col = 0; col < F.cols(); ++col) {
        const double d = F(t[j], col) - F(t[l], col);
        e[f] += w * d * d;
      }
    }
  }
  return e;
}

}  // namespace

ConcentrationProfile gradient_nonconcentration(const TriMesh& m, const EigenspaceFrame& frame,
                                               const std::vector<double>& radii) {
  check_radii(radii);
  std::vector<double> e = face_energies(m, frame.phi);
  for (double& x : e) x /= frame.k;
  const Balls b = sample_balls(m);
  ConcentrationProfile p;
  p.total = std::accumulate(e.begin(), e.end(), 0.0);
  std::vector<double> law;
  for (double r : radii) {
    double best = 0.0;
    for (const auto& d : b.dist) {
      double en = 0.0;
      for (std::size_t f = 0; f < m.num_faces(); ++f) {
        const Face& t = m.faces()[f];
        if (std::max({d[t[0]], d[t[1]], d[t[2]]}) < r) en += e[f];
      }
      best = std::max(best, en);
    }
    p.rows.push_back({r, best, 0.0});
    law.push_back(1.0 / std::sqrt(reduced_log(m, r)));
  }
  fit_law(p, law);
  return p;
}

HarmonicMapReport harmonic_map_report(const OptState& s, const ELCertificate& c) {
  if (!c.certified) throw NotCertified("state does not satisfy the optimality certificate");
  const TriMesh& m = *s.mesh;
  const int n = static_cast<int>(m.num_vertices());
  Eigen::SelfAdjointEigenSolver<Mat> es(c.Q);
  const Mat root = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                   es.eigenvectors().transpose();
  const Mat Phi = s.frame.phi * root;  // V x k

  HarmonicMapReport r;
  r.norm_field.resize(n);
  for (int v = 0; v < n; ++v) {
    r.norm_field[v] = Phi.row(v).norm();
    r.max_norm_deviation = std::max(r.max_norm_deviation, std::abs(r.norm_field[v] - 1.0));
  }

  const std::vector<double> fe = face_energies(m, Phi);
  r.energy_density.resize(m.num_faces());
  for (std::size_t f = 0; f < m.num_faces(); ++f) r.energy_density[f] = fe[f] / m.face_area(static_cast<int>(f));

  // Vertex-averaged energy density: incident face energies over vertex area.
  std::vector<double> ev(n, 0.0);
  for (std::size_t f = 0; f < m.num_faces(); ++f)
    for (int v : m.faces()[f]) ev[v] += fe[f] / 3.0;
  for (int v = 0; v < n; ++v) ev[v] /= m.vertex_area(v);

  Mat SPhi(n, Phi.cols());
  for (Eigen::Index j = 0; j < Phi.cols(); ++j) SPhi.col(j) = s.S.matrix * Phi.col(j);
  r.harmonic_residual.resize(n);
  for (int v = 0; v < n; ++v)
    r.harmonic_residual[v] = (SPhi.row(v) / m.vertex_area(v) - ev[v] * Phi.row(v)).norm();

  double num = 0.0, den = 0.0;
  for (int v = 0; v < n; ++v) {
    num += std::abs(s.lambda * s.rho.rho[v] - ev[v]) * m.vertex_area(v);
    den += ev[v] * m.vertex_area(v);
  }
  r.measure_match = den > 0.0 ? num / den : 0.0;

  std::vector<double> sorted = r.energy_density;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (std::size_t f = 0; f < r.energy_density.size(); ++f)
    if (r.energy_density[f] < 1e-3 * median) r.conical_candidates.push_back(static_cast<int>(f));
  return r;
}

HarmonicMapReport harmonic_map_report(const OptState& s, double tol) {
  return harmonic_map_report(s, el_certificate(s, tol));
}

}  // namespace spectramax
