#include "spectramax/fem.hpp"

#include <cmath>
#include <string>

#include "spectramax/error.hpp"

namespace spectramax {

namespace {

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw DimensionMismatch(std::string(what) + " has " + std::to_string(got) +
                            " entries, expected " + std::to_string(want));
}

}  // namespace

ConformalDensity ConformalDensity::constant(const TriMesh& m, double value) {
  return from_values(m, std::vector<double>(m.num_vertices(), value));
}

ConformalDensity ConformalDensity::from_values(const TriMesh& m, std::vector<double> rho) {
  check_size(rho.size(), m.num_vertices(), "density");
  ConformalDensity d;
  d.total_volume = 0.0;
  for (std::size_t v = 0; v < rho.size(); ++v) {
    if (!(rho[v] > 0.0) || !std::isfinite(rho[v]))
      throw ZeroNorm("density must be positive and finite at vertex " + std::to_string(v));
    d.total_volume += rho[v] * m.vertex_area(static_cast<int>(v));
  }
  d.rho = std::move(rho);
  return d;
}

ConformalDensity ConformalDensity::normalized() const {
  ConformalDensity d = *this;
  for (double& r : d.rho) r /= total_volume;
  d.total_volume = 1.0;
  return d;
}

kernels::CsrView StiffnessForm::csr() const {
  return {static_cast<std::size_t>(matrix.rows()), matrix.outerIndexPtr(), matrix.innerIndexPtr(),
          matrix.valuePtr()};
}

void StiffnessForm::apply(std::span<const double> x, std::span<double> y) const {
  check_size(x.size(), size(), "vector");
  kernels::spmv(csr(), x, y);
}

double StiffnessForm::energy(std::span<const double> f) const {
  std::vector<double> sf(f.size());
  apply(f, sf);
  return kernels::dot(sf, f);
}

double MassForm::trace() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

double MassForm::inner(std::span<const double> f, std::span<const double> g) const {
  check_size(f.size(), weights.size(), "vector");
  check_size(g.size(), weights.size(), "vector");
  return kernels::wdot(weights, f, g);
}

StiffnessForm stiffness(const TriMesh& m) {
  const int nv = static_cast<int>(m.num_vertices());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.num_faces() * 9);
  for (int f = 0; f < static_cast<int>(m.num_faces()); ++f) {
    const auto& c = m.corners(f);
    const Face& t = m.faces()[f];
    const double twice_area = (c[1] - c[0]).cross(c[2] - c[0]).norm();
    for (int i = 0; i < 3; ++i) {
      // Corner i is opposite edge (i+1, i+2).
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      const Vec3 e1 = c[j] - c[i], e2 = c[k] - c[i];
      const double w = 0.5 * e1.dot(e2) / twice_area;  // cot(angle_i) / 2
      const int a = t[j], b = t[k];
      trip.emplace_back(a, b, -w);
      trip.emplace_back(b, a, -w);
      trip.emplace_back(a, a, w);
      trip.emplace_back(b, b, w);
    }
  }
  StiffnessForm S;
  S.matrix.resize(nv, nv);
  S.matrix.setFromTriplets(trip.begin(), trip.end());
  S.matrix.makeCompressed();
  return S;
}

MassForm mass(const TriMesh& m, const ConformalDensity& d) {
  check_size(d.rho.size(), m.num_vertices(), "density");
  MassForm M;
  M.weights.resize(d.rho.size());
  for (std::size_t v = 0; v < d.rho.size(); ++v)
    M.weights[v] = d.rho[v] * m.vertex_area(static_cast<int>(v));
  return M;
}

double rayleigh(const StiffnessForm& S, const MassForm& M, std::span<const double> f) {
  const double den = M.inner(f, f);
  if (!(den > 0.0)) throw ZeroNorm("vector has zero mass norm");
  return S.energy(f) / den;
}

}  // namespace spectramax
