#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectramax/eig.hpp"
#include "spectramax/error.hpp"
#include "support.hpp"

using namespace spectramax;
constexpr double kPi = std::numbers::pi;

namespace {

struct Problem {
  TriMesh mesh;
  StiffnessForm S;
  MassForm M;
};

Problem unit_volume(TriMesh m, std::vector<double> rho = {}) {
  if (rho.empty()) rho.assign(m.num_vertices(), 1.0);
  const ConformalDensity d = ConformalDensity::from_values(m, std::move(rho)).normalized();
  StiffnessForm S = stiffness(m);
  MassForm M = mass(m, d);
  return {std::move(m), std::move(S), std::move(M)};
}

void check_invariants(const Problem& p, const SpectralData& sd, double tol) {
  const auto& w = p.M.weights;
  const Eigen::Map<const Vec> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  const Mat G = sd.eigenvectors.transpose() * wv.asDiagonal() * sd.eigenvectors;
  CHECK((G - Mat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(sd.eigenvalues(0) <= 1e-8 * sd.eigenvalues(1));
  for (Eigen::Index i = 1; i < sd.eigenvalues.size(); ++i) {
    CHECK(sd.eigenvalues(i) >= sd.eigenvalues(i - 1));
    const Vec phi = sd.eigenvectors.col(i);
    const Vec r = p.S.matrix * phi - sd.eigenvalues(i) * wv.cwiseProduct(phi);
    CHECK(r.norm() <= tol * (p.S.matrix * phi).norm());
    CHECK(testing::rel(rayleigh(p.S, p.M, span_of(phi)), sd.eigenvalues(i)) <= 1e-8);
  }
}

}  // namespace

TEST_CASE("round sphere: 8 pi with multiplicity 3") {
  const Problem p = unit_volume(make_icosphere(4));
  const SpectralData sd = solve_spectrum(p.S, p.M, 6, 1e-9);
  check_invariants(p, sd, 1e-9);
  CHECK(testing::rel(sd.eigenvalues(1), 8.0 * kPi) <= 0.02);
  const EigenspaceFrame fr = first_eigenspace(sd);
  CHECK(fr.k == 3);
  CHECK(fr.phi.cols() == 3);
  // Column 0 is the constant mode.
  const Vec c = sd.eigenvectors.col(0);
  CHECK(c.maxCoeff() - c.minCoeff() <= 1e-12 * std::abs(c.mean()));
}

TEST_CASE("square flat torus: 4 pi^2 with multiplicity 4") {
  const Problem p = unit_volume(make_flat_torus({1, 0}, {0, 1}, 64));
  const SpectralData sd = solve_spectrum(p.S, p.M, 8, 1e-9);
  check_invariants(p, sd, 1e-9);
  CHECK(testing::rel(sd.eigenvalues(1), 4.0 * kPi * kPi) <= 0.01);
  CHECK(first_eigenspace(sd).k == 4);
}

TEST_CASE("perturbed density has a simple first eigenvalue") {
  TriMesh m = make_flat_torus({1, 0}, {0, 1}, 24);
  std::vector<double> rho(m.num_vertices());
  for (std::size_t v = 0; v < rho.size(); ++v) {
    const auto& x = m.vertices()[v];
    rho[v] = 1.0 + 0.3 * std::cos(2.0 * kPi * x.x()) + 0.1 * std::sin(2.0 * kPi * x.y());
  }
  const Problem p = unit_volume(std::move(m), rho);
  const SpectralData sd = solve_spectrum(p.S, p.M, 5, 1e-10);
  check_invariants(p, sd, 1e-10);
  CHECK(first_eigenspace(sd).k == 1);
}

TEST_CASE("constant density on any mesh gives the constant ground state") {
  const Problem p = unit_volume(make_double_torus(2));
  const SpectralData sd = solve_spectrum(p.S, p.M, 4, 1e-9);
  check_invariants(p, sd, 1e-9);
  CHECK(sd.eigenvalues(0) <= 1e-10 * sd.eigenvalues(1));
}

TEST_CASE("refinement error on the sphere shrinks monotonically") {
  double prev = 1e300;
  for (int k = 3; k <= 5; ++k) {
    const Problem p = unit_volume(make_icosphere(k));
    const double err = std::abs(solve_spectrum(p.S, p.M, 4, 1e-9).eigenvalues(1) - 8.0 * kPi);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("fixed seed gives bitwise identical output") {
  const Problem p = unit_volume(make_icosphere(3));
  const SpectralData a = solve_spectrum(p.S, p.M, 5, 1e-9);
  const SpectralData b = solve_spectrum(p.S, p.M, 5, 1e-9);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("warm start reaches the same spectrum") {
  const Problem p = unit_volume(make_icosphere(3));
  const SpectralData a = solve_spectrum(p.S, p.M, 5, 1e-9);
  EigOptions o;
  o.warm_start = &a.eigenvectors;
  const SpectralData b = solve_spectrum(p.S, p.M, 5, 1e-9, o);
  for (Eigen::Index i = 1; i < 6; ++i) CHECK(testing::rel(b.eigenvalues(i), a.eigenvalues(i)) <= 1e-9);
  CHECK(b.iterations <= a.iterations);
}

TEST_CASE("cluster detection edge cases") {
  SpectralData sd;
  sd.eigenvectors = Mat::Identity(5, 5);
  sd.residuals = Vec::Zero(5);
  sd.eigenvalues.resize(5);

  sd.eigenvalues << 0.0, 1.0, 1.0 + 1.5e-5, 2.0, 3.0;  // next eigenvalue inside the 2 rtol gap
  CHECK_THROWS_AS(first_eigenspace(sd, 1e-5), AmbiguousCluster);
  CHECK(leading_cluster(sd, 2e-5, 8).k == 2);

  sd.eigenvalues << 0.0, 1.0, 1.0, 1.0, 1.0;  // nothing above the cluster
  CHECK_THROWS_AS(first_eigenspace(sd, 1e-5), AmbiguousCluster);

  sd.eigenvalues << 0.0, 1.0, 1.0, 1.0, 2.0;
  CHECK(first_eigenspace(sd, 1e-5).k == 3);
  CHECK_THROWS_AS(first_eigenspace(sd, 1e-5, 2), AmbiguousCluster);
  CHECK(first_eigenspace(sd, 1e-5).lambda == doctest::Approx(1.0));
}

TEST_CASE("solver errors") {
  const Problem p = unit_volume(make_icosphere(3));
  EigOptions o;
  o.max_iterations = 1;
  CHECK_THROWS_AS(solve_spectrum(p.S, p.M, 5, 1e-14, o), NoConvergence);
  const Problem q = unit_volume(make_icosphere(2));
  CHECK_THROWS_AS(solve_spectrum(p.S, q.M, 5, 1e-9), DimensionMismatch);
}
