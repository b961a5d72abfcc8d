#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectramax/bounds.hpp"
#include "spectramax/error.hpp"
#include "spectramax/maximize.hpp"
#include "support.hpp"

using namespace spectramax;
constexpr double kEightPi = 8.0 * std::numbers::pi;

namespace {

const TriMesh& sphere() {
  static const TriMesh m = make_icosphere(2);
  return m;
}

const HeatOperator& heat() {
  static const HeatOperator K(sphere(), 0.1, dense_background_spectrum(sphere()));
  return K;
}

VertexMeasure lumpy(std::uint64_t seed) {
  const Vec w = testing::random_vec(sphere().num_vertices(), seed, 0.2, 1.0);
  return VertexMeasure::from_weights(std::vector<double>(w.data(), w.data() + w.size()));
}

void check_simplex(const VertexMeasure& nu) {
  double s = 0.0;
  for (double x : nu.nu) {
    CHECK(x >= 0.0);
    s += x;
  }
  CHECK(std::abs(s - 1.0) <= 1e-12);
}

}  // namespace

TEST_CASE("state is coherent") {
  const OptState s = make_state(sphere(), heat(), lumpy(1), {});
  double vol = 0.0;
  for (std::size_t v = 0; v < s.rho.rho.size(); ++v) vol += s.rho.rho[v] * sphere().vertex_area(static_cast<int>(v));
  CHECK(std::abs(vol - 1.0) <= 1e-10);
  CHECK(s.lambda == s.frame.lambda);
  CHECK(s.lambda == doctest::Approx(s.spectrum.eigenvalues(1)).epsilon(2e-3));
  CHECK(s.epsilon() == 0.1);

  const Mat G = gram_fields(s);
  CHECK(G.rows() == static_cast<Eigen::Index>(sphere().num_vertices()));
  CHECK(G.cols() == s.frame.k * (s.frame.k + 1) / 2);
  const Vec sc = directional_scores(s);
  for (int x : {0, 7, 100}) CHECK(directional_score(s, x) == doctest::Approx(sc(x)).epsilon(1e-14));
  CHECK(sc.maxCoeff() > 0.0);
}

TEST_CASE("ascent steps stay on the simplex and increase lambda") {
  OptState s = make_state(sphere(), heat(), lumpy(2), {});
  for (int i = 0; i < 5; ++i) {
    const OptState n = ascent_step(s, 0.5, {});
    check_simplex(n.nu);
    CHECK(n.lambda >= s.lambda);
    CHECK(n.history.size() == s.history.size() + 1);
    s = n;
  }
  const OptState same = ascent_step(s, 0.0, {});
  CHECK(same.nu.nu == s.nu.nu);
  CHECK(same.lambda == s.lambda);
  CHECK_THROWS_AS(ascent_step(s, 1.5, {}), StallDetected);
  CHECK_THROWS_AS(ascent_step(s, -0.1, {}), StallDetected);
}

TEST_CASE("maximize_at_epsilon ascends monotonically to small slack") {
  const OptState s = maximize_at_epsilon(sphere(), heat(), lumpy(3), {});
  check_simplex(s.nu);
  REQUIRE(s.history.size() >= 2);
  for (std::size_t i = 1; i < s.history.size(); ++i) CHECK(s.history[i].lambda >= s.history[i - 1].lambda);
  CHECK(s.lambda > make_state(sphere(), heat(), lumpy(3), {}).lambda);
  CHECK(s.lambda <= kEightPi * 1.05);
}

TEST_CASE("the uniform measure on the sphere is already near optimal") {
  const OptState u = make_state(sphere(), heat(), VertexMeasure::uniform(sphere()), {});
  const OptState s = maximize_at_epsilon(sphere(), heat(), VertexMeasure::uniform(sphere()), {});
  CHECK(std::abs(s.lambda - u.lambda) <= 0.01 * u.lambda);
  CHECK(u.frame.k == 3);
}

TEST_CASE("epsilon limits") {
  const double emin = epsilon_min(sphere());
  const HeatOperator tiny(sphere(), 0.5 * emin, 16);
  CHECK_THROWS_AS(maximize_at_epsilon(sphere(), tiny, VertexMeasure::uniform(sphere()), {}), EpsilonTooSmall);
  CHECK_THROWS_AS(optimize_conformal(sphere(), {0.5 * emin, 0.25 * emin}, {}), EpsilonTooSmall);
  CHECK_THROWS_AS(optimize_conformal(sphere(), {0.04, 0.08}, {}), EpsilonTooSmall);
  CHECK_THROWS_AS(optimize_conformal(sphere(), {0.08, 0.08}, {}), EpsilonTooSmall);
}

TEST_CASE("continuation report") {
  const double emin = epsilon_min(sphere());
  REQUIRE(0.2 >= emin);
  const std::vector<double> sched{0.4, 0.2, 0.5 * emin};
  const OptReport r = optimize_conformal(sphere(), sched, {});
  CHECK(r.schedule == std::vector<double>{0.4, 0.2});
  CHECK(r.skipped == std::vector<double>{0.5 * emin});
  CHECK(r.lambda_per_epsilon.size() == 2);
  CHECK(r.iterations_per_epsilon.size() == 2);
  CHECK(r.genus == 0);
  CHECK(r.Lambda1_estimate == r.lambda_per_epsilon.back());
  CHECK(r.Lambda1_estimate <= yang_yau(0) * 1.05);
  CHECK(r.yang_yau_ok);
  CHECK(r.certificate.epsilon == 0.2);
  check_simplex(r.final_state.nu);

  const OptReport again = optimize_conformal(sphere(), sched, {});
  CHECK(again.final_state.nu.nu == r.final_state.nu.nu);
  CHECK(again.Lambda1_estimate == r.Lambda1_estimate);
}

TEST_CASE("backend choice follows mesh size") {
  OptOptions o;
  CHECK(make_heat_operator(sphere(), 0.1, o).backend() == HeatBackend::spectral);
  o.dense_heat_limit = 10;
  CHECK(make_heat_operator(sphere(), 0.1, o).backend() == HeatBackend::implicit_euler);
}

TEST_CASE("multiple eigenvalue: spread ascent where no single vertex ascends") {
  // Uniform density on this torus has a double first eigenvalue and every
  // vertex score is negative, yet the state is not stationary.
  const TriMesh m = make_revolution_torus(2.0, 0.7, 32, 16);
  const HeatOperator K(m, 0.16, dense_background_spectrum(m));
  const OptState s = make_state(m, K, VertexMeasure::uniform(m), {});
  REQUIRE(s.frame.k == 2);
  CHECK(directional_scores(s).maxCoeff() < 0.0);
  const double gap = stationarity_gap(s, {});
  CHECK(gap > 1e-3);
  const OptState n = ascent_step(s, 0.5, {});
  check_simplex(n.nu);
  CHECK(n.lambda > s.lambda);
  CHECK(n.history.back().slack == doctest::Approx(gap));
  CHECK(stationarity_gap(n, {}) < gap);
}

TEST_CASE("stationarity gap dominates the vertex scores") {
  const OptState s = make_state(sphere(), heat(), lumpy(4), {});
  CHECK(stationarity_gap(s, {}) >= directional_scores(s).maxCoeff());
}
