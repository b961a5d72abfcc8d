#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectramax/error.hpp"
#include "spectramax/mosertrudinger.hpp"
#include "support.hpp"

using namespace spectramax;
constexpr double kPi = std::numbers::pi;
constexpr double kEightPi = 8.0 * kPi;

namespace {

const TriMesh& sphere() {
  static const TriMesh m = make_icosphere(2);
  return m;
}

const TriMesh& square() {
  static const TriMesh m = make_flat_torus({1, 0}, {0, 1}, 24);
  return m;
}

Vec field(const TriMesh& m, std::uint64_t seed, double amp) {
  return testing::random_vec(m.num_vertices(), seed, -amp, amp);
}

}  // namespace

TEST_CASE("gradient matches central differences") {
  const MTProblem p = make_mt_problem(sphere(), field(sphere(), 1, 0.3));
  const Vec u = field(sphere(), 2, 0.5);
  const Vec g = mt_gradient(p, u);
  const double h = 1e-6;
  Vec fd(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Vec a = u, b = u;
    a(i) += h;
    b(i) -= h;
    fd(i) = (mt_value(p, a) - mt_value(p, b)) / (2.0 * h);
  }
  CHECK((fd - g).norm() <= 1e-5 * g.norm());
  CHECK((mt_gradient(sphere(), u, p.v) - g).norm() == 0.0);
  CHECK(mt_value(sphere(), u, p.v) == mt_value(p, u));
}

TEST_CASE("gauge invariance, normalization and the residual") {
  const MTProblem p = make_mt_problem(square(), field(square(), 3, 0.2));
  CHECK(std::abs(p.w.sum() - 1.0) <= 1e-14);
  const Vec u = field(square(), 4, 0.7);
  const double J = mt_value(p, u);
  CHECK(std::abs(mt_value(p, (u.array() + 3.7).matrix()) - J) <= 1e-10 * std::max(1.0, std::abs(J)));

  const Vec n = mt_normalize(p, u);
  CHECK(std::abs(p.w.dot((2.0 * n.array()).exp().matrix()) - 1.0) <= 1e-8);
  CHECK(std::abs(mt_value(p, n) - J) <= 1e-10 * std::max(1.0, std::abs(J)));

  const Vec F = mt_residual(p, u), g = mt_gradient(p, u);
  CHECK((F - (2.0 * kPi * g.array() / p.w.array()).matrix()).cwiseAbs().maxCoeff() <= 1e-9 * F.cwiseAbs().maxCoeff());
  CHECK(mt_residual_norm(p, u) == doctest::Approx(std::sqrt((p.w.array() * F.array().square()).sum())));

  const Vec zero = Vec::Zero(u.size());
  CHECK(mt_value(p, zero) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(mt_residual(p, zero).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("second-order Taylor coefficient") {
  const MTProblem p = make_mt_problem(square());
  Vec f = field(square(), 5, 1.0);
  f.array() -= p.w.dot(f);  // w-mean zero
  const double coef = f.dot(p.S.matrix * f) / (4.0 * kPi) - 2.0 * p.w.dot(f.cwiseProduct(f));
  const double t = 1e-3;
  const double q = (mt_value(p, t * f) + mt_value(p, -t * f)) / (2.0 * t * t);
  CHECK(std::abs(q - coef) <= 1e-4 * std::abs(coef));
}

TEST_CASE("flow converges with nonincreasing energy") {
  const MTState s = mt_flow(square(), Vec(), low_mode_field(square(), 0.2, 9));
  CHECK(s.grad_norm <= 1e-6);
  REQUIRE(!s.J_history.empty());
  for (std::size_t i = 1; i < s.J_history.size(); ++i)
    CHECK(s.J_history[i] <= s.J_history[i - 1] + 1e-12 * std::max(1.0, std::abs(s.J_history[i - 1])));
  CHECK(s.J == s.J_history.back());
  const MTProblem p = make_mt_problem(square());
  CHECK(std::abs(p.w.dot((2.0 * s.u.array()).exp().matrix()) - 1.0) <= 1e-8);
  CHECK(s.rigidity_applicable);

  const SecondVariation sv = second_variation_check(s, square());
  CHECK(sv.pass);
  CHECK(sv.margin > 0.0);
  CHECK(sv.lambda1_times_vol >= kEightPi * 0.99);
  CHECK(sv.eight_pi_excluded);
  CHECK(sv.margin == doctest::Approx(sv.lambda1_times_vol - kEightPi));
}

TEST_CASE("equilateral torus: u = 0 is already critical") {
  const TriMesh m = make_flat_torus({1, 0}, {0.5, std::sqrt(3.0) / 2.0}, 24);
  const MTState s = mt_flow(m, Vec(), Vec());
  CHECK(s.iterations == 0);
  CHECK(std::abs(s.J) <= 1e-14);
  CHECK(second_variation_check(s, m).margin > 0.0);
}

TEST_CASE("sphere: rigidity does not apply and the margin is near zero") {
  const TriMesh m = make_icosphere(3);
  const MTState s = mt_flow(m, Vec(), Vec());
  CHECK_FALSE(s.rigidity_applicable);
  const SecondVariation sv = second_variation_check(s, m);
  CHECK(std::abs(sv.margin) <= 0.02 * kEightPi);
}

TEST_CASE("low-mode fields") {
  const Vec a = low_mode_field(square(), 0.05, 11), b = low_mode_field(square(), 0.05, 11);
  CHECK(a == b);
  CHECK(a.cwiseAbs().maxCoeff() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(a != low_mode_field(square(), 0.05, 12));
}

TEST_CASE("perturbation search") {
  MTOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const PerturbResult r1 = perturb_search(square(), 4, 0.05, 21, one);
  const PerturbResult r4 = perturb_search(square(), 4, 0.05, 21, four);
  CHECK(r1.margins == r4.margins);
  CHECK(r1.best_v == r4.best_v);
  REQUIRE(r1.margins.size() == 4);
  CHECK(r1.best_margin == *std::max_element(r1.margins.begin(), r1.margins.end()));
  CHECK(r1.best_margin >= r1.margins[0]);
  CHECK(r1.best_v.cwiseAbs().maxCoeff() <= 0.05 * (1.0 + 1e-12));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(make_mt_problem(square(), Vec::Zero(5)), DimensionMismatch);
  MTOptions o;
  o.max_iterations = 1;
  o.tol = 1e-14;
  CHECK_THROWS_AS(mt_flow(square(), Vec(), field(square(), 13, 0.5), o), FlowNoConvergence);
  CHECK(std::string(FlowNoConvergence("x").code()) == "mosertrudinger.FlowNoConvergence");
}
