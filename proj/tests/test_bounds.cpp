#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "spectramax/bounds.hpp"
#include "support.hpp"

using namespace spectramax;
constexpr double kPi = std::numbers::pi;

TEST_CASE("Yang-Yau and lower bounds") {
  const double expect[] = {8, 16, 16, 24, 24, 32, 32};
  for (int g = 0; g <= 6; ++g) {
    CHECK(std::abs(yang_yau(g) - expect[g] * kPi) <= 1e-10 * yang_yau(g));
    CHECK(std::abs(lower_bound(g) - 0.75 * kPi * (g - 1)) <= 1e-12);
    CHECK(yang_yau(g) >= lower_bound(g));
  }
}

TEST_CASE("known exact values") {
  const auto& k = testing::frozen()["constants"];
  CHECK(testing::rel(known_exact(0)->value, k["eight_pi"].get<double>()) <= 1e-10);
  CHECK(testing::rel(known_exact(1)->value, k["equilateral"].get<double>()) <= 1e-10);
  CHECK(testing::rel(known_exact(2)->value, k["sixteen_pi"].get<double>()) <= 1e-10);
  CHECK(known_exact(0)->symbolic == "8*pi");
  CHECK(!known_exact(3).has_value());
  for (int g = 0; g <= 2; ++g) CHECK(known_exact(g)->value <= yang_yau(g) + 1e-12);

  const BoundsReport r = bounds_report(2);
  CHECK(r.genus == 2);
  CHECK(r.yang_yau == yang_yau(2));
  CHECK(r.lower_bound == lower_bound(2));
  CHECK(r.known_exact.has_value());
}
