#pragma once
// Shared helpers for the test executables.

#include <fstream>
#include <json.hpp>
#include <random>

#include "spectramax/fem.hpp"

namespace testing {

/// Reference values produced by tests/oracles/make_oracles.py.
inline const nlohmann::json& frozen() {
  static const nlohmann::json j = [] {
    std::ifstream in(SPECTRAMAX_ORACLE_FILE);
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline spectramax::Vec random_vec(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  spectramax::Vec v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = U(rng);
  return v;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
