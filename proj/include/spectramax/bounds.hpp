#pragma once
// Closed-form bounds on the first conformal eigenvalue by genus.

#include <optional>
#include <string>

namespace spectramax {

/// Value stored as coefficient * basis with basis one of pi, pi^2/sqrt(3).
struct ExactValue {
  double value;
  std::string symbolic;  // e.g. "8*pi"
  std::string source;
};

/// 8 pi floor((gamma + 3) / 2).
double yang_yau(int genus);
/// (3 pi / 4)(gamma - 1).
double lower_bound(int genus);
/// Known maximal values for genus 0, 1, 2.
std::optional<ExactValue> known_exact(int genus);

struct BoundsReport {
  int genus;
  double yang_yau;
  double lower_bound;
  std::optional<ExactValue> known_exact;
};

BoundsReport bounds_report(int genus);

}  // namespace spectramax
