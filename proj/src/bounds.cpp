#include "spectramax/bounds.hpp"

#include <numbers>

namespace spectramax {

using std::numbers::pi;

double yang_yau(int genus) { return 8.0 * pi * ((genus + 3) / 2); }

double lower_bound(int genus) { return 0.75 * pi * (genus - 1); }

std::optional<ExactValue> known_exact(int genus) {
  switch (genus) {
    case 0: return ExactValue{8.0 * pi, "8*pi", "Hersch, round sphere"};
    case 1: return ExactValue{8.0 * pi * pi / std::numbers::sqrt3, "8*pi^2/sqrt(3)", "flat equilateral torus"};
    case 2: return ExactValue{16.0 * pi, "16*pi", "genus two maximal value"};
    default: return std::nullopt;
  }
}

BoundsReport bounds_report(int genus) {
  return {genus, yang_yau(genus), lower_bound(genus), known_exact(genus)};
}

}  // namespace spectramax
