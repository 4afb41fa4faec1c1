#include "adiabatic/grid.hpp"

#include <cmath>
#include <string>

#include "adiabatic/errors.hpp"

namespace adiabatic {

std::string_view to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "dirichlet";
}

Boundary parse_boundary(std::string_view s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "dirichlet") return Boundary::dirichlet;
  throw ConfigError("unknown boundary '" + std::string(s) + "'");
}

Grid1D::Grid1D(double length, int num_points, Boundary boundary)
    : length_(length),
      num_points_(num_points),
      spacing_(length / num_points),
      boundary_(boundary) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw StructuralError("grid length must be positive and finite");
  }
  if (num_points < kMinPoints) {
    throw StructuralError("grid needs at least " + std::to_string(kMinPoints) +
                          " points, got " + std::to_string(num_points));
  }
}

double Grid1D::offset(int i, double a) const noexcept {
  double d = x(i) - a;
  if (periodic()) {
    d -= length_ * std::floor((d + 0.5 * length_) / length_);
  }
  return d;
}

}  // namespace adiabatic
