#include "adiabatic/state_vector.hpp"

#include <cmath>
#include <string>

#include "adiabatic/errors.hpp"

namespace adiabatic {

std::string_view to_string(ValueKind k) {
  switch (k) {
    case ValueKind::real: return "real";
    case ValueKind::complex: return "complex";
    case ValueKind::pair: return "pair";
  }
  return "?";
}

StateVector::StateVector(const Grid1D& grid, ValueKind kind)
    : grid_(grid),
      kind_(kind),
      values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.num_points()) *
                                    components(kind))) {}

StateVector::StateVector(const Grid1D& grid, ValueKind kind, Eigen::VectorXd values)
    : grid_(grid), kind_(kind), values_(std::move(values)) {
  const Eigen::Index expected = static_cast<Eigen::Index>(grid.num_points()) * components(kind);
  if (values_.size() != expected) {
    throw StructuralError("state has " + std::to_string(values_.size()) +
                          " entries, expected " + std::to_string(expected));
  }
}

void StateVector::check_finite() const {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NumericError("non-finite state entry", i);
    }
  }
}

void StateVector::check_compatible(const StateVector& other) const {
  if (!(grid_ == other.grid_)) throw StructuralError("grid mismatch");
  if (kind_ != other.kind_) {
    throw StructuralError("value kind mismatch: " + std::string(to_string(kind_)) + " vs " +
                          std::string(to_string(other.kind_)));
  }
}

StateVector& StateVector::operator+=(const StateVector& o) {
  check_compatible(o);
  values_ += o.values_;
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& o) {
  check_compatible(o);
  values_ -= o.values_;
  return *this;
}

double inner_product(const StateVector& a, const StateVector& b) {
  a.check_compatible(b);
  return a.grid().spacing() * a.values().dot(b.values());
}

double norm(const StateVector& a) { return std::sqrt(inner_product(a, a)); }

}  // namespace adiabatic
