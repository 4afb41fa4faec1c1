#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string_view>

#include "adiabatic/grid.hpp"

namespace adiabatic {

/// How grid samples are stored.
///
/// `complex` interleaves (re, im) per node so that every inner product is
/// real-bilinear. `pair` stores the first component for all nodes followed by
/// the second component.
enum class ValueKind { real, complex, pair };

std::string_view to_string(ValueKind k);

constexpr int components(ValueKind k) noexcept { return k == ValueKind::real ? 1 : 2; }

class StateVector {
 public:
  StateVector(const Grid1D& grid, ValueKind kind);
  StateVector(const Grid1D& grid, ValueKind kind, Eigen::VectorXd values);

  const Grid1D& grid() const noexcept { return grid_; }
  ValueKind kind() const noexcept { return kind_; }
  Eigen::Index size() const noexcept { return values_.size(); }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }

  double& operator[](Eigen::Index i) { return values_[i]; }
  double operator[](Eigen::Index i) const { return values_[i]; }

  std::complex<double> complex_at(int node) const {
    return {values_[2 * node], values_[2 * node + 1]};
  }
  void set_complex(int node, std::complex<double> z) {
    values_[2 * node] = z.real();
    values_[2 * node + 1] = z.imag();
  }

  /// First / second block of a canonical pair.
  auto first() const { return values_.head(grid_.num_points()); }
  auto second() const { return values_.tail(grid_.num_points()); }
  auto first() { return values_.head(grid_.num_points()); }
  auto second() { return values_.tail(grid_.num_points()); }

  /// Throws NumericError naming the first non-finite entry.
  void check_finite() const;
  bool all_finite() const noexcept { return values_.allFinite(); }

  /// Throws StructuralError unless `other` lives on the same grid and kind.
  void check_compatible(const StateVector& other) const;

  StateVector& operator+=(const StateVector& o);
  StateVector& operator-=(const StateVector& o);
  StateVector& operator*=(double s) {
    values_ *= s;
    return *this;
  }

  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(double s, StateVector a) { return a *= s; }
  friend StateVector operator*(StateVector a, double s) { return a *= s; }

  StateVector zeros_like() const { return StateVector(grid_, kind_); }

 private:
  Grid1D grid_;
  ValueKind kind_;
  Eigen::VectorXd values_;
};

/// Real inner product <a, b> = h * sum(a_i b_i); for complex storage this is
/// the integral of Re(conj(a) b), for pairs the sum over both components.
double inner_product(const StateVector& a, const StateVector& b);
double norm(const StateVector& a);

}  // namespace adiabatic
