#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

#include "adiabatic/grid.hpp"

namespace adiabatic {

/// Centered finite-difference -d^2/dx^2 of order 2, 4 or 6.
///
/// The operator is written as a weighted sum of wide second differences
///   -D u = sum_m c_m (2 u_j - u_{j-m} - u_{j+m}) / (m h)^2,
/// which is the exact gradient of the quadratic form
///   G(u) = h * sum_m c_m / 2 * sum_{pairs (i, i+m)} ((u_{i+m} - u_i) / (m h))^2.
/// On Dirichlet grids the ghost nodes carry the fixed values `left`/`right`.
class FiniteDifferenceLaplacian {
 public:
  FiniteDifferenceLaplacian(const Grid1D& grid, int order);

  int order() const noexcept { return order_; }
  int reach() const noexcept { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// G(u) for a single real component.
  double quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& u, double left,
                        double right) const;

  /// -D u, with ghosts taking the boundary values.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& u, double left,
                        double right) const;

  /// -D with zero ghost values, as an N x N symmetric matrix.
  Eigen::SparseMatrix<double> matrix() const;

  /// Discrete symbol sum_m c_m 4 sin^2(m k h / 2) / (m h)^2.
  double symbol(double wavenumber) const;
  double symbol_max() const;

 private:
  double value(const Eigen::Ref<const Eigen::VectorXd>& u, int i, double left,
               double right) const noexcept;

  Grid1D grid_;
  int order_;
  std::vector<double> weights_;
};

}  // namespace adiabatic
