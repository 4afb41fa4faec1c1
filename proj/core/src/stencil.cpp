#include "adiabatic/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "adiabatic/errors.hpp"

namespace adiabatic {

FiniteDifferenceLaplacian::FiniteDifferenceLaplacian(const Grid1D& grid, int order)
    : grid_(grid), order_(order) {
  switch (order) {
    case 2: weights_ = {1.0}; break;
    case 4: weights_ = {4.0 / 3.0, -1.0 / 3.0}; break;
    case 6: weights_ = {3.0 / 2.0, -3.0 / 5.0, 1.0 / 10.0}; break;
    default:
      throw ConfigError("stencil order must be 2, 4 or 6, got " + std::to_string(order));
  }
}

double FiniteDifferenceLaplacian::value(const Eigen::Ref<const Eigen::VectorXd>& u, int i,
                                        double left, double right) const noexcept {
  const int n = grid_.num_points();
  if (i >= 0 && i < n) return u[i];
  if (grid_.periodic()) return u[((i % n) + n) % n];
  return i < 0 ? left : right;
}

double FiniteDifferenceLaplacian::quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& u,
                                                 double left, double right) const {
  const int n = grid_.num_points();
  const double h = grid_.spacing();
  double total = 0.0;
  for (int m = 1; m <= reach(); ++m) {
    const double scale = 0.5 * weights_[m - 1] / (m * m * h * h);
    const int first = grid_.periodic() ? 0 : -m;
    double acc = 0.0;
    for (int i = first; i < n; ++i) {
      const double d = value(u, i + m, left, right) - value(u, i, left, right);
      acc += d * d;
    }
    total += scale * acc;
  }
  return h * total;
}

Eigen::VectorXd FiniteDifferenceLaplacian::apply(const Eigen::Ref<const Eigen::VectorXd>& u,
                                                 double left, double right) const {
  const int n = grid_.num_points();
  const double h2 = grid_.spacing() * grid_.spacing();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int m = 1; m <= reach(); ++m) {
    const double c = weights_[m - 1] / (m * m * h2);
    for (int j = 0; j < n; ++j) {
      out[j] += c * (2.0 * u[j] - value(u, j - m, left, right) - value(u, j + m, left, right));
    }
  }
  return out;
}

Eigen::SparseMatrix<double> FiniteDifferenceLaplacian::matrix() const {
  const int n = grid_.num_points();
  const double h2 = grid_.spacing() * grid_.spacing();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(n) * (2 * reach() + 1));
  for (int m = 1; m <= reach(); ++m) {
    const double c = weights_[m - 1] / (m * m * h2);
    for (int j = 0; j < n; ++j) {
      t.emplace_back(j, j, 2.0 * c);
      for (int s : {-m, m}) {
        int k = j + s;
        if (grid_.periodic()) {
          k = ((k % n) + n) % n;
        } else if (k < 0 || k >= n) {
          continue;
        }
        t.emplace_back(j, k, -c);
      }
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

double FiniteDifferenceLaplacian::symbol(double k) const {
  const double h = grid_.spacing();
  double s = 0.0;
  for (int m = 1; m <= reach(); ++m) {
    const double sn = std::sin(0.5 * m * k * h);
    s += weights_[m - 1] * 4.0 * sn * sn / (m * m * h * h);
  }
  return s;
}

double FiniteDifferenceLaplacian::symbol_max() const {
  const double h = grid_.spacing();
  double best = 0.0;
  constexpr int kSamples = 2048;
  for (int i = 0; i <= kSamples; ++i) {
    best = std::max(best, symbol(std::numbers::pi / h * i / kSamples));
  }
  return best;
}

}  // namespace adiabatic
