#pragma once

#include <limits>
#include <span>
#include <string>

namespace adiabatic {

/// Least-squares line y = slope * x + intercept with coefficient of determination.
struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  int points = 0;
};

LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

/// Fit of log y against log x.
///
/// `floor` is set when every y is below `floor_level` (the quantity sits at the
/// numerical floor and carries no exponent); pairs with nonpositive or
/// non-finite entries are dropped and counted in `dropped`.
struct LogLogFit {
  LinearFit line;
  bool floor = false;
  int dropped = 0;

  double slope() const noexcept { return line.slope; }
  double r_squared() const noexcept { return line.r_squared; }
  /// "floor", "insufficient" or the slope with 17 significant digits.
  std::string describe() const;
};

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y,
                      double floor_level = 1e-8);

}  // namespace adiabatic
