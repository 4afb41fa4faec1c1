#include "adiabatic/regression.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "adiabatic/errors.hpp"

namespace adiabatic {

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw StructuralError("fit_linear: x and y differ in length");
  LinearFit fit;
  fit.points = static_cast<int>(x.size());
  if (fit.points < 2) return fit;
  const double n = fit.points;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y, double floor_level) {
  if (x.size() != y.size()) throw StructuralError("fit_log_log: x and y differ in length");
  LogLogFit out;
  bool all_floor = true, any_finite = false;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(y[i])) any_finite = true;
    if (std::isfinite(y[i]) && std::abs(y[i]) > floor_level) all_floor = false;
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    } else {
      ++out.dropped;
    }
  }
  out.floor = all_floor && any_finite;
  if (!out.floor) out.line = fit_linear(lx, ly);
  return out;
}

std::string LogLogFit::describe() const {
  if (floor) return "floor";
  if (!std::isfinite(line.slope)) return "insufficient";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", line.slope);
  return buf;
}

}  // namespace adiabatic
