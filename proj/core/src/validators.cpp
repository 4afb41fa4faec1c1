#include "adiabatic/validators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace adiabatic {

FiniteDifferenceCheck validate_gradient(const EnergyModel& model, const StateVector& u,
                                        std::span<const StateVector> directions, double tau) {
  FiniteDifferenceCheck out;
  const StateVector g = model.gradient(u);
  const double gnorm = norm(g);
  for (const StateVector& h : directions) {
    const double analytic = inner_product(g, h);
    const double fd = (model.energy(u + tau * h) - model.energy(u - tau * h)) / (2.0 * tau);
    const double scale = std::max(gnorm * norm(h), 1e-300);
    out.max_relative_error = std::max(out.max_relative_error, std::abs(fd - analytic) / scale);
    ++out.trials;
  }
  return out;
}

FiniteDifferenceCheck validate_hessian(const EnergyModel& model, const StateVector& u,
                                       std::span<const StateVector> directions, double tau) {
  FiniteDifferenceCheck out;
  for (const StateVector& h : directions) {
    const StateVector analytic = model.hessian_apply(u, h);
    StateVector fd = model.gradient(u + tau * h);
    fd -= model.gradient(u - tau * h);
    fd *= 1.0 / (2.0 * tau);
    const double scale = std::max(norm(analytic), 1e-300);
    out.max_relative_error = std::max(out.max_relative_error, norm(fd - analytic) / scale);
    ++out.trials;
  }
  return out;
}

double hessian_asymmetry(const EnergyModel& model, const StateVector& u,
                         std::span<const StateVector> directions) {
  double worst = 0.0;
  for (size_t i = 0; i + 1 < directions.size(); i += 2) {
    const StateVector& a = directions[i];
    const StateVector& b = directions[i + 1];
    const StateVector la = model.hessian_apply(u, a);
    const StateVector lb = model.hessian_apply(u, b);
    const double lhs = inner_product(la, b);
    const double rhs = inner_product(a, lb);
    const double scale = std::max(norm(a) * norm(b), 1e-300);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

StateVector random_state(const EnergyModel& model, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  StateVector s = model.zero_state();
  for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = dist(rng);
  return s;
}

std::vector<StateVector> random_states(const EnergyModel& model, int count, std::uint64_t seed,
                                       double amplitude) {
  std::vector<StateVector> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(random_state(model, seed + 7919u * i, amplitude));
  return out;
}

}  // namespace adiabatic
