#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adiabatic/energy_model.hpp"

namespace adiabatic {

inline constexpr double kFiniteDifferenceStep = 1e-5;

struct FiniteDifferenceCheck {
  double max_relative_error = 0.0;
  int trials = 0;
};

/// Compares <E'(u), h> with (E(u + tau h) - E(u - tau h)) / (2 tau) for each h.
/// Errors are scaled by ||E'(u)|| ||h||, the natural size of the derivative.
FiniteDifferenceCheck validate_gradient(const EnergyModel& model, const StateVector& u,
                                        std::span<const StateVector> directions,
                                        double tau = kFiniteDifferenceStep);

/// Compares L_u h with (E'(u + tau h) - E'(u - tau h)) / (2 tau), relative to ||L_u h||.
FiniteDifferenceCheck validate_hessian(const EnergyModel& model, const StateVector& u,
                                       std::span<const StateVector> directions,
                                       double tau = kFiniteDifferenceStep);

/// Max over consecutive pairs (a, b) of |<L a, b> - <a, L b>| / (||a|| ||b||).
double hessian_asymmetry(const EnergyModel& model, const StateVector& u,
                         std::span<const StateVector> directions);

/// Uniform random entries in [-amplitude, amplitude]; reproducible per seed.
StateVector random_state(const EnergyModel& model, std::uint64_t seed, double amplitude = 1.0);
std::vector<StateVector> random_states(const EnergyModel& model, int count, std::uint64_t seed,
                                       double amplitude = 1.0);

}  // namespace adiabatic
