#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

#include "adiabatic/chart.hpp"

namespace adiabatic {

enum class FullScheme {
  explicit_euler,
  semi_implicit,      // dissipative: linear part implicit, local part explicit
  strang_split,       // schroedinger: Cayley linear step between half phase rotations
  leapfrog,           // canonical pair: velocity Verlet
  implicit_midpoint,  // any kind
  discrete_gradient,  // any kind: averaged vector field, conserves quartic energies exactly
};

std::string_view to_string(FullScheme s);
FullScheme parse_full_scheme(std::string_view s);
bool scheme_compatible(FullScheme s, ModelKind k) noexcept;

struct FullFlowConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  FullScheme scheme = FullScheme::semi_implicit;
  int output_every = 50;
};

/// Largest admissible dt for the scheme (infinity for implicit schemes).
/// Explicit Euler: 0.9 * 2 / lambda_max; leapfrog: 0.9 * 2 / sqrt(lambda_max),
/// with lambda_max = model.stiffness_bound().
double max_stable_dt(const EnergyModel& model, FullScheme scheme);

/// Throws ConfigError unless dt > 0, t_end >= dt (or t_end == 0),
/// output_every >= 1, the scheme fits the model kind and dt respects
/// max_stable_dt.
void validate_config(const FullFlowConfig& cfg, const EnergyModel& model);

inline constexpr double kFixedPointTolerance = 1e-12;
inline constexpr int kFixedPointMaxIterations = 100;

/// Advances the full flow du/dt = J E'(u). Factorizations are built once.
class FullStepper {
 public:
  FullStepper(const EnergyModel& model, FullFlowConfig cfg);
  ~FullStepper();
  FullStepper(FullStepper&&) noexcept;

  const FullFlowConfig& config() const noexcept { return cfg_; }
  long steps_taken() const noexcept { return steps_; }
  /// Fixed-point iterations used by the last implicit step.
  int last_iterations() const noexcept { return last_iterations_; }

  /// One step. Throws BlowUpError on non-finite output, SolverError when the
  /// implicit iteration does not converge.
  StateVector step(const StateVector& u);

 private:
  StateVector step_explicit_euler(const StateVector& u) const;
  StateVector step_semi_implicit(const StateVector& u) const;
  StateVector step_strang(const StateVector& u) const;
  StateVector step_leapfrog(const StateVector& u) const;
  StateVector step_implicit(const StateVector& u, bool averaged);
  Eigen::VectorXd local_part(const StateVector& u) const;  // E'(u) - A u

  const EnergyModel* model_;
  FullFlowConfig cfg_;
  Eigen::SparseMatrix<double> j_;
  Eigen::SparseMatrix<double> rhs_matrix_;  // explicit half of the linear update
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> solver_;
  long steps_ = 0;
  int last_iterations_ = 0;
};

StateVector step_full(const EnergyModel& model, const StateVector& u, const FullFlowConfig& cfg);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
};

/// Called at each snapshot with (step index, time, state); return false to stop.
using SnapshotObserver = std::function<bool(long, double, const StateVector&)>;

/// round(t_end / dt) steps; snapshots at step 0, every output_every steps and
/// at the last step. Returns the number of steps taken.
long run_full(const EnergyModel& model, const StateVector& u0, const FullFlowConfig& cfg,
              const SnapshotObserver& observer);
Trajectory run_full(const EnergyModel& model, const StateVector& u0, const FullFlowConfig& cfg);

enum class EffectiveScheme { rk4, implicit_midpoint };

std::string_view to_string(EffectiveScheme s);
EffectiveScheme parse_effective_scheme(std::string_view s);

struct EffectiveFlowConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  EffectiveScheme scheme = EffectiveScheme::rk4;
};

/// One step of sigma' = effective_velocity(sigma). Throws ChartBoundaryError
/// when a stage leaves the admissible box.
ModuliVector step_effective(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma,
                            const EffectiveFlowConfig& cfg);

/// Effective solution from sigma0 sampled at `times` (nondecreasing, starting
/// at or after 0), using steps no longer than cfg.dt.
std::vector<ModuliVector> integrate_effective(const Chart& chart, const EnergyModel& model,
                                              const ModuliVector& sigma0,
                                              const std::vector<double>& times,
                                              const EffectiveFlowConfig& cfg);

}  // namespace adiabatic
