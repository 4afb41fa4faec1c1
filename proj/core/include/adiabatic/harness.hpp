#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adiabatic/integrators.hpp"
#include "adiabatic/models.hpp"
#include "adiabatic/regression.hpp"

namespace adiabatic {

struct Budgets {
  double epsilon_budget = 0.25;
  double alpha_floor = 1.0;
  double tube_radius = 0.5;  // delta
  double ansatz_beta = 0.5;  // ansatz ||sigma_dot|| + ||w|| <= beta / 2
};

enum class PerturbationMode { none, bump, random_orthogonal };

std::string_view to_string(PerturbationMode m);
PerturbationMode parse_perturbation_mode(std::string_view s);

struct PerturbationSpec {
  PerturbationMode mode = PerturbationMode::none;
  double amplitude = 0.0;  // L2 norm of the transverse perturbation
  std::optional<std::uint64_t> seed;
  double offset = 1.25;  // bump centre relative to sigma[0]
  double width = 1.0;
};

/// f(sigma0) + phi, where phi = (I - Q_sigma0) psi rescaled to ||phi|| = amplitude.
/// The bump psi is a Gaussian next to the soliton; random-orthogonal uses
/// seeded sine modes under a Gaussian envelope.
StateVector make_initial_state(const ModelBundle& bundle, const ModuliVector& sigma0,
                               const PerturbationSpec& spec);

struct ExperimentConfig {
  std::string run_id = "run";
  FullFlowConfig full;
  EffectiveFlowConfig effective;
  Budgets budgets;
  ProjectionOptions projection;
  int early_exit_snapshots = 10;  // projection failure before this many snapshots is an error
};

struct RunRecord {
  std::string run_id;
  ModelKind kind = ModelKind::dissipative;
  double epsilon = 0.0;
  std::vector<double> times;
  std::vector<double> w_norm;
  std::vector<double> lyapunov;         // <L_sigma w, w>
  std::vector<double> nonlinear_ratio;  // ||N_v(w)|| / ||w||^2 (0 when w = 0)
  std::vector<Eigen::VectorXd> sigma_path;
  std::vector<Eigen::VectorXd> sigma_eff_path;
  std::vector<double> residual_22;  // ||sigma_dot - J^{-1} E'(sigma)||
  std::vector<double> sigma_dot_norm;
  std::vector<double> effective_speed;  // ||J^{-1} E'(sigma)||
  std::vector<double> energy_full;
  std::vector<double> energy_pullback;
  double M_sup = 0.0;
  std::optional<double> exit_time;  // first t with ||w|| >= epsilon_budget
  double max_step_energy_increase = 0.0;  // over every full step
  long steps = 0;
  bool stopped_early = false;
  std::string stop_reason;
  std::string effective_note;  // set when the effective path left the chart

  std::size_t size() const noexcept { return times.size(); }
  int moduli_dimension() const noexcept {
    return sigma_path.empty() ? 0 : static_cast<int>(sigma_path.front().size());
  }
  /// max over snapshots with t <= t_max of ||sigma_path - sigma_eff_path|| (finite entries).
  double max_sigma_deviation(double t_max = std::numeric_limits<double>::infinity()) const;
  double max_residual_22() const;
};

/// Runs the full flow from u0, projects every snapshot (warm-started from
/// sigma_guess), integrates the effective ODE from the initial projection and
/// collects the diagnostics.
///
/// Throws TubeExitError when u0 cannot be projected or the projection fails
/// within the first early_exit_snapshots snapshots; later failures stop the
/// run with stopped_early set.
RunRecord run_experiment(const ModelBundle& bundle, const StateVector& u0,
                         const ModuliVector& sigma_guess, const ExperimentConfig& cfg);

/// d sigma/dt on a nonuniform time grid: three-point central differences
/// inside, three-point one-sided at the ends.
std::vector<Eigen::VectorXd> time_derivative(const std::vector<double>& t,
                                             const std::vector<Eigen::VectorXd>& x);

struct DissipationReport {
  std::optional<double> gamma;  // decay rate of sqrt(<L w, w>)
  double gamma_r2 = 0.0;
  int fit_points = 0;
  bool degenerate_fit = false;
  double lyapunov_floor = 0.0;
  double fitted_C = 0.0;  // M_sup / (w_norm[0] + epsilon_budget)
  bool ansatz_violated = false;
  std::optional<double> ansatz_violation_time;
  bool energy_monotone = true;  // per-step increase <= 1e-10
  double min_lyapunov = 0.0;
  bool lyapunov_nonnegative = true;  // >= -1e-8
  bool tube_exit = false;
  /// In-regime decay shape: no exit, monotone energy, ansatz held.
  bool decay_shape() const noexcept {
    return !ansatz_violated && !tube_exit && energy_monotone && lyapunov_nonnegative;
  }
  std::string to_key_value() const;
};

struct DissipationOptions {
  double transient = 0.25;      // ignore t < transient in the fit
  double floor_factor = 20.0;   // fit only where lyapunov >= floor_factor * floor
  double absolute_floor = 1e-14;
  int min_points = 5;
  double energy_tolerance = 1e-10;  // per full step
};

/// Throws KindError for non-dissipative records.
DissipationReport dissipation_diagnostics(const RunRecord& record, const Budgets& budgets,
                                          const DissipationOptions& options = {});

struct ConservationReport {
  double energy_drift = 0.0;  // max |E(t) - E(0)| / |E(0)|
  bool energy_conserved = false;
  double pullback_drift = 0.0;  // max |E(f(sigma_t)) - E(f(sigma_0))|
  std::vector<double> ratio;    // pullback drift / (t (eps^2 M + eps^alpha M^2)) per snapshot
  double ratio_min = 0.0, ratio_max = 0.0, ratio_median = 0.0;
  bool ratio_stable = false;  // all window ratios within +-50% of the median
  double fitted_constant = 0.0;  // max ratio in the window
  double c_fitted = 0.0;  // (exit time or last time) * epsilon
  std::string to_key_value() const;
};

struct ConservationOptions {
  double alpha = 0.0;
  double window_start = 10.0;
  double window_end = 50.0;
  double energy_tolerance = 1e-8;
};

/// Throws KindError for dissipative records.
ConservationReport conservation_diagnostics(const RunRecord& record,
                                            const ConservationOptions& options = {});

struct SweepRow {
  double epsilon = 0.0;
  double M_sup = 0.0;
  std::optional<double> exit_time;
  double max_residual_22 = 0.0;
  double max_sigma_deviation = 0.0;
  bool failed = false;
  std::string failure;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<RunRecord> records;  // same order as rows; empty record on failure
  LogLogFit residual_fit, deviation_fit, exit_fit;
};

/// Builds one bundle per epsilon, perturbs, runs and fits. Failing runs are
/// annotated rather than thrown. Needs at least 3 epsilon values (ConfigError).
SweepResult scaling_sweep(const ModelFamily& family, const std::vector<double>& epsilons,
                          const PerturbationSpec& perturbation, const ExperimentConfig& cfg,
                          int workers = 0);

/// Runs CSV: one row per snapshot.
void write_run_header(std::ostream& os, int moduli_dimension);
void write_run_rows(std::ostream& os, const RunRecord& record);
void write_sweep_summary(std::ostream& os, const SweepResult& result);
void write_sweep_fits(std::ostream& os, const SweepResult& result);

/// printf("%.17g") of v; "nan"/"inf" for non-finite values.
std::string format_double(double v);

}  // namespace adiabatic
