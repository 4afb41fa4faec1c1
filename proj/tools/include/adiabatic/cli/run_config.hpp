#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adiabatic/audit.hpp"
#include "adiabatic/harness.hpp"
#include "adiabatic/models.hpp"

namespace adiabatic::cli {

enum class Command { run, audit, sweep, validate };

std::string_view to_string(Command c);
Command parse_command(std::string_view s);

/// Everything one invocation needs. Defaults match the documented schema.
struct RunConfig {
  Command command = Command::run;
  int workers = 0;  // 0: available parallelism

  // [model]
  std::string model = "allen-cahn-kink";
  double epsilon = 0.0;
  double length = 40.0;
  int points = 512;
  std::optional<Boundary> boundary;  // model default when unset
  PotentialShape potential = PotentialShape::none;
  ModelOptions options;

  // [chart]
  std::optional<AdmissibleBox> chart_box;

  // [full], [effective]
  FullFlowConfig full;
  EffectiveScheme effective_scheme = EffectiveScheme::rk4;
  double effective_dt = 1e-2;

  // [budgets], [perturbation]
  Budgets budgets;
  PerturbationSpec perturbation;

  // [diagnostics]
  double transient = 0.25;
  double floor_factor = 20.0;
  double alpha = 0.0;
  double window_start = 10.0;
  double window_end = 50.0;

  // [audit]
  int audit_samples = 5;
  double audit_spread = 2.0;
  int dense_threshold = 1024;

  // [sweep]
  std::vector<double> sweep_epsilons;

  // [output]
  std::string out_dir = "out";
  std::string run_id = "run";

  Boundary effective_boundary() const;
  Grid1D grid() const;
  /// Model bundle at this config's epsilon (or `epsilon` when given).
  ModelBundle bundle(std::optional<double> epsilon = std::nullopt) const;
  ExperimentConfig experiment() const;
};

/// Parses the flat sectioned key = value format. Errors carry the line
/// number; unknown sections and keys are rejected by name.
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_string(std::string_view text);
RunConfig load_run_config(const std::string& path);

/// Checks cross-field invariants (scheme/kind compatibility, amplitude below
/// the tube radius, seed for random perturbations, sweep size). Throws ConfigError.
void validate_run_config(const RunConfig& cfg);

/// Every field, defaults filled in; parse_run_config reads it back unchanged.
void write_run_config(std::ostream& os, const RunConfig& cfg);
std::string run_config_string(const RunConfig& cfg);

}  // namespace adiabatic::cli
