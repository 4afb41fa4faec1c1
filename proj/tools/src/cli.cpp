#include "adiabatic/cli/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "adiabatic/errors.hpp"
#include "adiabatic/parallel.hpp"
#include "adiabatic/validators.hpp"

namespace adiabatic::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kGradientTolerance = 1e-6;
constexpr double kHessianTolerance = 1e-5;
constexpr int kValidationDirections = 20;
constexpr std::uint64_t kDefaultSeed = 20240917;

void diag(std::ostream& log, const std::string& key, const std::string& value) {
  log << "[diag] " << key << '=' << value << '\n';
}

void diag_block(std::ostream& log, const std::string& prefix, const std::string& kv) {
  std::istringstream in(kv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) log << "[diag] " << prefix << line << '\n';
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw StructuralError("cannot write '" + path.string() + "'");
  return os;
}

void prepare_output(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) {
    throw StructuralError("cannot create output directory '" + cfg.out_dir + "'");
  }
  open_output(fs::path(cfg.out_dir) / "config.ini") << run_config_string(cfg);
}

int workers_for(const RunConfig& cfg) {
  return cfg.workers > 0 ? cfg.workers : default_workers();
}

int command_run(const RunConfig& cfg, std::ostream& log) {
  const ModelBundle b = cfg.bundle();
  const StateVector u0 = make_initial_state(b, b.initial, cfg.perturbation);
  const RunRecord rec = run_experiment(b, u0, b.initial, cfg.experiment());
  {
    auto os = open_output(fs::path(cfg.out_dir) / "run.csv");
    write_run_header(os, rec.moduli_dimension());
    write_run_rows(os, rec);
  }
  diag(log, "snapshots", std::to_string(rec.size()));
  diag(log, "steps", std::to_string(rec.steps));
  diag(log, "M_sup", format_double(rec.M_sup));
  diag(log, "exit_time", rec.exit_time ? format_double(*rec.exit_time) : "none");
  diag(log, "max_residual_22", format_double(rec.max_residual_22()));
  diag(log, "max_sigma_deviation", format_double(rec.max_sigma_deviation()));
  if (rec.stopped_early) diag(log, "stop_reason", rec.stop_reason);
  if (!rec.effective_note.empty()) diag(log, "effective_note", rec.effective_note);

  if (b.model->kind() == ModelKind::dissipative) {
    DissipationOptions opt;
    opt.transient = cfg.transient;
    opt.floor_factor = cfg.floor_factor;
    const DissipationReport rep = dissipation_diagnostics(rec, cfg.budgets, opt);
    diag_block(log, "", rep.to_key_value());
    if (rep.ansatz_violated) {
      diag(log, "claim", "none (ansatz violated)");
      return kExitOk;
    }
    diag(log, "claim", rep.decay_shape() ? "holds" : "fails");
    return rep.decay_shape() ? kExitOk : kExitPropertyFailure;
  }
  ConservationOptions opt;
  opt.alpha = cfg.alpha;
  opt.window_start = cfg.window_start;
  opt.window_end = cfg.window_end;
  const ConservationReport rep = conservation_diagnostics(rec, opt);
  diag_block(log, "", rep.to_key_value());
  const bool ok = rep.energy_conserved && !rec.stopped_early && !rec.exit_time;
  diag(log, "claim", ok ? "holds" : "fails");
  return ok ? kExitOk : kExitPropertyFailure;
}

int command_audit(const RunConfig& cfg, std::ostream& log) {
  const ModelBundle b = cfg.bundle();
  const auto samples = sample_moduli(*b.chart, b.initial, cfg.audit_samples, cfg.audit_spread);
  AuditBudgets budgets;
  budgets.epsilon_budget = cfg.budgets.epsilon_budget;
  budgets.alpha_floor = cfg.budgets.alpha_floor;
  GapOptions gap;
  gap.dense_threshold = cfg.dense_threshold;
  const AuditReport rep = run_audit(*b.chart, *b.model, samples, budgets, gap, workers_for(cfg));
  open_output(fs::path(cfg.out_dir) / "audit.txt") << rep.to_key_value();
  diag_block(log, "", rep.to_key_value());
  return rep.all_pass() ? kExitOk : kExitPropertyFailure;
}

int command_sweep(const RunConfig& cfg, std::ostream& log) {
  const ModelFamily family = [cfg](double eps) { return cfg.bundle(eps); };
  const SweepResult res = scaling_sweep(family, cfg.sweep_epsilons, cfg.perturbation,
                                        cfg.experiment(), workers_for(cfg));
  {
    auto os = open_output(fs::path(cfg.out_dir) / "sweep_summary.csv");
    write_sweep_summary(os, res);
  }
  {
    auto os = open_output(fs::path(cfg.out_dir) / "sweep_fits.csv");
    write_sweep_fits(os, res);
  }
  {
    auto os = open_output(fs::path(cfg.out_dir) / "sweep_runs.csv");
    bool header = false;
    for (const auto& rec : res.records) {
      if (rec.size() == 0) continue;
      if (!header) write_run_header(os, rec.moduli_dimension());
      header = true;
      write_run_rows(os, rec);
    }
  }
  bool failed = false;
  for (const auto& row : res.rows) {
    if (row.failed) {
      failed = true;
      diag(log, "failed_epsilon", format_double(row.epsilon) + " " + row.failure);
    }
  }
  diag(log, "residual_slope", res.residual_fit.describe());
  diag(log, "residual_r2", format_double(res.residual_fit.r_squared()));
  diag(log, "deviation_slope", res.deviation_fit.describe());
  diag(log, "exit_slope", res.exit_fit.describe());
  return failed ? kExitPropertyFailure : kExitOk;
}

int command_validate(const RunConfig& cfg, std::ostream& log) {
  const ModelBundle b = cfg.bundle();
  const std::uint64_t seed = cfg.perturbation.seed.value_or(kDefaultSeed);
  StateVector u = b.chart->eval(b.initial);
  u += random_state(*b.model, seed, 0.1);
  const auto dirs = random_states(*b.model, kValidationDirections, seed + 1);
  const FiniteDifferenceCheck grad = validate_gradient(*b.model, u, dirs);
  const FiniteDifferenceCheck hess = validate_hessian(*b.model, u, dirs);
  const double asym = hessian_asymmetry(*b.model, u, dirs);
  std::ostringstream kv;
  kv << "gradient_max_relative_error=" << format_double(grad.max_relative_error) << '\n'
     << "hessian_max_relative_error=" << format_double(hess.max_relative_error) << '\n'
     << "hessian_asymmetry=" << format_double(asym) << '\n'
     << "directions=" << grad.trials << '\n';
  open_output(fs::path(cfg.out_dir) / "validate.txt") << kv.str();
  diag_block(log, "", kv.str());
  const bool ok = grad.max_relative_error <= kGradientTolerance &&
                  hess.max_relative_error <= kHessianTolerance;
  return ok ? kExitOk : kExitPropertyFailure;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& log) {
  validate_run_config(cfg);
  prepare_output(cfg);
  diag(log, "command", std::string(to_string(cfg.command)));
  diag(log, "model", cfg.model);
  diag(log, "epsilon", format_double(cfg.epsilon));
  switch (cfg.command) {
    case Command::run: return command_run(cfg, log);
    case Command::audit: return command_audit(cfg, log);
    case Command::sweep: return command_sweep(cfg, log);
    case Command::validate: return command_validate(cfg, log);
  }
  return kExitStructural;
}

int run_cli(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
  CLI::App app{"Adiabatic moduli-space experiments"};
  std::string config_path, command, out_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Config file")->required()->envname("ADIABATIC_CONFIG");
  app.add_option("--command", command, "run | audit | sweep | validate")
      ->envname("ADIABATIC_COMMAND");
  app.add_option("--out", out_dir, "Output directory")->envname("ADIABATIC_OUT");
  app.add_option("--workers", workers, "Worker threads (0: all cores)")
      ->envname("ADIABATIC_WORKERS");
  app.add_option("--seed", seed, "Perturbation seed")->envname("ADIABATIC_SEED");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, log, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, log, err);
    return kExitStructural;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    if (!command.empty()) cfg.command = parse_command(command);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers) cfg.workers = *workers;
    if (seed) cfg.perturbation.seed = *seed;
    return execute(cfg, log);
  } catch (const TubeExitError& e) {
    err << "[error] tube exit: " << e.what() << '\n';
    return kExitPropertyFailure;
  } catch (const std::exception& e) {
    err << "[error] " << e.what() << '\n';
    return kExitStructural;
  }
}

}  // namespace adiabatic::cli
