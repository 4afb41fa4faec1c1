#include "adiabatic/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "adiabatic/errors.hpp"
#include "adiabatic/parallel.hpp"

namespace adiabatic {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view to_string(PerturbationMode m) {
  switch (m) {
    case PerturbationMode::none: return "none";
    case PerturbationMode::bump: return "bump";
    case PerturbationMode::random_orthogonal: return "random-orthogonal";
  }
  return "?";
}

PerturbationMode parse_perturbation_mode(std::string_view s) {
  if (s == "none") return PerturbationMode::none;
  if (s == "bump") return PerturbationMode::bump;
  if (s == "random-orthogonal") return PerturbationMode::random_orthogonal;
  throw ConfigError("unknown perturbation mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Initial data

StateVector make_initial_state(const ModelBundle& bundle, const ModuliVector& sigma0,
                               const PerturbationSpec& spec) {
  const Chart& chart = *bundle.chart;
  const EnergyModel& model = *bundle.model;
  chart.check_admissible(sigma0);
  StateVector u = chart.eval(sigma0);
  if (spec.mode == PerturbationMode::none || spec.amplitude == 0.0) return u;
  if (!(spec.amplitude > 0.0)) throw ConfigError("perturbation amplitude must be nonnegative");

  const Grid1D& grid = model.grid();
  const int n = grid.num_points();
  const int comps = components(model.value_kind());
  const double centre = sigma0[0];
  StateVector psi = u.zeros_like();
  if (spec.mode == PerturbationMode::bump) {
    for (int i = 0; i < n; ++i) {
      const double y = grid.offset(i, centre + spec.offset) / spec.width;
      const double b = std::exp(-0.5 * y * y);
      if (model.value_kind() == ValueKind::complex) psi[2 * i] = b;
      else psi[i] = b;
    }
  } else {
    if (!spec.seed) throw ConfigError("random-orthogonal perturbation needs a seed");
    std::mt19937_64 rng(*spec.seed);
    std::normal_distribution<double> normal;
    constexpr int kModes = 8;
    for (int c = 0; c < comps; ++c) {
      double coef[kModes], phase[kModes];
      for (int k = 0; k < kModes; ++k) {
        coef[k] = normal(rng) / (k + 1);
        phase[k] = 2.0 * 3.141592653589793 * std::uniform_real_distribution<double>()(rng);
      }
      for (int i = 0; i < n; ++i) {
        const double y = grid.offset(i, centre);
        double s = 0.0;
        for (int k = 0; k < kModes; ++k) s += coef[k] * std::sin(0.5 * (k + 1) * y + phase[k]);
        const double v = std::exp(-y * y / 32.0) * s;
        if (model.value_kind() == ValueKind::complex) psi[2 * i + c] = v;
        else psi[static_cast<Eigen::Index>(c) * n + i] = v;
      }
    }
  }
  StateVector phi = psi - projector_apply(chart, model, sigma0, psi);
  const double size = norm(phi);
  if (!(size > 0.0)) throw ConfigError("perturbation vanishes after removing tangent directions");
  phi *= spec.amplitude / size;
  return u + phi;
}

// ---------------------------------------------------------------------------
// Derivatives

std::vector<Eigen::VectorXd> time_derivative(const std::vector<double>& t,
                                             const std::vector<Eigen::VectorXd>& x) {
  if (t.size() != x.size()) throw StructuralError("time_derivative: size mismatch");
  const size_t n = t.size();
  std::vector<Eigen::VectorXd> d(n);
  if (n == 0) return d;
  if (n == 1) {
    d[0] = Eigen::VectorXd::Zero(x[0].size());
    return d;
  }
  if (n == 2) {
    d[0] = d[1] = (x[1] - x[0]) / (t[1] - t[0]);
    return d;
  }
  // Derivative at `at` of the quadratic through three points.
  auto lagrange = [&](size_t a, double at) {
    const size_t idx[3] = {a, a + 1, a + 2};
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x[a].size());
    for (int j = 0; j < 3; ++j) {
      double denom = 1.0, numer = 0.0;
      for (int m = 0; m < 3; ++m) {
        if (m == j) continue;
        denom *= t[idx[j]] - t[idx[m]];
        double prod = 1.0;
        for (int q = 0; q < 3; ++q) {
          if (q != j && q != m) prod *= at - t[idx[q]];
        }
        numer += prod;
      }
      out += (numer / denom) * x[idx[j]];
    }
    return out;
  };
  d[0] = lagrange(0, t[0]);
  for (size_t i = 1; i + 1 < n; ++i) d[i] = lagrange(i - 1, t[i]);
  d[n - 1] = lagrange(n - 3, t[n - 1]);
  return d;
}

// ---------------------------------------------------------------------------
// RunRecord

double RunRecord::max_sigma_deviation(double t_max) const {
  double worst = 0.0;
  for (size_t i = 0; i < sigma_path.size() && i < sigma_eff_path.size(); ++i) {
    if (i < times.size() && times[i] > t_max) break;
    const double d = (sigma_path[i] - sigma_eff_path[i]).norm();
    if (std::isfinite(d)) worst = std::max(worst, d);
  }
  return worst;
}

double RunRecord::max_residual_22() const {
  double worst = 0.0;
  for (double r : residual_22) {
    if (std::isfinite(r)) worst = std::max(worst, r);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Experiment

RunRecord run_experiment(const ModelBundle& bundle, const StateVector& u0,
                         const ModuliVector& sigma_guess, const ExperimentConfig& cfg) {
  const Chart& chart = *bundle.chart;
  const EnergyModel& model = *bundle.model;
  model.check_state(u0);
  u0.check_finite();
  validate_config(cfg.full, model);
  if (!(cfg.effective.dt > 0.0)) throw ConfigError("effective dt must be positive");

  ProjectionOptions popts = cfg.projection;
  popts.tube_radius = std::min(popts.tube_radius, cfg.budgets.tube_radius);

  RunRecord rec;
  rec.run_id = cfg.run_id;
  rec.kind = model.kind();
  rec.epsilon = bundle.spec.epsilon;

  ModuliVector sigma = sigma_guess;
  try {
    sigma = project_to_moduli(chart, model, u0, sigma_guess, popts).sigma;
  } catch (const TubeExitError& e) {
    throw TubeExitError(std::string("initial data outside the tube: ") + e.what());
  } catch (const ChartBoundaryError& e) {
    throw TubeExitError(std::string("initial data outside the tube: ") + e.what());
  }
  const ModuliVector sigma0 = sigma;
  std::vector<Eigen::VectorXd> velocities;

  // Returns false when the run must stop.
  auto snapshot = [&](double t, const StateVector& u) {
    try {
      sigma = project_to_moduli(chart, model, u, sigma, popts).sigma;
    } catch (const Error& e) {
      const bool tube = dynamic_cast<const TubeExitError*>(&e) ||
                        dynamic_cast<const ChartBoundaryError*>(&e) ||
                        dynamic_cast<const DegenerateProjectionError*>(&e) ||
                        dynamic_cast<const ChartDegeneracyError*>(&e);
      if (!tube) throw;
      if (static_cast<int>(rec.times.size()) < cfg.early_exit_snapshots) {
        throw TubeExitError("tube exit after " + std::to_string(rec.times.size()) +
                            " snapshots (t = " + format_double(t) + "): " + e.what());
      }
      rec.stopped_early = true;
      rec.stop_reason = e.what();
      if (!rec.exit_time) rec.exit_time = t;
      return false;
    }
    const ChartFrame frame(chart, model, sigma);
    const StateVector& v = frame.point();
    const StateVector w = u - v;
    const double wn = norm(w);
    const Eigen::VectorXd vel = effective_velocity(frame, model);
    rec.times.push_back(t);
    rec.w_norm.push_back(wn);
    rec.lyapunov.push_back(inner_product(model.hessian_apply(v, w), w));
    rec.nonlinear_ratio.push_back(wn > 0.0 ? norm(nonlinear_remainder(model, v, w)) / (wn * wn)
                                           : 0.0);
    rec.sigma_path.push_back(sigma.coords);
    rec.effective_speed.push_back(vel.norm());
    rec.energy_full.push_back(model.energy(u));
    rec.energy_pullback.push_back(model.energy(v));
    velocities.push_back(vel);
    if (wn >= cfg.budgets.epsilon_budget && !rec.exit_time) rec.exit_time = t;
    return true;
  };

  FullStepper stepper(model, cfg.full);
  const long total = cfg.full.t_end == 0.0 ? 0 : std::lround(cfg.full.t_end / cfg.full.dt);
  StateVector u = u0;
  double e_prev = model.energy(u);
  if (snapshot(0.0, u)) {
    for (long k = 1; k <= total; ++k) {
      u = stepper.step(u);
      const double e = model.energy(u);
      rec.max_step_energy_increase = std::max(rec.max_step_energy_increase, e - e_prev);
      e_prev = e;
      rec.steps = k;
      if ((k % cfg.full.output_every == 0 || k == total) && !snapshot(k * cfg.full.dt, u)) break;
    }
  }

  // Effective path from the same initial moduli, sampled at the snapshot times.
  ModuliVector s = sigma0;
  double t_prev = 0.0;
  for (size_t i = 0; i < rec.times.size(); ++i) {
    if (rec.effective_note.empty()) {
      try {
        if (rec.times[i] > t_prev) {
          s = integrate_effective(chart, model, s, {rec.times[i] - t_prev}, cfg.effective).back();
        }
      } catch (const Error& e) {
        rec.effective_note = std::string("effective path stopped at t = ") +
                             format_double(t_prev) + ": " + e.what();
      }
    }
    t_prev = rec.times[i];
    rec.sigma_eff_path.push_back(
        rec.effective_note.empty()
            ? s.coords
            : Eigen::VectorXd::Constant(s.dimension(), std::numeric_limits<double>::quiet_NaN()));
  }

  const std::vector<Eigen::VectorXd> sdot = time_derivative(rec.times, rec.sigma_path);
  for (size_t i = 0; i < sdot.size(); ++i) {
    rec.sigma_dot_norm.push_back(sdot[i].norm());
    rec.residual_22.push_back((sdot[i] - velocities[i]).norm());
  }
  rec.M_sup = rec.w_norm.empty() ? 0.0 : *std::max_element(rec.w_norm.begin(), rec.w_norm.end());
  return rec;
}

// ---------------------------------------------------------------------------
// Diagnostics

DissipationReport dissipation_diagnostics(const RunRecord& record, const Budgets& budgets,
                                          const DissipationOptions& options) {
  if (record.kind != ModelKind::dissipative) {
    throw KindError("dissipation diagnostics need a dissipative record");
  }
  DissipationReport rep;
  const size_t n = record.size();
  if (n == 0) {
    rep.degenerate_fit = true;
    return rep;
  }
  const size_t tail = std::max<size_t>(1, n / 10);
  rep.lyapunov_floor =
      std::accumulate(record.lyapunov.end() - static_cast<long>(tail), record.lyapunov.end(), 0.0) /
      static_cast<double>(tail);
  const double floor = std::max(rep.lyapunov_floor, 0.0);

  std::vector<double> ts, ls;
  bool started = false;
  for (size_t i = 0; i < n; ++i) {
    if (record.times[i] < options.transient) continue;
    const double l = record.lyapunov[i];
    const bool ok = l >= options.floor_factor * floor && l >= options.absolute_floor && l > floor;
    if (!ok) {
      if (started) break;
      continue;
    }
    started = true;
    ts.push_back(record.times[i]);
    ls.push_back(std::log(l - floor));
  }
  rep.fit_points = static_cast<int>(ts.size());
  if (rep.fit_points < options.min_points) {
    rep.degenerate_fit = true;
  } else {
    const LinearFit f = fit_linear(ts, ls);
    rep.gamma = -0.5 * f.slope;
    rep.gamma_r2 = f.r_squared;
  }

  rep.fitted_C = record.M_sup / (record.w_norm.front() + budgets.epsilon_budget);
  const double bound = 0.5 * budgets.ansatz_beta;
  for (size_t i = 0; i < n; ++i) {
    if (record.sigma_dot_norm[i] + record.w_norm[i] > bound) {
      rep.ansatz_violated = true;
      rep.ansatz_violation_time = record.times[i];
      break;
    }
  }
  rep.energy_monotone = record.max_step_energy_increase <= options.energy_tolerance;
  rep.min_lyapunov = *std::min_element(record.lyapunov.begin(), record.lyapunov.end());
  rep.lyapunov_nonnegative = rep.min_lyapunov >= -1e-8;
  rep.tube_exit = record.stopped_early;
  for (size_t i = 0; i < n; ++i) {
    if (record.times[i] >= options.transient && record.w_norm[i] >= budgets.epsilon_budget) {
      rep.tube_exit = true;
    }
  }
  return rep;
}

std::string DissipationReport::to_key_value() const {
  std::ostringstream os;
  os << "gamma=" << (gamma ? format_double(*gamma) : std::string("degenerate fit")) << '\n'
     << "gamma_r2=" << format_double(gamma_r2) << '\n'
     << "fit_points=" << fit_points << '\n'
     << "lyapunov_floor=" << format_double(lyapunov_floor) << '\n'
     << "fitted_C=" << format_double(fitted_C) << '\n'
     << "ansatz_violated=" << (ansatz_violated ? 1 : 0) << '\n'
     << "energy_monotone=" << (energy_monotone ? 1 : 0) << '\n'
     << "min_lyapunov=" << format_double(min_lyapunov) << '\n'
     << "tube_exit=" << (tube_exit ? 1 : 0) << '\n'
     << "decay_shape=" << (decay_shape() ? 1 : 0) << '\n';
  return os.str();
}

ConservationReport conservation_diagnostics(const RunRecord& record,
                                            const ConservationOptions& options) {
  if (record.kind == ModelKind::dissipative) {
    throw KindError("conservation diagnostics need a symplectic record");
  }
  ConservationReport rep;
  const size_t n = record.size();
  if (n == 0) return rep;
  const double e0 = record.energy_full.front();
  const double scale = std::max(std::abs(e0), 1e-300);
  const double p0 = record.energy_pullback.front();
  const double eps = record.epsilon;
  double m = 0.0;
  std::vector<double> window;
  for (size_t i = 0; i < n; ++i) {
    rep.energy_drift = std::max(rep.energy_drift, std::abs(record.energy_full[i] - e0) / scale);
    const double drift = std::abs(record.energy_pullback[i] - p0);
    rep.pullback_drift = std::max(rep.pullback_drift, drift);
    m = std::max(m, record.w_norm[i]);
    const double rhs =
        record.times[i] * (eps * eps * m + std::pow(eps, options.alpha) * m * m);
    const double r = rhs > 0.0 ? drift / rhs : std::numeric_limits<double>::quiet_NaN();
    rep.ratio.push_back(r);
    if (record.times[i] >= options.window_start && record.times[i] <= options.window_end &&
        std::isfinite(r)) {
      window.push_back(r);
    }
  }
  rep.energy_conserved = rep.energy_drift <= options.energy_tolerance;
  if (!window.empty()) {
    rep.ratio_min = *std::min_element(window.begin(), window.end());
    rep.ratio_max = *std::max_element(window.begin(), window.end());
    std::vector<double> sorted = window;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2),
                     sorted.end());
    rep.ratio_median = sorted[sorted.size() / 2];
    rep.ratio_stable = rep.ratio_min >= 0.5 * rep.ratio_median &&
                       rep.ratio_max <= 1.5 * rep.ratio_median;
    rep.fitted_constant = rep.ratio_max;
  }
  rep.c_fitted = (record.exit_time ? *record.exit_time : record.times.back()) * eps;
  return rep;
}

std::string ConservationReport::to_key_value() const {
  std::ostringstream os;
  os << "energy_drift=" << format_double(energy_drift) << '\n'
     << "energy_conserved=" << (energy_conserved ? 1 : 0) << '\n'
     << "pullback_drift=" << format_double(pullback_drift) << '\n'
     << "ratio_min=" << format_double(ratio_min) << '\n'
     << "ratio_median=" << format_double(ratio_median) << '\n'
     << "ratio_max=" << format_double(ratio_max) << '\n'
     << "ratio_stable=" << (ratio_stable ? 1 : 0) << '\n'
     << "fitted_constant=" << format_double(fitted_constant) << '\n'
     << "c_fitted=" << format_double(c_fitted) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Sweep

SweepResult scaling_sweep(const ModelFamily& family, const std::vector<double>& epsilons,
                          const PerturbationSpec& perturbation, const ExperimentConfig& cfg,
                          int workers) {
  if (epsilons.size() < 3) throw ConfigError("at least 3 epsilon values required");
  struct Outcome {
    SweepRow row;
    RunRecord record;
  };
  std::vector<Outcome> outcomes = parallel_map<Outcome>(
      static_cast<int>(epsilons.size()), workers, [&](int i) {
        Outcome o;
        o.row.epsilon = epsilons[i];
        try {
          const ModelBundle b = family(epsilons[i]);
          const StateVector u0 = make_initial_state(b, b.initial, perturbation);
          ExperimentConfig c = cfg;
          c.run_id = cfg.run_id + "-eps" + format_double(epsilons[i]);
          o.record = run_experiment(b, u0, b.initial, c);
          o.row.M_sup = o.record.M_sup;
          o.row.exit_time = o.record.exit_time;
          o.row.max_residual_22 = o.record.max_residual_22();
          o.row.max_sigma_deviation = o.record.max_sigma_deviation();
        } catch (const std::exception& e) {
          o.row.failed = true;
          o.row.failure = e.what();
        }
        return o;
      });
  SweepResult res;
  std::vector<double> eps, resid, dev, exit;
  for (auto& o : outcomes) {
    if (!o.row.failed) {
      eps.push_back(o.row.epsilon);
      resid.push_back(o.row.max_residual_22);
      dev.push_back(o.row.max_sigma_deviation);
      exit.push_back(o.row.exit_time ? *o.row.exit_time : std::numeric_limits<double>::quiet_NaN());
    }
    res.rows.push_back(std::move(o.row));
    res.records.push_back(std::move(o.record));
  }
  res.residual_fit = fit_log_log(eps, resid);
  res.deviation_fit = fit_log_log(eps, dev);
  res.exit_fit = fit_log_log(eps, exit, 0.0);
  return res;
}

// ---------------------------------------------------------------------------
// CSV

void write_run_header(std::ostream& os, int k) {
  os << "run_id,t,w_norm,lyapunov";
  for (int i = 1; i <= k; ++i) os << ",sigma_" << i;
  for (int i = 1; i <= k; ++i) os << ",sigma_eff_" << i;
  os << ",residual_22,energy_full,energy_pullback\n";
}

void write_run_rows(std::ostream& os, const RunRecord& r) {
  for (size_t i = 0; i < r.size(); ++i) {
    os << r.run_id << ',' << format_double(r.times[i]) << ',' << format_double(r.w_norm[i]) << ','
       << format_double(r.lyapunov[i]);
    for (Eigen::Index j = 0; j < r.sigma_path[i].size(); ++j) os << ',' << format_double(r.sigma_path[i][j]);
    for (Eigen::Index j = 0; j < r.sigma_eff_path[i].size(); ++j) {
      os << ',' << format_double(r.sigma_eff_path[i][j]);
    }
    os << ',' << format_double(r.residual_22[i]) << ',' << format_double(r.energy_full[i]) << ','
       << format_double(r.energy_pullback[i]) << '\n';
  }
}

void write_sweep_summary(std::ostream& os, const SweepResult& res) {
  os << "epsilon,M_sup,exit_time,max_residual_22,max_sigma_deviation,status\n";
  for (const SweepRow& r : res.rows) {
    os << format_double(r.epsilon) << ',' << format_double(r.M_sup) << ','
       << (r.exit_time ? format_double(*r.exit_time) : std::string("none")) << ','
       << format_double(r.max_residual_22) << ',' << format_double(r.max_sigma_deviation) << ',';
    if (r.failed) {
      std::string msg = r.failure;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      os << "failed: " << msg << '\n';
    } else {
      os << "ok\n";
    }
  }
}

void write_sweep_fits(std::ostream& os, const SweepResult& res) {
  os << "quantity,slope,r_squared,points\n";
  auto row = [&](const char* name, const LogLogFit& f) {
    os << name << ',' << f.describe() << ',' << format_double(f.r_squared()) << ','
       << f.line.points << '\n';
  };
  row("max_residual_22", res.residual_fit);
  row("max_sigma_deviation", res.deviation_fit);
  row("exit_time", res.exit_fit);
}

}  // namespace adiabatic
