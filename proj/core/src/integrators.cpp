#include "adiabatic/integrators.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "adiabatic/errors.hpp"

namespace adiabatic {

std::string_view to_string(FullScheme s) {
  switch (s) {
    case FullScheme::explicit_euler: return "explicit-euler";
    case FullScheme::semi_implicit: return "semi-implicit";
    case FullScheme::strang_split: return "strang-split";
    case FullScheme::leapfrog: return "leapfrog";
    case FullScheme::implicit_midpoint: return "implicit-midpoint";
    case FullScheme::discrete_gradient: return "discrete-gradient";
  }
  return "?";
}

FullScheme parse_full_scheme(std::string_view s) {
  for (FullScheme f : {FullScheme::explicit_euler, FullScheme::semi_implicit,
                       FullScheme::strang_split, FullScheme::leapfrog,
                       FullScheme::implicit_midpoint, FullScheme::discrete_gradient}) {
    if (s == to_string(f)) return f;
  }
  throw ConfigError("unknown full-flow scheme '" + std::string(s) + "'");
}

bool scheme_compatible(FullScheme s, ModelKind k) noexcept {
  switch (s) {
    case FullScheme::semi_implicit: return k == ModelKind::dissipative;
    case FullScheme::strang_split: return k == ModelKind::schroedinger;
    case FullScheme::leapfrog: return k == ModelKind::canonical_pair;
    default: return true;
  }
}

double max_stable_dt(const EnergyModel& model, FullScheme scheme) {
  const double lambda = model.stiffness_bound();
  if (scheme == FullScheme::explicit_euler) return 0.9 * 2.0 / lambda;
  if (scheme == FullScheme::leapfrog) return 0.9 * 2.0 / std::sqrt(lambda);
  return std::numeric_limits<double>::infinity();
}

void validate_config(const FullFlowConfig& cfg, const EnergyModel& model) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive");
  if (!(cfg.t_end == 0.0 || cfg.t_end >= cfg.dt) || !std::isfinite(cfg.t_end)) {
    throw ConfigError("t_end must be 0 or at least dt");
  }
  if (cfg.output_every < 1) throw ConfigError("output_every must be a positive integer");
  if (!scheme_compatible(cfg.scheme, model.kind())) {
    throw ConfigError("scheme " + std::string(to_string(cfg.scheme)) +
                      " is not available for kind " + std::string(to_string(model.kind())));
  }
  const double limit = max_stable_dt(model, cfg.scheme);
  if (cfg.dt > limit) {
    throw ConfigError("dt = " + std::to_string(cfg.dt) + " exceeds the stability limit " +
                      std::to_string(limit) + " of " + std::string(to_string(cfg.scheme)));
  }
  if (cfg.scheme == FullScheme::strang_split && !model.local_phase_rate(model.zero_state())) {
    throw ConfigError("strang-split needs a model with a local phase rate");
  }
}

// ---------------------------------------------------------------------------
// FullStepper

namespace {

Eigen::SparseMatrix<double> identity(Eigen::Index n) {
  Eigen::SparseMatrix<double> i(n, n);
  i.setIdentity();
  return i;
}

void factorize(Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu, Eigen::SparseMatrix<double> m) {
  m.makeCompressed();
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) throw SolverError("sparse factorization failed: " + lu.lastErrorMessage());
}

// Gauss-Legendre nodes and weights on [0, 1]; exact for degree 5.
constexpr double kGaussNodes[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double kGaussWeights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

FullStepper::FullStepper(const EnergyModel& model, FullFlowConfig cfg)
    : model_(&model), cfg_(cfg) {
  validate_config(cfg_, model);
  const Eigen::Index n = model.zero_state().size();
  const Eigen::SparseMatrix<double>& a = model.linear_part();
  j_ = structure_matrix(model.kind(), model.grid());
  const double dt = cfg_.dt;
  switch (cfg_.scheme) {
    case FullScheme::semi_implicit: {
      solver_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
      factorize(*solver_, identity(n) + dt * a);
      break;
    }
    case FullScheme::strang_split:
    case FullScheme::implicit_midpoint:
    case FullScheme::discrete_gradient: {
      const Eigen::SparseMatrix<double> k = j_ * a;
      solver_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
      factorize(*solver_, identity(n) - 0.5 * dt * k);
      rhs_matrix_ = identity(n) + 0.5 * dt * k;
      break;
    }
    default: break;
  }
}

FullStepper::~FullStepper() = default;
FullStepper::FullStepper(FullStepper&&) noexcept = default;

Eigen::VectorXd FullStepper::local_part(const StateVector& u) const {
  return model_->gradient(u).values() - model_->linear_part() * u.values();
}

StateVector FullStepper::step(const StateVector& u) {
  model_->check_state(u);
  StateVector next = u;
  ++steps_;
  try {
    switch (cfg_.scheme) {
      case FullScheme::explicit_euler: next = step_explicit_euler(u); break;
      case FullScheme::semi_implicit: next = step_semi_implicit(u); break;
      case FullScheme::strang_split: next = step_strang(u); break;
      case FullScheme::leapfrog: next = step_leapfrog(u); break;
      case FullScheme::implicit_midpoint: next = step_implicit(u, false); break;
      case FullScheme::discrete_gradient: next = step_implicit(u, true); break;
    }
  } catch (const NumericError& e) {
    throw BlowUpError(std::string("non-finite value during full-flow step: ") + e.what(), steps_);
  }
  if (!next.all_finite()) throw BlowUpError("non-finite state after full-flow step", steps_);
  return next;
}

StateVector FullStepper::step_explicit_euler(const StateVector& u) const {
  return u + cfg_.dt * apply_J(*model_, model_->gradient(u));
}

StateVector FullStepper::step_semi_implicit(const StateVector& u) const {
  const Eigen::VectorXd rhs = u.values() - cfg_.dt * local_part(u);
  return StateVector(u.grid(), u.kind(), solver_->solve(rhs));
}

StateVector FullStepper::step_strang(const StateVector& u) const {
  auto rotate = [&](StateVector& s, double tau) {
    const Eigen::VectorXd c = *model_->local_phase_rate(s);
    for (int j = 0; j < s.grid().num_points(); ++j) {
      s.set_complex(j, s.complex_at(j) * std::polar(1.0, -c[j] * tau));
    }
  };
  StateVector s = u;
  rotate(s, 0.5 * cfg_.dt);
  s.values() = solver_->solve(rhs_matrix_ * s.values());
  rotate(s, 0.5 * cfg_.dt);
  return s;
}

StateVector FullStepper::step_leapfrog(const StateVector& u) const {
  const double dt = cfg_.dt;
  StateVector s = u;
  s.second() -= 0.5 * dt * model_->gradient(s).values().head(s.grid().num_points());
  s.first() += dt * s.second();
  s.second() -= 0.5 * dt * model_->gradient(s).values().head(s.grid().num_points());
  return s;
}

StateVector FullStepper::step_implicit(const StateVector& u, bool averaged) {
  const double dt = cfg_.dt;
  const Eigen::VectorXd base = rhs_matrix_ * u.values();
  auto mean_local = [&](const Eigen::VectorXd& next) {
    if (!averaged) {
      return local_part(StateVector(u.grid(), u.kind(), 0.5 * (u.values() + next)));
    }
    Eigen::VectorXd m = Eigen::VectorXd::Zero(next.size());
    for (int q = 0; q < 3; ++q) {
      const double s = kGaussNodes[q];
      m += kGaussWeights[q] *
           local_part(StateVector(u.grid(), u.kind(), (1.0 - s) * u.values() + s * next));
    }
    return m;
  };

  Eigen::VectorXd next = solver_->solve(base + dt * (j_ * local_part(u)));
  for (int it = 1; it <= kFixedPointMaxIterations; ++it) {
    Eigen::VectorXd updated = solver_->solve(base + dt * (j_ * mean_local(next)));
    if (!updated.allFinite()) throw BlowUpError("non-finite implicit iterate", steps_ + 1);
    const double change = (updated - next).norm();
    next = std::move(updated);
    if (change <= kFixedPointTolerance * std::max(1.0, next.norm())) {
      last_iterations_ = it;
      return StateVector(u.grid(), u.kind(), std::move(next));
    }
  }
  throw SolverError("implicit step did not converge in " +
                    std::to_string(kFixedPointMaxIterations) + " fixed-point iterations (step " +
                    std::to_string(steps_ + 1) + ")");
}

StateVector step_full(const EnergyModel& model, const StateVector& u, const FullFlowConfig& cfg) {
  FullStepper stepper(model, cfg);
  return stepper.step(u);
}

long run_full(const EnergyModel& model, const StateVector& u0, const FullFlowConfig& cfg,
              const SnapshotObserver& observer) {
  model.check_state(u0);
  u0.check_finite();
  FullStepper stepper(model, cfg);
  const long total = cfg.t_end == 0.0 ? 0 : std::lround(cfg.t_end / cfg.dt);
  StateVector u = u0;
  if (!observer(0, 0.0, u)) return 0;
  for (long k = 1; k <= total; ++k) {
    u = stepper.step(u);
    if (k % cfg.output_every == 0 || k == total) {
      if (!observer(k, k * cfg.dt, u)) return k;
    }
  }
  return total;
}

Trajectory run_full(const EnergyModel& model, const StateVector& u0, const FullFlowConfig& cfg) {
  Trajectory out;
  run_full(model, u0, cfg, [&](long, double t, const StateVector& u) {
    out.times.push_back(t);
    out.states.push_back(u);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Effective flow

std::string_view to_string(EffectiveScheme s) {
  return s == EffectiveScheme::rk4 ? "rk4" : "implicit-midpoint";
}

EffectiveScheme parse_effective_scheme(std::string_view s) {
  if (s == "rk4") return EffectiveScheme::rk4;
  if (s == "implicit-midpoint") return EffectiveScheme::implicit_midpoint;
  throw ConfigError("unknown effective scheme '" + std::string(s) + "'");
}

namespace {

ModuliVector effective_step(const Chart& chart, const EnergyModel& model, const ModuliVector& s,
                            double h, EffectiveScheme scheme) {
  auto velocity = [&](const Eigen::VectorXd& x) {
    ModuliVector p{x, s.chart_id};
    chart.check_admissible(p);
    return effective_velocity(chart, model, p);
  };
  const Eigen::VectorXd& x = s.coords;
  Eigen::VectorXd next;
  if (scheme == EffectiveScheme::rk4) {
    const Eigen::VectorXd k1 = velocity(x);
    const Eigen::VectorXd k2 = velocity(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = velocity(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = velocity(x + h * k3);
    next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  } else {
    next = x + h * velocity(x);
    bool converged = false;
    for (int it = 0; it < kFixedPointMaxIterations; ++it) {
      Eigen::VectorXd updated = x + h * velocity(0.5 * (x + next));
      const double change = (updated - next).norm();
      next = std::move(updated);
      if (change <= 1e-13 * std::max(1.0, next.norm())) {
        converged = true;
        break;
      }
    }
    if (!converged) throw SolverError("effective implicit-midpoint step did not converge");
  }
  ModuliVector out{std::move(next), s.chart_id};
  chart.check_admissible(out);
  return out;
}

}  // namespace

ModuliVector step_effective(const Chart& chart, const EnergyModel& model, const ModuliVector& sigma,
                            const EffectiveFlowConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("effective dt must be positive");
  chart.check_admissible(sigma);
  return effective_step(chart, model, sigma, cfg.dt, cfg.scheme);
}

std::vector<ModuliVector> integrate_effective(const Chart& chart, const EnergyModel& model,
                                              const ModuliVector& sigma0,
                                              const std::vector<double>& times,
                                              const EffectiveFlowConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("effective dt must be positive");
  chart.check_admissible(sigma0);
  std::vector<ModuliVector> out;
  out.reserve(times.size());
  ModuliVector s = sigma0;
  double t = 0.0;
  for (double target : times) {
    if (target < t - 1e-12) throw ConfigError("effective sample times must be nondecreasing");
    const double span = target - t;
    if (span > 0.0) {
      const long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));
      const double h = span / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) s = effective_step(chart, model, s, h, cfg.scheme);
      t = target;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace adiabatic
