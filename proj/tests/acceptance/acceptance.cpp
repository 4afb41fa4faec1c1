// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "adiabatic/audit.hpp"
#include "adiabatic/cli/cli.hpp"
#include "adiabatic/harness.hpp"
#include "adiabatic/validators.hpp"
#include "oracles.hpp"

using namespace adiabatic;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Grid1D kink_grid(int n = 1024) { return Grid1D(40.0, n, Boundary::dirichlet); }

ModelBundle kink(double eps, double centre, int n = 1024) {
  const Grid1D g = kink_grid(n);
  return make_allen_cahn_kink(g, eps, sample_potential(g, PotentialShape::cosine),
                              {Coupling::well_depth, 6, centre, 0.0});
}

PerturbationSpec bump(double amplitude) {
  PerturbationSpec p;
  p.mode = PerturbationMode::bump;
  p.amplitude = amplitude;
  return p;
}

ExperimentConfig dissipative_run(double t_end, double dt, int every) {
  ExperimentConfig c;
  c.full = {dt, t_end, FullScheme::semi_implicit, every};
  c.effective = {1e-2, t_end, EffectiveScheme::rk4};
  c.projection.tube_radius = c.budgets.tube_radius;
  return c;
}

Outcome variational_consistency() {
  double grad = 0.0, hess = 0.0;
  for (const auto& name : model_names()) {
    const Grid1D g(40.0, 256, default_boundary(name));
    const double eps = name == "rescaled-kink" ? 0.5 : 0.05;
    const auto b = make_model(name, g, eps, sample_potential(g, PotentialShape::cosine));
    const StateVector u = b.chart->eval(b.initial) + random_state(*b.model, 17, 0.1);
    const auto dirs = random_states(*b.model, 20, 23);
    grad = std::max(grad, validate_gradient(*b.model, u, dirs).max_relative_error);
    hess = std::max(hess, validate_hessian(*b.model, u, dirs).max_relative_error);
  }
  return {grad <= 1e-6 && hess <= 1e-5,
          fmt("%zu models, max gradient rel err %.2e, max Hessian rel err %.2e",
              model_names().size(), grad, hess)};
}

Outcome kink_constants() {
  const auto b = kink(0.0, 0.0);
  const double energy = b.model->energy(b.chart->eval(b.initial));
  const double mass = ChartFrame(*b.chart, *b.model, b.initial).gram()(0, 0);
  const double e_oracle = oracle::simpson(oracle::kink_energy_density, -20, 20);
  const double m_oracle = oracle::simpson(oracle::kink_gram_density, -20, 20);
  const bool ok = std::abs(energy - 0.9428) <= 1e-3 && std::abs(mass - 0.9428) <= 1e-3 &&
                  std::abs(energy - e_oracle) <= 1e-3 && std::abs(mass - m_oracle) <= 1e-3;
  return {ok, fmt("energy %.6f (quadrature %.6f), mass %.6f (quadrature %.6f)", energy, e_oracle,
                  mass, m_oracle)};
}

Outcome spectral_gap() {
  const auto b = kink(0.0, 0.0);
  const GapResult r = audit_c2_gap_detail(*b.chart, *b.model, b.initial);
  return {std::abs(r.value - 1.5) <= 0.05 && r.deflation_residual <= 1e-5,
          fmt("gap %.6f, zero-mode overlap %.2e, %s", r.value, r.deflation_residual,
              r.dense ? "dense" : "iterative")};
}

Outcome moduli_projection() {
  const auto b = kink(0.0, 0.0);
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> shift(-3.0, 3.0), size(0.05, 0.3);
  double worst_gap = 0.0, worst_res = 0.0;
  for (int k = 0; k < 10; ++k) {
    const ModuliVector s = b.chart->point(Eigen::VectorXd::Constant(1, shift(rng)));
    StateVector noise = random_state(*b.model, 100 + k);
    noise -= projector_apply(*b.chart, *b.model, s, noise);
    noise *= size(rng) / norm(noise);
    const StateVector u = b.chart->eval(s) + noise;
    const Projection p = project_to_moduli(*b.chart, *b.model, u,
                                           b.chart->point(s.coords.array() + 0.3));
    const double brute = oracle::grid_argmin(
        [&](double a) { return norm(u - b.chart->eval(b.chart->point(Eigen::VectorXd::Constant(1, a)))); },
        s[0] - 1.0, s[0] + 1.0);
    worst_gap = std::max(worst_gap, std::abs(p.sigma[0] - brute));
    worst_res = std::max(worst_res, p.residual / norm(u));
  }
  return {worst_gap <= 1e-3 && worst_res <= 1e-10,
          fmt("10 tube points, max |newton - brute force| %.2e, max residual/||u|| %.2e", worst_gap,
              worst_res)};
}

Outcome dissipative_decay() {
  const auto b = kink(0.04, 5.0);
  const ExperimentConfig cfg = dissipative_run(50.0, 1e-3, 10);
  const RunRecord r = run_experiment(b, make_initial_state(b, b.initial, bump(0.1)), b.initial, cfg);
  const DissipationReport d = dissipation_diagnostics(r, cfg.budgets);
  const bool ok = !r.exit_time && !r.stopped_early && d.gamma && *d.gamma >= 1.0 &&
                  *d.gamma <= 2.0 && d.energy_monotone && !d.ansatz_violated;
  return {ok, fmt("exit %s, gamma %.4f (R^2 %.4f, %d points), max step energy increase %.2e",
                  r.exit_time ? "yes" : "no", d.gamma ? *d.gamma : std::nan(""), d.gamma_r2,
                  d.fit_points, r.max_step_energy_increase)};
}

Outcome residual_scaling() {
  const ModelFamily family = [](double eps) { return kink(eps, 5.0); };
  const SweepResult s = scaling_sweep(family, {0.08, 0.04, 0.02}, {},
                                      dissipative_run(20.0, 1e-2, 10));
  bool failed = false;
  for (const auto& row : s.rows) failed = failed || row.failed;
  const LogLogFit& f = s.residual_fit;
  return {!failed && !f.floor && f.line.points == 3 && f.slope() >= 1.5 && f.r_squared() >= 0.95,
          fmt("residual_22 %.3e / %.3e / %.3e, slope %.3f, R^2 %.4f", s.rows[0].max_residual_22,
              s.rows[1].max_residual_22, s.rows[2].max_residual_22, f.slope(), f.r_squared())};
}

Outcome soliton_tracking() {
  constexpr double kCommonWindow = 25.0;
  double drift = 0.0, common[2] = {}, own[2] = {};
  bool exits = false;
  const double eps[2] = {0.04, 0.02};
  for (int i = 0; i < 2; ++i) {
    const Grid1D g(40.0, 1024, Boundary::periodic);
    ModelOptions opt;
    opt.center = 5.0;
    const auto b = make_nls_soliton(g, eps[i], sample_potential(g, PotentialShape::cosine), opt);
    ExperimentConfig cfg;
    cfg.full = {1e-2, 1.0 / eps[i], FullScheme::discrete_gradient, 10};
    cfg.effective = {1e-2, 1.0 / eps[i], EffectiveScheme::rk4};
    cfg.projection.tube_radius = cfg.budgets.tube_radius;
    const RunRecord r = run_experiment(b, b.chart->eval(b.initial), b.initial, cfg);
    exits = exits || r.exit_time.has_value() || r.stopped_early || r.times.back() < 1.0 / eps[i] - 1e-9;
    drift = std::max(drift, conservation_diagnostics(r).energy_drift);
    common[i] = r.max_sigma_deviation(kCommonWindow);
    own[i] = r.max_sigma_deviation();
  }
  const double ratio = common[1] / common[0];
  return {drift <= 1e-8 && ratio <= 0.6 && !exits,
          fmt("energy drift %.2e, deviation t<=25: %.4e -> %.4e (ratio %.3f), own horizon ratio "
              "%.3f, tube exit %s",
              drift, common[0], common[1], ratio, own[1] / own[0], exits ? "yes" : "no")};
}

Outcome structure() {
  double idem = 0.0, anti = 0.0, jsq = 0.0;
  bool negdef = true;
  for (const auto& name : model_names()) {
    const Grid1D g(40.0, 256, default_boundary(name));
    const double eps = name == "rescaled-kink" ? 0.5 : 0.05;
    const auto b = make_model(name, g, eps, sample_potential(g, PotentialShape::cosine));
    const StateVector phi = random_state(*b.model, 5);
    const StateVector q = projector_apply(*b.chart, *b.model, b.initial, phi);
    idem = std::max(idem, norm(projector_apply(*b.chart, *b.model, b.initial, q) - q) / norm(phi));
    const Eigen::MatrixXd m = ChartFrame(*b.chart, *b.model, b.initial).reduced().matrix;
    if (b.spec.kind == ModelKind::dissipative) {
      const Eigen::VectorXd ev = oracle::symmetric_eigenvalues(0.5 * (m + m.transpose()));
      negdef = negdef && (m - m.transpose()).norm() <= 1e-12 * m.norm() && ev.maxCoeff() < 0.0;
    } else {
      anti = std::max(anti, (m + m.transpose()).norm() / m.norm());
    }
  }
  for (ModelKind k : {ModelKind::schroedinger, ModelKind::canonical_pair}) {
    const Eigen::MatrixXd j(structure_matrix(k, Grid1D(20.0, 32, Boundary::periodic)));
    jsq = std::max(jsq, (j * j + Eigen::MatrixXd::Identity(j.rows(), j.cols())).norm());
  }
  return {idem <= 1e-10 && anti <= 1e-12 && negdef && jsq <= 1e-12,
          fmt("Q idempotence %.2e, antisymmetry %.2e, dissipative symmetric negative-definite %s, "
              "||J^2 + 1|| %.2e",
              idem, anti, negdef ? "yes" : "no", jsq)};
}

Outcome negative_controls() {
  const auto v = make_vacuum(Grid1D(80.0, 256, Boundary::periodic));
  const AuditReport a = run_audit(*v.chart, *v.model, std::vector<ModuliVector>{v.initial}, {});
  const auto b = kink(0.0, 0.0, 256);
  const ExperimentConfig cfg = dissipative_run(2.0, 1e-2, 10);
  const RunRecord r = run_experiment(b, make_initial_state(b, b.initial, bump(0.4)), b.initial, cfg);
  const DissipationReport d = dissipation_diagnostics(r, cfg.budgets);
  return {!a.c3_pass() && !a.all_pass() && std::abs(a.c3_bound - 2.0) <= 1e-6 && d.ansatz_violated &&
              !d.decay_shape(),
          fmt("vacuum C3 %.6f (audit %s), bump 0.4 ansatz flag %s", a.c3_bound,
              a.all_pass() ? "passes" : "fails", d.ansatz_violated ? "raised" : "not raised")};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "adiabatic_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "run.in") << "[model]\nname = allen-cahn-kink\nepsilon = 0.04\npoints = 512\n"
                                   "center = 5\n[full]\ndt = 0.01\nt_end = 2\noutput_every = 10\n"
                                   "[perturbation]\nmode = random-orthogonal\namplitude = 0.1\n"
                                   "seed = 20240917\n";
  std::string csv[2];
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("out" + std::to_string(i));
    std::ostringstream log, err;
    codes[i] = cli::run_cli({"adiabatic", "--config", (dir / "run.in").string(), "--out",
                             out.string(), "--workers", std::to_string(1 + 2 * i)},
                            log, err);
    std::ifstream in(out / "run.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    csv[i] = ss.str();
  }
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {codes[0] == 0 && codes[1] == 0 && same,
          fmt("exit codes %d/%d, %zu bytes, identical %s", codes[0], codes[1], csv[0].size(),
              same ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"variational consistency", variational_consistency},
      {"kink constants", kink_constants},
      {"spectral gap", spectral_gap},
      {"moduli projection", moduli_projection},
      {"dissipative decay", dissipative_decay},
      {"residual scaling", residual_scaling},
      {"soliton tracking", soliton_tracking},
      {"structure", structure},
      {"negative controls", negative_controls},
      {"determinism", determinism},
  };
  int failures = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", index, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
