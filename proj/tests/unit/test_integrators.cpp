#include <gtest/gtest.h>

#include <complex>

#include "adiabatic/errors.hpp"
#include "adiabatic/integrators.hpp"
#include "adiabatic/models.hpp"
#include "oracles.hpp"

using namespace adiabatic;

namespace {

Grid1D dirichlet(int n) { return Grid1D(40.0, n, Boundary::dirichlet); }
Grid1D periodic(int n) { return Grid1D(40.0, n, Boundary::periodic); }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.begin(), static_cast<Eigen::Index>(v.size()));
}

StateVector nls_soliton(const Grid1D& g, double a, double p, double gamma) {
  StateVector u(g, ValueKind::complex);
  for (int i = 0; i < g.num_points(); ++i) {
    const double y = g.offset(i, a);
    u.set_complex(i, std::polar(1.0 / std::cosh(y), p * y + gamma));
  }
  return u;
}

}  // namespace

TEST(FullFlowConfig, RejectsBadSettings) {
  const auto k = make_allen_cahn_kink(dirichlet(128), 0.0, {});
  const auto s = make_nls_soliton(periodic(128), 0.0, {});
  EXPECT_THROW(validate_config({0.0, 1.0, FullScheme::semi_implicit, 1}, *k.model), ConfigError);
  EXPECT_THROW(validate_config({0.1, 0.05, FullScheme::semi_implicit, 1}, *k.model), ConfigError);
  EXPECT_THROW(validate_config({0.1, 1.0, FullScheme::semi_implicit, 0}, *k.model), ConfigError);
  EXPECT_THROW(validate_config({0.1, 1.0, FullScheme::leapfrog, 1}, *k.model), ConfigError);
  EXPECT_THROW(validate_config({0.1, 1.0, FullScheme::semi_implicit, 1}, *s.model), ConfigError);
  EXPECT_THROW(validate_config({1.0, 1.0, FullScheme::explicit_euler, 1}, *k.model), ConfigError);
  EXPECT_NO_THROW(validate_config({0.1, 0.0, FullScheme::semi_implicit, 1}, *k.model));
  EXPECT_NO_THROW(validate_config({0.01, 1.0, FullScheme::strang_split, 1}, *s.model));
  EXPECT_THROW(parse_full_scheme("rk45"), ConfigError);
}

TEST(FullFlowConfig, StiffnessBoundCoversSpectrum) {
  for (const auto& b : {make_allen_cahn_kink(dirichlet(96), 0.0, {}),
                        make_nls_soliton(periodic(96), 0.0, {})}) {
    const Eigen::MatrixXd a(b.model->linear_part());
    const double top = oracle::symmetric_eigenvalues(a).maxCoeff();
    EXPECT_GE(b.model->stiffness_bound(), top * (1 - 1e-12));
    EXPECT_LE(b.model->stiffness_bound(), top * 1.1);
    EXPECT_NEAR(max_stable_dt(*b.model, FullScheme::explicit_euler),
                1.8 / b.model->stiffness_bound(), 1e-15);
  }
}

TEST(ExplicitEuler, QuadraticToyIsGeometric) {
  const auto b = make_quadratic_toy(dirichlet(64));
  const StateVector u0 = b.chart->eval(b.chart->point(vec({2.0})));
  const Trajectory tr = run_full(*b.model, u0, {0.1, 1.0, FullScheme::explicit_euler, 10});
  ASSERT_EQ(tr.states.size(), 2u);
  EXPECT_LE(norm(tr.states.back() - std::pow(0.9, 10) * u0), 1e-14);
}

TEST(SemiImplicit, FirstOrderOnQuadraticToy) {
  const auto b = make_quadratic_toy(dirichlet(64));
  const StateVector u0 = b.chart->eval(b.chart->point(vec({1.0})));
  auto error = [&](double dt) {
    const Trajectory tr = run_full(*b.model, u0, {dt, 1.0, FullScheme::semi_implicit, 1000000});
    return norm(tr.states.back() - std::exp(-1.0) * u0);
  };
  EXPECT_NEAR(error(0.01) / error(0.005), 2.0, 0.05);
}

TEST(SemiImplicit, KinkStaysPutAndEnergyDecreases) {
  const auto b = make_allen_cahn_kink(dirichlet(512), 0.0, {});
  const StateVector u0 = b.chart->eval(b.initial);
  const Trajectory tr = run_full(*b.model, u0, {1e-2, 5.0, FullScheme::semi_implicit, 100});
  const Projection p = project_to_moduli(*b.chart, *b.model, tr.states.back(), b.initial);
  EXPECT_LE(std::abs(p.sigma[0]), 1e-8);

  StateVector bumped = u0;
  for (int i = 0; i < 512; ++i) bumped[i] += 0.1 * std::exp(-std::pow(b.spec.grid.x(i) - 1.25, 2));
  double previous = b.model->energy(bumped);
  run_full(*b.model, bumped, {1e-2, 5.0, FullScheme::semi_implicit, 1},
           [&](long, double, const StateVector& u) {
             const double e = b.model->energy(u);
             EXPECT_LE(e, previous + 1e-12);
             previous = e;
             return true;
           });
}

TEST(RunFull, SnapshotScheduleAndEarlyStop) {
  const auto b = make_quadratic_toy(dirichlet(64));
  const StateVector u0 = b.chart->eval(b.chart->point(vec({1.0})));
  const Trajectory tr = run_full(*b.model, u0, {0.1, 1.0, FullScheme::semi_implicit, 4});
  const std::vector<double> expected = {0.0, 0.4, 0.8, 1.0};
  ASSERT_EQ(tr.times.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(tr.times[i], expected[i], 1e-12);
  const long steps = run_full(*b.model, u0, {0.1, 1.0, FullScheme::semi_implicit, 1},
                              [](long step, double, const StateVector&) { return step < 3; });
  EXPECT_EQ(steps, 3);
  const Trajectory none = run_full(*b.model, u0, {0.1, 0.0, FullScheme::semi_implicit, 1});
  EXPECT_EQ(none.states.size(), 1u);
}

TEST(FullStepper, NonFiniteStateIsABlowUp) {
  const auto b = make_allen_cahn_kink(dirichlet(64), 0.0, {});
  StateVector u = b.chart->eval(b.initial);
  u[10] = 1e200;
  FullStepper stepper(*b.model, {1e-3, 1.0, FullScheme::semi_implicit, 1});
  EXPECT_THROW(stepper.step(u), BlowUpError);
}

TEST(StrangSplit, PlaneWaveRotatesAtDispersionRate) {
  const Grid1D g = periodic(256);
  const auto b = make_nls_soliton(g, 0.0, {});
  const double k = 2.0 * std::numbers::pi * 3 / g.length(), amp = 0.5;
  StateVector u(g, ValueKind::complex);
  for (int i = 0; i < g.num_points(); ++i) u.set_complex(i, std::polar(amp, k * g.x(i)));
  // E'(psi) = (symbol(k) + mu - 2 g |psi|^2) psi for a plane wave.
  const double omega = oracle::central_symbol(6, k, g.spacing()) + 1.0 - 2.0 * amp * amp;
  FullStepper stepper(*b.model, {1e-3, 1.0, FullScheme::strang_split, 1});
  const double mass0 = norm(u);
  StateVector v = u;
  for (int n = 0; n < 1000; ++n) {
    v = stepper.step(v);
    EXPECT_NEAR(norm(v), mass0, 1e-12);
  }
  StateVector exact(g, ValueKind::complex);
  for (int i = 0; i < g.num_points(); ++i) {
    exact.set_complex(i, u.complex_at(i) * std::polar(1.0, -omega));
  }
  EXPECT_LE(norm(v - exact), 1e-6 * norm(u));
}

TEST(StrangSplit, TravellingSolitonMatchesGalileanBoost) {
  const Grid1D g = periodic(1024);
  const auto b = make_nls_soliton(g, 0.0, {});
  const double p = 0.5;
  const StateVector u0 = nls_soliton(g, 0.0, p, 0.0);
  const Trajectory tr = run_full(*b.model, u0, {1e-3, 1.0, FullScheme::strang_split, 1000});
  // psi(x, t) = sech(x - 2pt) exp(i(p(x - 2pt) + p^2 t)).
  EXPECT_LE(norm(tr.states.back() - nls_soliton(g, 2 * p, p, p * p)), 1e-3);
}

TEST(ImplicitSchemes, ConserveEnergyAndMass) {
  const Grid1D g = periodic(256);
  const auto b = make_nls_soliton(g, 0.05, sample_potential(g, PotentialShape::cosine),
                                  {Coupling::well_depth, 6, 2.0, 0.2});
  const StateVector u0 = b.chart->eval(b.initial);
  const double e0 = b.model->energy(u0), m0 = norm(u0);
  for (FullScheme s : {FullScheme::implicit_midpoint, FullScheme::discrete_gradient}) {
    FullStepper stepper(*b.model, {1e-2, 1.0, s, 1});
    StateVector u = u0;
    for (int n = 0; n < 100; ++n) u = stepper.step(u);
    EXPECT_LE(stepper.last_iterations(), 100);
    // Midpoint keeps quadratic invariants; the averaged-gradient step keeps the energy.
    if (s == FullScheme::implicit_midpoint) {
      EXPECT_NEAR(norm(u), m0, 1e-12);
    } else {
      EXPECT_NEAR(b.model->energy(u), e0, 1e-12 * std::abs(e0));
    }
  }
}

TEST(Leapfrog, LinearWaveEnergyHasNoSecularDrift) {
  const auto b = make_linear_wave(dirichlet(128));
  const StateVector u0 = b.chart->eval(b.chart->point(vec({1.0, 0.0})));
  constexpr double dt = 1e-3;
  auto energies = [&](FullScheme s) {
    std::vector<double> t, e;
    run_full(*b.model, u0, {dt, 10000 * dt, s, 1}, [&](long, double time, const StateVector& u) {
      t.push_back(time);
      e.push_back(b.model->energy(u) - b.model->energy(u0));
      return true;
    });
    return std::pair{t, e};
  };
  // The energy is quadratic, so the midpoint rule keeps it exactly.
  const auto [ti, ei] = energies(FullScheme::implicit_midpoint);
  for (double e : ei) ASSERT_LE(std::abs(e), 1e-12);
  const auto [t, e] = energies(FullScheme::leapfrog);
  ASSERT_EQ(e.size(), 10001u);
  double early = 0.0, late = 0.0;
  for (int i = 0; i < 2000; ++i) {
    early = std::max(early, std::abs(e[i]));
    late = std::max(late, std::abs(e[e.size() - 2000 + i]));
  }
  EXPECT_LE(late, 1.05 * early);  // bounded oscillation, no growth
  EXPECT_LE(std::abs(oracle::least_squares(t, e).slope) * t.back(), 1e-8);
}

TEST(Leapfrog, AgreesWithImplicitMidpoint) {
  const auto b = make_wave_kink(dirichlet(256), 0.0, {}, {Coupling::well_depth, 6, 0.0, 0.2});
  const StateVector u0 = b.chart->eval(b.initial);
  const auto lf = run_full(*b.model, u0, {1e-3, 1.0, FullScheme::leapfrog, 1000});
  const auto im = run_full(*b.model, u0, {1e-3, 1.0, FullScheme::implicit_midpoint, 1000});
  EXPECT_LE(norm(lf.states.back() - im.states.back()), 1e-5);
}

TEST(Effective, QuadraticToyDecaysExponentially) {
  const auto b = make_quadratic_toy(dirichlet(64));
  const std::vector<double> times = {0.0, 0.5, 1.0, 2.0};
  const auto path = integrate_effective(*b.chart, *b.model, b.chart->point(vec({1.0})), times,
                                        {1e-2, 2.0, EffectiveScheme::rk4});
  ASSERT_EQ(path.size(), times.size());
  for (std::size_t i = 0; i < times.size(); ++i) EXPECT_NEAR(path[i][0], std::exp(-times[i]), 1e-9);
}

TEST(Effective, Rk4MatchesFineReference) {
  const Grid1D g = dirichlet(256);
  const auto b = make_allen_cahn_kink(g, 0.05, sample_potential(g, PotentialShape::cosine),
                                      {Coupling::well_depth, 6, 3.0, 0.0});
  auto velocity = [&](const Eigen::VectorXd& x) {
    return effective_velocity(*b.chart, *b.model, b.chart->point(x));
  };
  const Eigen::VectorXd ref = oracle::rk4(velocity, b.initial.coords, 20.0, 1e-2);
  const auto path = integrate_effective(*b.chart, *b.model, b.initial, {20.0},
                                        {0.5, 20.0, EffectiveScheme::rk4});
  EXPECT_NEAR(path[0][0], ref[0], 1e-8);
  EXPECT_GT(path[0][0], 3.0);  // descends away from the potential maximum at 0
}

TEST(Effective, ImplicitMidpointConservesReducedEnergy) {
  const Grid1D g = dirichlet(256);
  const auto b = make_wave_kink(g, 0.05, sample_potential(g, PotentialShape::cosine),
                                {Coupling::well_depth, 6, 2.0, 0.0});
  std::vector<double> times;
  for (int i = 0; i <= 50; ++i) times.push_back(i);
  const auto path = integrate_effective(*b.chart, *b.model, b.initial, times,
                                        {1e-2, 50.0, EffectiveScheme::implicit_midpoint});
  const double e0 = pullback_energy(*b.chart, *b.model, path.front());
  for (const auto& s : path) EXPECT_NEAR(pullback_energy(*b.chart, *b.model, s), e0, 1e-4);
}

TEST(Effective, SchemesConvergeAtTheirOrders) {
  const Grid1D g = dirichlet(256);
  const auto b = make_wave_kink(g, 0.05, sample_potential(g, PotentialShape::cosine),
                                {Coupling::well_depth, 6, 2.0, 0.0});
  auto run = [&](EffectiveScheme s, double dt) {
    return integrate_effective(*b.chart, *b.model, b.initial, {5.0}, {dt, 5.0, s})[0].coords;
  };
  const Eigen::VectorXd ref = run(EffectiveScheme::rk4, 1e-3);
  const double im1 = (run(EffectiveScheme::implicit_midpoint, 0.2) - ref).norm();
  const double im2 = (run(EffectiveScheme::implicit_midpoint, 0.1) - ref).norm();
  EXPECT_NEAR(im1 / im2, 4.0, 0.4);
  const double rk1 = (run(EffectiveScheme::rk4, 1.0) - ref).norm();
  const double rk2 = (run(EffectiveScheme::rk4, 0.5) - ref).norm();
  EXPECT_NEAR(rk1 / rk2, 16.0, 3.0);
}

TEST(Effective, LeavingTheBoxIsReported) {
  const Grid1D g = dirichlet(256);
  const auto b = make_allen_cahn_kink(g, 0.05, sample_potential(g, PotentialShape::cosine),
                                      {Coupling::well_depth, 6, 3.0, 0.0});
  const auto narrow = with_chart_box(b, AdmissibleBox{vec({2.5}), vec({3.2})});
  EXPECT_THROW(integrate_effective(*narrow.chart, *narrow.model, narrow.initial, {200.0},
                                   {0.1, 200.0, EffectiveScheme::rk4}),
               ChartBoundaryError);
}
