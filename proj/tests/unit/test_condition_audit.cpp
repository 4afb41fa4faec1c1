#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "adiabatic/audit.hpp"
#include "adiabatic/errors.hpp"
#include "adiabatic/parallel.hpp"
#include "adiabatic/regression.hpp"
#include "oracles.hpp"

using namespace adiabatic;

namespace {

Grid1D dirichlet(int n, double length = 40.0) { return Grid1D(length, n, Boundary::dirichlet); }

ModelBundle kink(double eps, int n, double centre = 0.0) {
  const Grid1D g = dirichlet(n);
  return make_allen_cahn_kink(g, eps, sample_potential(g, PotentialShape::cosine),
                              {Coupling::well_depth, 6, centre, 0.0});
}

// Independent dense linearisation of the kink: -D2 (textbook sixth-order
// weights, zero ghosts) + 3 u^2 - 1.
Eigen::MatrixXd kink_linearisation(const Grid1D& g) {
  const int n = g.num_points();
  const double h = g.spacing();
  const double c[] = {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = -3; k <= 3; ++k) {
      if (i + k >= 0 && i + k < n) m(i, i + k) -= c[std::abs(k)] / (h * h);
    }
    const double u = std::tanh(g.x(i) / std::numbers::sqrt2);
    m(i, i) += 3 * u * u - 1;
  }
  return m;
}

}  // namespace

TEST(AuditC1, ExactKinkIsCritical) {
  const auto b = kink(0.0, 1024);
  const std::vector<ModuliVector> s = {b.initial};
  EXPECT_LE(audit_c1(*b.chart, *b.model, s), 1e-6);
}

TEST(AuditC1, LinearInPotentialAmplitude) {
  const auto b1 = kink(0.05, 512, 5.0), b2 = kink(0.025, 512, 5.0);
  const double c1 = audit_c1(*b1.chart, *b1.model, std::vector<ModuliVector>{b1.initial});
  const double c2 = audit_c1(*b2.chart, *b2.model, std::vector<ModuliVector>{b2.initial});
  EXPECT_GT(c1, 0.0);
  EXPECT_LE(c1, 0.2);
  EXPECT_NEAR(c2 / c1, 0.5, 0.1);
}

TEST(AuditC2, KinkGapMatchesDenseOracle) {
  const auto b = kink(0.0, 256);
  const GapResult r = audit_c2_gap_detail(*b.chart, *b.model, b.initial);
  const Eigen::VectorXd ev = oracle::symmetric_eigenvalues(kink_linearisation(b.spec.grid));
  EXPECT_NEAR(ev[0], 0.0, 1e-3);
  EXPECT_NEAR(r.value, ev[1], 1e-4);
  EXPECT_NEAR(r.value, 1.5, 0.05);
  EXPECT_LE(r.deflation_residual, 1e-5);
  EXPECT_TRUE(r.dense);
}

TEST(AuditC2, IterativePathAgreesWithDense) {
  const auto b = kink(0.0, 512);
  GapOptions iterative;
  iterative.dense_threshold = 64;
  const GapResult it = audit_c2_gap_detail(*b.chart, *b.model, b.initial, iterative);
  const GapResult dn = audit_c2_gap_detail(*b.chart, *b.model, b.initial);
  EXPECT_FALSE(it.dense);
  EXPECT_GT(it.iterations, 0);
  EXPECT_NEAR(it.value, dn.value, 1e-7);
  EXPECT_LE(it.deflation_residual, 1e-8);
}

TEST(AuditC2, IterationBudgetExhaustionIsAnError) {
  const auto b = kink(0.0, 512);
  GapOptions starved;
  starved.dense_threshold = 64;
  starved.max_iterations = 1;
  starved.tolerance = 1e-15;
  EXPECT_THROW(audit_c2_gap(*b.chart, *b.model, b.initial, starved), AuditError);
}

TEST(AuditC2, VacuumBottomIsFirstNonzeroSymbol) {
  const Grid1D g(80.0, 256, Boundary::periodic);
  const auto b = make_vacuum(g);
  const double k = 2.0 * std::numbers::pi / g.length();
  const double expected = 2.0 + oracle::central_symbol(6, k, g.spacing());
  const double gap = audit_c2_gap(*b.chart, *b.model, b.initial);
  EXPECT_NEAR(gap, expected, 1e-8);
  EXPECT_NEAR(gap, 2.0, 0.02);
}

TEST(AuditC2, QuadraticToyHasUnitGap) {
  const auto b = make_quadratic_toy(dirichlet(128));
  EXPECT_NEAR(audit_c2_gap(*b.chart, *b.model, b.initial), 1.0, 1e-10);
}

TEST(AuditC3, KinkTangentFormScalesWithEpsilon) {
  const auto exact = kink(0.0, 512);
  EXPECT_LE(audit_c3_tangent(*exact.chart, *exact.model, exact.initial), 1e-6);
  const auto b1 = kink(0.05, 512, 5.0), b2 = kink(0.025, 512, 5.0);
  const double c1 = audit_c3_tangent(*b1.chart, *b1.model, b1.initial);
  const double c2 = audit_c3_tangent(*b2.chart, *b2.model, b2.initial);
  EXPECT_GT(c1, 0.0);
  EXPECT_NEAR(c2 / c1, 0.5, 0.15);
}

TEST(AuditC3, VacuumConstantChartFails) {
  const Grid1D g(80.0, 256, Boundary::periodic);
  const auto b = make_vacuum(g);
  EXPECT_NEAR(audit_c3_tangent(*b.chart, *b.model, b.initial), 2.0, 1e-10);
  const auto samples = sample_moduli(*b.chart, b.initial, 3, 0.1);
  const AuditReport r = run_audit(*b.chart, *b.model, samples, {});
  EXPECT_FALSE(r.c3_pass());
  EXPECT_FALSE(r.all_pass());
}

TEST(Audit, KinkReportPassesAndSerialises) {
  const auto b = kink(0.0, 256);
  const auto samples = sample_moduli(*b.chart, b.initial, 5, 2.0);
  ASSERT_EQ(samples.size(), 5u);
  const AuditReport r = run_audit(*b.chart, *b.model, samples, {}, {}, 2);
  EXPECT_TRUE(r.all_pass());
  EXPECT_NEAR(r.alpha_c2, 1.5, 0.05);
  const std::string kv = r.to_key_value();
  EXPECT_NE(kv.find("c1_pass=1\n"), std::string::npos);
  EXPECT_NE(kv.find("alpha_c2="), std::string::npos);
  EXPECT_THROW(run_audit(*b.chart, *b.model, std::vector<ModuliVector>{}, {}), AuditError);
}

TEST(Audit, ParallelMatchesSerial) {
  const auto b = kink(0.05, 256, 3.0);
  const auto samples = sample_moduli(*b.chart, b.initial, 4, 1.0);
  const AuditReport one = run_audit(*b.chart, *b.model, samples, {}, {}, 1);
  const AuditReport four = run_audit(*b.chart, *b.model, samples, {}, {}, 4);
  EXPECT_EQ(one.to_key_value(), four.to_key_value());
}

TEST(AuditScaling, RescaledKinkExponents) {
  const ModelFamily family = [](double eps) {
    return make_rescaled_kink(Grid1D(8.0, 1024, Boundary::dirichlet), eps);
  };
  const std::vector<double> eps = {0.4, 0.2, 0.1};
  const ScalingReport r = audit_scaling(family, eps, 3);
  // Gram = int sech^4(x / (sqrt 2 eps)) / (2 eps^2) dx = (2 sqrt 2 / 3) / eps.
  for (const auto& s : r.samples) {
    EXPECT_NEAR(s.g_norm * s.g_norm, 2.0 * std::numbers::sqrt2 / 3.0 / s.epsilon,
                2e-3 / s.epsilon);
  }
  EXPECT_NEAR(r.g_norm.slope(), -0.5, 0.02);
  EXPECT_NEAR(r.reduced_norm.slope(), -1.0, 0.02);
  EXPECT_NEAR(r.reduced_inverse_norm.slope(), 1.0, 0.02);
  EXPECT_TRUE(r.pullback_gradient_norm.floor);
  EXPECT_THROW(audit_scaling(family, std::vector<double>{0.1, 0.2}), AuditError);
}

TEST(Regression, LinearFitMatchesLeastSquaresOracle) {
  const std::vector<double> x = {0.1, 0.7, 1.3, 2.2, 3.0}, y = {1.0, 2.1, 2.8, 4.9, 5.5};
  const LinearFit f = fit_linear(x, y);
  const auto o = oracle::least_squares(x, y);
  EXPECT_NEAR(f.slope, o.slope, 1e-12);
  EXPECT_NEAR(f.intercept, o.intercept, 1e-12);
  EXPECT_GT(f.r_squared, 0.95);
  EXPECT_LT(f.r_squared, 1.0);
  EXPECT_EQ(f.points, 5);
}

TEST(Regression, LogLogHandlesFloorsAndDrops) {
  const std::vector<double> x = {0.08, 0.04, 0.02};
  const LogLogFit quad = fit_log_log(x, std::vector<double>{6.4e-3, 1.6e-3, 4e-4});
  EXPECT_NEAR(quad.slope(), 2.0, 1e-12);
  EXPECT_NEAR(quad.r_squared(), 1.0, 1e-12);
  const LogLogFit floor = fit_log_log(x, std::vector<double>{1e-12, 3e-13, 2e-12});
  EXPECT_TRUE(floor.floor);
  EXPECT_EQ(floor.describe(), "floor");
  const LogLogFit dropped = fit_log_log(x, std::vector<double>{1.0, -1.0, std::nan("")});
  EXPECT_EQ(dropped.dropped, 2);
  EXPECT_EQ(dropped.describe(), "insufficient");
  const std::vector<double> nan3(3, std::nan(""));
  EXPECT_FALSE(fit_log_log(x, nan3).floor);
}

TEST(Parallel, OrderedResultsAndFirstException) {
  const auto r = parallel_map<int>(100, 4, [](int i) { return i * i; });
  for (int i = 0; i < 100; ++i) EXPECT_EQ(r[i], i * i);
  std::atomic<int> calls{0};
  EXPECT_THROW(parallel_map<int>(20, 3,
                                 [&](int i) -> int {
                                   ++calls;
                                   if (i == 5) throw std::runtime_error("boom");
                                   return i;
                                 }),
               std::runtime_error);
  EXPECT_GE(calls.load(), 1);
}
