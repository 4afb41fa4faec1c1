#include <benchmark/benchmark.h>

#include "adiabatic/audit.hpp"
#include "adiabatic/harness.hpp"
#include "adiabatic/integrators.hpp"
#include "adiabatic/models.hpp"

using namespace adiabatic;

namespace {

ModelBundle kink(int n) {
  Grid1D g(40.0, n, Boundary::dirichlet);
  return make_allen_cahn_kink(g, 0.04, sample_potential(g, PotentialShape::cosine),
                              {Coupling::well_depth, 6, 5.0, 0.0});
}

ModelBundle soliton(int n) {
  Grid1D g(40.0, n, Boundary::periodic);
  return make_nls_soliton(g, 0.02, sample_potential(g, PotentialShape::cosine),
                          {Coupling::well_depth, 6, 5.0, 0.3});
}

void BM_Gradient(benchmark::State& state) {
  const ModelBundle b = kink(static_cast<int>(state.range(0)));
  const StateVector u = b.chart->eval(b.initial);
  for (auto _ : state) benchmark::DoNotOptimize(b.model->gradient(u));
}
BENCHMARK(BM_Gradient)->Arg(256)->Arg(1024);

void BM_HessianApply(benchmark::State& state) {
  const ModelBundle b = soliton(static_cast<int>(state.range(0)));
  const StateVector u = b.chart->eval(b.initial);
  const StateVector w = b.chart->tangent_basis(b.initial)[0];
  for (auto _ : state) benchmark::DoNotOptimize(b.model->hessian_apply(u, w));
}
BENCHMARK(BM_HessianApply)->Arg(256)->Arg(1024);

void BM_Projection(benchmark::State& state) {
  const ModelBundle b = soliton(static_cast<int>(state.range(0)));
  PerturbationSpec p;
  p.mode = PerturbationMode::bump;
  p.amplitude = 0.05;
  const StateVector u = make_initial_state(b, b.initial, p);
  for (auto _ : state) benchmark::DoNotOptimize(project_to_moduli(*b.chart, *b.model, u, b.initial));
}
BENCHMARK(BM_Projection)->Arg(256)->Arg(1024);

void BM_SemiImplicitStep(benchmark::State& state) {
  const ModelBundle b = kink(static_cast<int>(state.range(0)));
  FullStepper stepper(*b.model, {1e-3, 1.0, FullScheme::semi_implicit, 1});
  StateVector u = b.chart->eval(b.initial);
  for (auto _ : state) u = stepper.step(u);
}
BENCHMARK(BM_SemiImplicitStep)->Arg(256)->Arg(1024);

void BM_DiscreteGradientStep(benchmark::State& state) {
  const ModelBundle b = soliton(static_cast<int>(state.range(0)));
  FullStepper stepper(*b.model, {1e-2, 1.0, FullScheme::discrete_gradient, 1});
  StateVector u = b.chart->eval(b.initial);
  for (auto _ : state) u = stepper.step(u);
}
BENCHMARK(BM_DiscreteGradientStep)->Arg(256)->Arg(1024);

void BM_EffectiveVelocity(benchmark::State& state) {
  const ModelBundle b = soliton(1024);
  for (auto _ : state) {
    benchmark::DoNotOptimize(effective_velocity(*b.chart, *b.model, b.initial));
  }
}
BENCHMARK(BM_EffectiveVelocity);

void BM_GapDense(benchmark::State& state) {
  const ModelBundle b = kink(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(audit_c2_gap(*b.chart, *b.model, b.initial));
}
BENCHMARK(BM_GapDense)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_GapIterative(benchmark::State& state) {
  const ModelBundle b = kink(2048);
  for (auto _ : state) benchmark::DoNotOptimize(audit_c2_gap(*b.chart, *b.model, b.initial));
}
BENCHMARK(BM_GapIterative)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
