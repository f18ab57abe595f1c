#include <benchmark/benchmark.h>

#include "vmadmm/catalog.hpp"
#include "vmadmm/diagnostics.hpp"
#include "vmadmm/functions.hpp"
#include "vmadmm/random.hpp"
#include "vmadmm/solver.hpp"

namespace {

vmadmm::CatalogProblem tv1d(long n) {
  return vmadmm::build_problem({"tv1d", {{"n", static_cast<double>(n)}}, {}}, 1.0, 7);
}

void BM_StepTv1dShiftedGram(benchmark::State& state) {
  const auto prob = tv1d(state.range(0));
  const double tau = 0.9 / (prob.norm_a * prob.norm_a + prob.lipschitz);
  const auto m1 = vmadmm::MetricSchedule::shifted_gram({tau}, 1.0, prob.spec.a());
  const auto m2 = vmadmm::MetricSchedule::constant(vmadmm::MetricOperator::zero(prob.spec.m()));
  auto s = vmadmm::SolverState::zeros(prob.spec);
  for (auto _ : state) {
    s = vmadmm::step(prob.spec, s, m1, m2);
    benchmark::DoNotOptimize(s.x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepTv1dShiftedGram)->Arg(50)->Arg(500)->Arg(5000);

void BM_StepLassoQuadraticZ(benchmark::State& state) {
  const auto prob = vmadmm::build_problem(
      {"lasso-split", {{"n", static_cast<double>(state.range(0))}, {"m", 1.5 * state.range(0)}},
       {{"form", "g"}}},
      1.0, 7);
  const auto m1 = vmadmm::MetricSchedule::constant(vmadmm::MetricOperator::scaled_identity(prob.spec.n(), 1.0));
  const auto m2 = vmadmm::MetricSchedule::constant(vmadmm::MetricOperator::scaled_identity(prob.spec.m(), 1.0));
  auto s = vmadmm::SolverState::zeros(prob.spec);
  for (auto _ : state) {
    s = vmadmm::step(prob.spec, s, m1, m2);
    benchmark::DoNotOptimize(s.z.data());
  }
}
BENCHMARK(BM_StepLassoQuadraticZ)->Arg(20)->Arg(200);

void BM_ProxL1(benchmark::State& state) {
  const auto f = vmadmm::FunctionDescriptor::l1(state.range(0), 0.5);
  vmadmm::Lcg64 rng(1);
  const vmadmm::Vector v = rng.normal_vector(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(f.prox(v, 0.3));
}
BENCHMARK(BM_ProxL1)->Arg(1000)->Arg(100000);

void BM_OperatorNormDense(benchmark::State& state) {
  vmadmm::Lcg64 rng(5);
  const long n = state.range(0);
  vmadmm::Matrix m(n, n);
  for (long j = 0; j < n; ++j) m.col(j) = rng.normal_vector(n);
  const auto a = vmadmm::LinearMap::dense(m);
  for (auto _ : state) benchmark::DoNotOptimize(vmadmm::operator_norm(a, 1e-10));
}
BENCHMARK(BM_OperatorNormDense)->Arg(50)->Arg(200);

void BM_KktResidualTv1d(benchmark::State& state) {
  const auto prob = tv1d(state.range(0));
  vmadmm::Lcg64 rng(3);
  const vmadmm::Vector x = rng.normal_vector(prob.spec.n());
  const vmadmm::Vector y = rng.normal_vector(prob.spec.m());
  for (auto _ : state) benchmark::DoNotOptimize(vmadmm::kkt_residual(prob.spec, x, y));
}
BENCHMARK(BM_KktResidualTv1d)->Arg(50)->Arg(5000);

}  // namespace
BENCHMARK_MAIN();
