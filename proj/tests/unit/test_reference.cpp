#include <gtest/gtest.h>

#include "vmadmm/catalog.hpp"
#include "vmadmm/error.hpp"
#include "vmadmm/reference.hpp"
#include "vmadmm/solver.hpp"

using namespace vmadmm;

namespace {

using FD = FunctionDescriptor;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

MetricSchedule constant(MetricOperator m) { return MetricSchedule::constant(std::move(m)); }

std::vector<TracePoint> points(const std::vector<SolverState>& tr) {
  std::vector<TracePoint> out;
  for (const auto& s : tr) out.push_back({s.x, s.z, s.y});
  return out;
}

std::vector<SolverState> solver_trace(const ProblemSpec& p, const MetricSchedule& m1,
                                      const MetricSchedule& m2, std::size_t iters,
                                      bool force = false) {
  StoppingRule stop;
  stop.max_iters = iters;
  RunOptions opt;
  opt.keep_trace = true;
  opt.force = force;
  return run(p, SolverState::zeros(p), m1, m2, stop, opt).trace;
}

// Solver trace with M1 = ShiftedGram(tau), M2 = 0 against the primal-dual
// iteration started from (x^1, y^0).
EquivalenceReport condat_equivalence(const ProblemSpec& p, const std::vector<double>& taus,
                                     std::size_t iters, double tol) {
  const auto m1 = MetricSchedule::shifted_gram(taus, p.c(), p.a());
  const auto m2 = constant(MetricOperator::zero(p.m()));
  const auto tr = solver_trace(p, m1, m2, iters, /*force=*/taus.size() > 1);
  // Solver iteration k uses tau_k; reference step j produces x^{j+2}, which
  // the solver computed with tau_{j+1}.
  std::vector<double> ref_taus;
  for (std::size_t j = 0; j + 1 < taus.size(); ++j) ref_taus.push_back(taus[j + 1]);
  const double tau0 = ref_taus.empty() ? taus[0] : ref_taus[0];
  auto init = make_primal_dual_state(p, tr[1].x, tr[0].y, tau0, p.c());
  const auto ref = run_condat(p, init, iters - 1, ref_taus);
  return equivalence_check(points(tr), ref, tol);
}

}  // namespace

TEST(ClassicalAdmm, MatchesSolverWithZeroMetrics) {
  const auto cp = build_problem({"lasso-split", {}, {{"form", "g"}}}, 1.0, 0);
  const auto& p = cp.spec;
  const auto m1 = constant(MetricOperator::zero(p.n()));
  const auto m2 = constant(MetricOperator::zero(p.m()));
  // M1 = M2 = 0 satisfies no theorem hypothesis on its own.
  const auto tr = solver_trace(p, m1, m2, 100, /*force=*/true);
  const auto ref = run_classical_admm(p, {Vector::Zero(p.n()), Vector::Zero(p.m()),
                                          Vector::Zero(p.m()), 0},
                                      100);
  ASSERT_EQ(ref.size(), tr.size());
  const auto rep = equivalence_check(points(tr), ref, 1e-12);
  EXPECT_TRUE(rep.pass) << "max deviation " << rep.max_deviation;
}

TEST(ClassicalAdmm, OneDimensionalLassoToy) {
  const auto cp = build_problem({"toy1d", {}, {{"variant", "hzero"}}}, 1.0, 0);
  const auto& p = cp.spec;
  const auto zm = constant(MetricOperator::zero(1));
  const auto tr = solver_trace(p, zm, zm, 100, true);
  const auto ref = run_classical_admm(p, {vec({0}), vec({0}), vec({0}), 0}, 100);
  EXPECT_TRUE(equivalence_check(points(tr), ref, 1e-12).pass);
}

TEST(ClassicalAdmm, SaddleIsFixedPoint) {
  const auto cp = build_problem({"toy1d", {}, {{"variant", "hzero"}}}, 1.0, 0);
  const auto& q = *cp.known_saddle;
  const auto s = classical_admm_step(cp.spec, {q.x, q.z, q.y, 0});
  EXPECT_NEAR(s.x[0], q.x[0], 1e-15);
  EXPECT_NEAR(s.z[0], q.z[0], 1e-15);
  EXPECT_NEAR(s.y[0], q.y[0], 1e-15);
  EXPECT_EQ(s.k, 1u);
}

TEST(ClassicalAdmm, RequiresHZero) {
  const auto cp = build_problem({"toy1d", {}, {}}, 1.0, 0);
  EXPECT_THROW(classical_admm_step(cp.spec, {vec({0}), vec({0}), vec({0}), 0}), Error);
}

TEST(Condat, ZeroGKeepsDualAtZero) {
  const ProblemSpec p(FD::l1(2, 1.0), FD::squared_l2(vec({1, 2})), FD::zero(2),
                      LinearMap::identity(2), 1.0);
  auto s = make_primal_dual_state(p, vec({1, 1}), vec({3, -4}), 0.5, 1.0);
  for (int i = 0; i < 3; ++i) {
    s = condat_step(p, s);
    EXPECT_EQ(s.y, vec({0, 0}));
  }
}

TEST(Condat, ZeroMapLeavesXFixed) {
  const ProblemSpec p(FD::zero(2), FD::zero(2), FD::l1(2, 1.0), LinearMap::zero(2, 2), 1.0);
  const auto s = condat_step(p, make_primal_dual_state(p, vec({1, -2}), vec({0.3, 0}), 1.0, 1.0));
  EXPECT_EQ(s.x, vec({1, -2}));
  EXPECT_EQ(s.k, 1u);
}

TEST(Condat, StepSizeValidation) {
  const auto cp = build_problem({"tv1d", {}, {}}, 1.0, 0);
  // 1/tau - ||D||^2 must exceed L/2 = 0.5.
  EXPECT_THROW(make_primal_dual_state(cp.spec, Vector::Zero(50), Vector::Zero(49), 0.25, 1.0),
               Error);
  EXPECT_NO_THROW(
      make_primal_dual_state(cp.spec, Vector::Zero(50), Vector::Zero(49), 0.19, 1.0));
  EXPECT_THROW(make_primal_dual_state(cp.spec, Vector::Zero(50), Vector::Zero(49), 0.19, 0.0),
               Error);
}

TEST(Equivalence, Tv1dTwoHundredIterations) {
  const auto cp = build_problem({"tv1d", {}, {}}, 1.0, 0);
  const auto rep = condat_equivalence(cp.spec, {0.19}, 200, 1e-10);
  EXPECT_TRUE(rep.pass) << "max deviation " << rep.max_deviation;
  EXPECT_EQ(rep.deviation.size(), 200u);
}

TEST(Equivalence, EveryCatalogProblemWithProxableF) {
  for (const auto& params : std::vector<ProblemParams>{
           {"lasso-split", {}, {{"form", "h"}}},
           {"lasso-split", {}, {{"form", "g"}}},
           {"box-qp", {}, {}},
           {"toy1d", {}, {}},
           {"toy1d", {}, {{"variant", "hzero"}}}}) {
    const auto cp = build_problem(params, 1.0, 0);
    const double na = std::max(cp.norm_a, 1e-12);
    const double tau = 1.0 / (1.05 * (na * na + cp.lipschitz / 2) + 1e-3);
    const auto rep = condat_equivalence(cp.spec, {tau}, 200, 1e-10);
    EXPECT_TRUE(rep.pass) << params.name << " max deviation " << rep.max_deviation;
  }
}

TEST(Equivalence, VaryingStepSizes) {
  const auto cp = build_problem({"tv1d", {{"n", 20}}, {}}, 1.0, 0);
  const auto rep = condat_equivalence(cp.spec, {0.19, 0.18, 0.17, 0.16}, 60, 1e-10);
  EXPECT_TRUE(rep.pass) << "max deviation " << rep.max_deviation;
}

TEST(Equivalence, IdenticalAndPerturbedTraces) {
  const auto cp = build_problem({"toy1d", {}, {{"variant", "hzero"}}}, 1.0, 0);
  const auto ref = run_classical_admm(cp.spec, {vec({0}), vec({0}), vec({0}), 0}, 20);
  std::vector<TracePoint> same;
  for (const auto& s : ref) same.push_back({s.x, s.z, s.y});
  const auto ok = equivalence_check(same, ref, 0.0);
  EXPECT_TRUE(ok.pass);
  EXPECT_EQ(ok.max_deviation, 0.0);

  same[7].y[0] += 1e-6;
  const auto bad = equivalence_check(same, ref, 1e-10);
  EXPECT_FALSE(bad.pass);
  EXPECT_EQ(bad.first_offending, std::optional<std::size_t>(7));
}

TEST(Equivalence, LengthMismatchThrows) {
  const auto cp = build_problem({"toy1d", {}, {{"variant", "hzero"}}}, 1.0, 0);
  const auto ref = run_classical_admm(cp.spec, {vec({0}), vec({0}), vec({0}), 0}, 3);
  std::vector<TracePoint> shorter = {{vec({0}), vec({0}), vec({0})}};
  EXPECT_THROW(equivalence_check(shorter, ref, 1e-10), Error);
}
