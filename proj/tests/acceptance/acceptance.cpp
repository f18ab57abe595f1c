// Acceptance runner: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vmadmm/catalog.hpp"
#include "vmadmm/diagnostics.hpp"
#include "vmadmm/oracle.hpp"
#include "vmadmm/reference.hpp"
#include "vmadmm/solver.hpp"

using namespace vmadmm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

MetricSchedule constant(MetricOperator m) { return MetricSchedule::constant(std::move(m)); }

// Largest |‖Ax^k - z^k‖ - ‖y^k - y^{k-1}‖/c| seen over every trace in the run.
double g_identity_dev = 0.0;
std::size_t g_identity_traces = 0;

void record_identity(const ProblemSpec& p, const std::vector<SolverState>& tr) {
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double r = (p.a().apply(tr[k].x) - tr[k].z).norm();
    const double d = (tr[k].y - tr[k - 1].y).norm() / p.c();
    g_identity_dev = std::max(g_identity_dev, std::abs(r - d));
  }
  ++g_identity_traces;
}

std::vector<SolverState> trace_run(const ProblemSpec& p, const MetricSchedule& m1,
                                   const MetricSchedule& m2, std::size_t iters,
                                   bool force = false) {
  StoppingRule stop;
  stop.max_iters = iters;
  RunOptions opt;
  opt.keep_trace = true;
  opt.force = force;
  auto tr = run(p, SolverState::zeros(p), m1, m2, stop, opt).trace;
  record_identity(p, tr);
  return tr;
}

std::vector<TracePoint> points(const std::vector<SolverState>& tr) {
  std::vector<TracePoint> out;
  out.reserve(tr.size());
  for (const auto& s : tr) out.push_back({s.x, s.z, s.y});
  return out;
}

struct ErgodicCase {
  std::string label;
  ProblemParams params;
  double tau;
};

const std::vector<ErgodicCase>& ergodic_cases() {
  static const std::vector<ErgodicCase> cases = {
      {"tv1d", {"tv1d", {{"n", 50}}, {}}, 0.19},
      {"toy1d", {"toy1d", {}, {}}, 0.4},
  };
  return cases;
}

// Gap bound along k = 1..5000, plus the Lemma slack at sampled probes
// (shared runs, since both need the ergodic-regime hypotheses).
Outcome criterion_gap_and_lemma(Outcome& lemma) {
  Outcome out;
  for (const auto& ec : ergodic_cases()) {
    const auto t0 = Clock::now();
    const auto cp = build_problem(ec.params, 1.0, 0);
    const auto& p = cp.spec;
    const auto o = compute_oracle(p);
    const auto m1 = MetricSchedule::shifted_gram({ec.tau}, 1.0, p.a());
    const auto m2 = constant(MetricOperator::zero(p.m()));
    const auto rep = validate_assumptions(p, m1, m2);
    out.require(rep.ergodic_ok, ec.label + " M1 - L id PSD (min eig " +
                                    fmt("%.3g", rep.min_eig_m1_minus_l) + ")");

    const auto init = SolverState::zeros(p);
    const double g0 = gamma(p, init, m1.at(0), m2.at(0), o.saddle);
    const auto tr = trace_run(p, m1, m2, 5000);
    ErgodicState e;
    double min_slack = kInf;
    std::size_t worst_k = 0;
    for (std::size_t k = 1; k < tr.size(); ++k) {
      e.add(tr[k]);
      const auto cert = gap_certificate(p, e, o.saddle, g0);
      if (cert.slack < min_slack) {
        min_slack = cert.slack;
        worst_k = k;
      }
    }
    const double secs = seconds_since(t0);
    out.require(min_slack >= -1e-8, ec.label + " min gap slack " + fmt("%.3g", min_slack) +
                                        " at k=" + std::to_string(worst_k));
    out.require(secs < 30.0, ec.label + " runtime " + fmt("%.2fs", secs));

    ProbeSampler sampler(o.saddle, 1234);
    double lemma_min = kInf;
    std::size_t evaluated = 0, skipped = 0;
    for (std::size_t k = 0; k + 1 < tr.size(); k += 10) {
      for (int j = 0; j < 20; ++j) {
        const auto s = lemma_inequality_check(p, tr[k], tr[k + 1], m1.at(k), m2.at(k),
                                              sampler.next());
        if (!s) {
          ++skipped;
          continue;
        }
        ++evaluated;
        lemma_min = std::min(lemma_min, *s);
      }
    }
    lemma.require(evaluated > 0 && lemma_min >= -1e-9,
                  ec.label + " min slack " + fmt("%.3g", lemma_min) + " over " +
                      std::to_string(evaluated) + " probes (" + std::to_string(skipped) +
                      " outside domain)");
  }
  return out;
}

struct UvCase {
  std::string label;
  ProblemParams params;
};

const std::vector<UvCase>& uv_cases() {
  static const std::vector<UvCase> cases = {
      {"toy1d-hzero", {"toy1d", {}, {{"variant", "hzero"}}}},
      {"lasso-split-g", {"lasso-split", {}, {{"form", "g"}}}},
  };
  return cases;
}

void criteria_inequality_and_rate(Outcome& ineq, Outcome& rate) {
  for (const auto& uc : uv_cases()) {
    const auto cp = build_problem(uc.params, 1.0, 0);
    const auto& p = cp.spec;
    const auto o = compute_oracle(p);
    const auto m1 = constant(MetricOperator::scaled_identity(p.n(), 1.0));
    const auto m2 = constant(MetricOperator::scaled_identity(p.m(), 1.0));
    // States k = 0..2001 give pairs (u^k, v^{k+1}) for k = 1..2000.
    const auto tr = trace_run(p, m1, m2, 2001);
    const auto pairs = sequence_uv(p, tr, o.saddle, m1, m2);
    const auto rep = inequality_v_check(pairs, p.c());
    ineq.require(rep.holds(1e-10) && pairs.size() == 2000,
                 uc.label + " min slack " + fmt("%.3g", rep.min_slack) + " over k=1.." +
                     std::to_string(pairs.size()) + ", uncorrected violations " +
                     std::to_string(rep.uncorrected_violations));

    const auto mono = v_monotone_check(pairs);
    rate.require(mono.holds, uc.label + " v nonincreasing");
    const double u1 = pairs.front().u;
    const double s = accumulated_z_steps(pairs, p.c());
    std::vector<SolverState> window(tr.begin(), tr.begin() + 2001);
    const auto pts = feasibility_rate(p, window, u1, s);
    std::size_t violations = 0;
    std::vector<std::size_t> ks;
    std::vector<double> rs;
    for (const auto& pt : pts) {
      if (pt.residual > pt.bound) ++violations;
      ks.push_back(pt.k);
      rs.push_back(pt.residual);
    }
    const auto fit = log_log_slope(ks, rs, 100, 2000);
    rate.require(violations == 0 && pts.size() == 1999,
                 uc.label + " bound violations " + std::to_string(violations) + " over k=2..2000");
    rate.require(fit.slope <= -0.45, uc.label + " slope " + fmt("%.3g", fit.slope) + " (" +
                                         std::to_string(fit.below_floor) +
                                         " points below noise floor)");
  }
}

EquivalenceReport condat_equivalence(const ProblemSpec& p, double tau, std::size_t iters) {
  const auto m1 = MetricSchedule::shifted_gram({tau}, p.c(), p.a());
  const auto m2 = constant(MetricOperator::zero(p.m()));
  const auto tr = trace_run(p, m1, m2, iters);
  const auto init = make_primal_dual_state(p, tr[1].x, tr[0].y, tau, p.c());
  const auto ref = run_condat(p, init, iters - 1);
  return equivalence_check(points(tr), ref, 1e-10);
}

Outcome criterion_condat() {
  Outcome out;
  for (const auto& ec : ergodic_cases()) {
    const auto cp = build_problem(ec.params, 1.0, 0);
    const auto rep = condat_equivalence(cp.spec, ec.tau, 200);
    out.require(rep.pass && rep.deviation.size() == 200,
                ec.label + " max deviation " + fmt("%.3g", rep.max_deviation));
  }
  return out;
}

Outcome criterion_classical() {
  Outcome out;
  const auto cp = build_problem({"lasso-split", {}, {{"form", "g"}}}, 1.0, 0);
  const auto& p = cp.spec;
  const auto m1 = constant(MetricOperator::zero(p.n()));
  const auto m2 = constant(MetricOperator::zero(p.m()));
  const auto tr = trace_run(p, m1, m2, 100, /*force=*/true);
  const auto ref = run_classical_admm(
      p, {Vector::Zero(p.n()), Vector::Zero(p.m()), Vector::Zero(p.m()), 0}, 100);
  const auto rep = equivalence_check(points(tr), ref, 1e-12);
  out.require(rep.pass, "lasso-split max deviation " + fmt("%.3g", rep.max_deviation));
  return out;
}

struct ConvergenceCase {
  std::string label;
  ProblemParams params;
  std::function<MetricSchedule(const CatalogProblem&)> m1;
  std::function<MetricSchedule(const CatalogProblem&)> m2;
  std::function<bool(const AssumptionReport&)> flag;
};

Outcome criterion_convergence() {
  const std::vector<ConvergenceCase> cases = {
      {"(I) tv1d shifted_gram",
       {"tv1d", {}, {}},
       [](const CatalogProblem& cp) {
         return MetricSchedule::shifted_gram({0.19}, 1.0, cp.spec.a());
       },
       [](const CatalogProblem& cp) { return constant(MetricOperator::zero(cp.spec.m())); },
       [](const AssumptionReport& r) { return r.condition_i; }},
      {"(II) lasso-split-h M1=(L/2)id M2=id",
       {"lasso-split", {}, {{"form", "h"}}},
       [](const CatalogProblem& cp) {
         return constant(MetricOperator::scaled_identity(cp.spec.n(), cp.lipschitz / 2));
       },
       [](const CatalogProblem& cp) {
         return constant(MetricOperator::scaled_identity(cp.spec.m(), 1.0));
       },
       [](const AssumptionReport& r) { return r.condition_ii; }},
      {"(III) lasso-split-g M1=0 M2 decay 1/2",
       {"lasso-split", {}, {{"form", "g"}}},
       [](const CatalogProblem& cp) { return constant(MetricOperator::zero(cp.spec.n())); },
       [](const CatalogProblem& cp) {
         return MetricSchedule::geometric_decay(
             MetricOperator::scaled_identity(cp.spec.m(), 1.0), 0.5);
       },
       [](const AssumptionReport& r) { return r.condition_iii; }},
  };

  Outcome out;
  for (const auto& cc : cases) {
    const auto cp = build_problem(cc.params, 1.0, 0);
    const auto& p = cp.spec;
    const auto o = compute_oracle(p);
    const auto m1 = cc.m1(cp);
    const auto m2 = cc.m2(cp);
    const auto rep = validate_assumptions(p, m1, m2);
    StoppingRule stop;
    stop.max_iters = 10000;
    stop.kkt_tol = 1e-6;
    stop.kkt = [&](const SolverState& s) { return kkt_residual(p, s.x, s.y); };
    RunOptions opt;
    opt.keep_trace = true;
    const auto res = run(p, SolverState::zeros(p), m1, m2, stop, opt);
    record_identity(p, res.trace);
    const double final_kkt = kkt_residual(p, res.state.x, res.state.y);

    auto dist = [&](const SolverState& s) {
      return std::sqrt((s.x - o.saddle.x).squaredNorm() + (s.z - o.saddle.z).squaredNorm() +
                       (s.y - o.saddle.y).squaredNorm());
    };
    const std::size_t last = res.trace.size() - 1;
    const std::size_t start = last - std::max<std::size_t>(1, last / 10);
    // Least-squares trend of the distance over the last 10% of iterations.
    double sk = 0, sd = 0, skk = 0, skd = 0;
    const double cnt = static_cast<double>(last - start + 1);
    for (std::size_t k = start; k <= last; ++k) {
      const double d = dist(res.trace[k]);
      sk += k;
      sd += d;
      skk += static_cast<double>(k) * k;
      skd += k * d;
    }
    const double trend = (cnt * skd - sk * sd) / (cnt * skk - sk * sk);
    const double d0 = dist(res.trace[start]), d1 = dist(res.trace[last]);

    out.require(cc.flag(rep), cc.label + " hypothesis holds");
    out.require(final_kkt < 1e-6, cc.label + " kkt " + fmt("%.3g", final_kkt) + " after " +
                                      std::to_string(last) + " iterations");
    out.require(d1 < d0 && trend < 0.0, cc.label + " distance " + fmt("%.3g", d0) + " -> " +
                                            fmt("%.3g", d1) + " over last 10%");
  }
  return out;
}

std::vector<ProblemParams> all_catalog() {
  return {{"tv1d", {}, {}},
          {"lasso-split", {}, {{"form", "h"}}},
          {"lasso-split", {}, {{"form", "g"}}},
          {"box-qp", {}, {}},
          {"toy1d", {}, {}},
          {"toy1d", {}, {{"variant", "hzero"}}}};
}

std::string label_of(const ProblemParams& pp) {
  std::string s = pp.name;
  for (const auto& [k, v] : pp.strings) s += "-" + v;
  return s;
}

Outcome criterion_saddle() {
  Outcome out;
  for (const auto& pp : all_catalog()) {
    const auto cp = build_problem(pp, 1.0, 0);
    const auto o = compute_oracle(cp.spec);
    ProbeSampler sampler(o.saddle, 99);
    double worst = kInf;
    for (int i = 0; i < 100; ++i) {
      const auto s = saddle_check(cp.spec, o.saddle, sampler.next());
      worst = std::min({worst, s.dual_side, s.primal_side});
    }
    out.require(worst >= -1e-9, label_of(pp) + " min " + fmt("%.3g", worst));
  }
  return out;
}

Outcome criterion_certificates() {
  Outcome out;
  Lcg64 rng(2024);
  double worst_fd = 0.0, worst_prox = kInf;
  std::size_t functions = 0;
  for (const auto& pp : all_catalog()) {
    const auto cp = build_problem(pp, 1.0, 0);
    for (const FunctionDescriptor* f : {&cp.spec.f(), &cp.spec.h(), &cp.spec.g()}) {
      ++functions;
      const Index n = f->dim();
      if (f->is_smooth()) {
        for (int t = 0; t < 10; ++t) {
          const Vector x = rng.normal_vector(n);
          const Vector g = f->grad(x);
          for (Index i = 0; i < n; ++i) {
            Vector xp = x, xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            worst_fd = std::max(worst_fd, std::abs(g[i] - (f->eval(xp) - f->eval(xm)) / 2e-6));
          }
        }
      }
      const Vector v = 2.0 * rng.normal_vector(n);
      const double t = rng.uniform(0.1, 2.0);
      const Vector u = f->prox(v, t);
      const Vector s = (v - u) / t;
      const double fu = f->eval(u);
      for (int probe = 0; probe < 100; ++probe) {
        const Vector w = u + rng.normal_vector(n);
        const double fw = f->eval(w);
        if (!std::isfinite(fw)) continue;
        worst_prox = std::min(worst_prox, (fw - fu - s.dot(w - u)) /
                                              std::max(1.0, std::abs(fu)));
      }
    }
  }
  out.require(worst_fd <= 1e-5, "max FD gradient error " + fmt("%.3g", worst_fd));
  out.require(worst_prox >= -1e-10, "min prox certificate slack " + fmt("%.3g", worst_prox) +
                                        " over " + std::to_string(functions) + " functions");
  return out;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  Outcome gap, lemma, ineq, rate, identity, condat, classical, conv, saddle, cert;

  auto guard = [](Outcome& o, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
  };

  guard(gap, [&] { gap = criterion_gap_and_lemma(lemma); });
  guard(ineq, [&] { criteria_inequality_and_rate(ineq, rate); });
  guard(condat, [&] { condat = criterion_condat(); });
  guard(classical, [&] { classical = criterion_classical(); });
  guard(conv, [&] { conv = criterion_convergence(); });
  guard(saddle, [&] { saddle = criterion_saddle(); });
  guard(cert, [&] { cert = criterion_certificates(); });

  identity.require(g_identity_dev <= 1e-12,
                   "max deviation " + fmt("%.3g", g_identity_dev) + " over " +
                       std::to_string(g_identity_traces) + " runs");
  const double secs = seconds_since(t0);
  cert.require(secs < 120.0, "acceptance runtime " + fmt("%.1fs", secs));

  const std::vector<std::pair<std::string, const Outcome*>> rows = {
      {"ergodic gap bound", &gap},
      {"corrected inequality (v)", &ineq},
      {"O(1/sqrt k) feasibility rate", &rate},
      {"dual-update identity", &identity},
      {"primal-dual equivalence", &condat},
      {"classical ADMM degeneration", &classical},
      {"convergence under (I), (II), (III)", &conv},
      {"saddle-point inequality", &saddle},
      {"gradient and prox certificates", &cert},
      {"per-iteration lemma", &lemma},
  };
  bool all = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [name, o] = rows[i];
    all = all && o->pass;
    std::printf("[%s] %zu %s: %s\n", o->pass ? "PASS" : "FAIL", i + 1, name.c_str(),
                o->detail.c_str());
  }
  return all ? 0 : 1;
}
