#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "vmadmm/error.hpp"
#include "vmadmm/linops.hpp"
#include "vmadmm/problem.hpp"
#include "vmadmm/random.hpp"
#include "vmadmm/schedule.hpp"
#include "vmadmm/solver.hpp"

namespace vmadmm {

/// A point (x, z, y) at which certificates are evaluated.
struct Probe {
  Vector x;
  Vector z;
  Vector y;
};

/// f(x) + h(x) + g(z) + <y, Ax - z>, +inf outside the domain.
double lagrangian(const ProblemSpec& p, const Vector& x, const Vector& z, const Vector& y);
inline double lagrangian(const ProblemSpec& p, const Probe& q) {
  return lagrangian(p, q.x, q.z, q.y);
}

/// lagrangian + (c/2) ||Ax - z||^2.
double augmented_lagrangian(const ProblemSpec& p, const Vector& x, const Vector& z,
                            const Vector& y);

/// (c/2)||Ax - z0||^2 + (1/2)(||x - x0||^2_{M1^0} + ||z - z0||^2_{M2^0})
///   + (1/2c)||y - y0||^2
double gamma(const ProblemSpec& p, const SolverState& init, const MetricOperator& m1_0,
             const MetricOperator& m2_0, const Probe& probe);

/// Running means of x^1..x^k, z^1..z^k, y^1..y^k with compensated summation.
class ErgodicState {
 public:
  ErgodicState() = default;
  void add(const SolverState& s);

  std::size_t k() const { return k_; }
  const Vector& x_bar() const { return x_bar_; }
  const Vector& z_bar() const { return z_bar_; }
  const Vector& y_bar() const { return y_bar_; }

 private:
  struct Kahan {
    Vector sum;
    Vector comp;
    void add(const Vector& v);
  };
  std::size_t k_ = 0;
  Kahan x_, z_, y_;
  Vector x_bar_, z_bar_, y_bar_;
};

struct GapCertificate {
  std::size_t k = 0;
  /// l(x_bar, z_bar, y) - l(x, z, y_bar); -inf when the probe lies outside the domain.
  double gap = 0.0;
  /// gamma / k
  double bound = 0.0;
  double slack = 0.0;
  Probe probe;
};

/// Requires e.k() >= 1.
GapCertificate gap_certificate(const ProblemSpec& p, const ErgodicState& e,
                               const Probe& probe, double gamma0);

/// u^k and v^{k+1} (plus u^{k+1} and ||z^{k+1} - z^k||^2, needed by the
/// corrected inequality).
struct SequencePair {
  std::size_t k = 0;
  double u = 0.0;
  double v = 0.0;
  double u_next = 0.0;
  double dz_sq = 0.0;
};

/// One pair per consecutive (s_i, s_{i+1}) in `trace` with s_i.k >= 1.
/// Only for h = 0 and constant schedules; throws Error(kUnsupported) otherwise.
std::vector<SequencePair> sequence_uv(const ProblemSpec& p,
                                      const std::vector<SolverState>& trace,
                                      const Probe& saddle, const MetricSchedule& sched1,
                                      const MetricSchedule& sched2);

struct InequalityReport {
  std::vector<std::size_t> k;
  /// (u^k - u^{k+1}) - (v^{k+1} - c ||z^{k+1} - z^k||^2)
  std::vector<double> slack;
  /// (u^k - u^{k+1}) - v^{k+1}, the version without the z correction.
  std::vector<double> uncorrected_slack;
  double min_slack = kInf;
  std::size_t min_slack_k = 0;
  std::size_t uncorrected_violations = 0;
  std::optional<std::size_t> first_uncorrected_violation;

  bool holds(double tol = 1e-10) const { return min_slack >= -tol; }
};

InequalityReport inequality_v_check(const std::vector<SequencePair>& pairs, double c);

struct MonotoneReport {
  bool holds = true;
  std::optional<std::size_t> first_violation;
};

/// v^{k+1} <= v^k + tol along the stream.
MonotoneReport v_monotone_check(const std::vector<SequencePair>& pairs, double tol = 1e-10);

/// c * sum ||z^{k+1} - z^k||^2 over the pairs.
double accumulated_z_steps(const std::vector<SequencePair>& pairs, double c);

struct FeasibilityPoint {
  std::size_t k = 0;
  double residual = 0.0;
  double bound = 0.0;
};

/// ||A x^k - z^k|| and sqrt((u1 + S) / (c (k - 1))) for every state with k >= 2.
std::vector<FeasibilityPoint> feasibility_rate(const ProblemSpec& p,
                                               const std::vector<SolverState>& trace,
                                               double u1, double s);

struct SlopeFit {
  /// Least-squares slope of log(value) against log(k); -inf when every value
  /// in the window is below the noise floor.
  double slope = 0.0;
  std::size_t points = 0;
  std::size_t below_floor = 0;
};

/// Fits over k in [k_lo, k_hi], ignoring values below `floor`.
SlopeFit log_log_slope(const std::vector<std::size_t>& k, const std::vector<double>& values,
                       std::size_t k_lo, std::size_t k_hi, double floor = 1e-13);

/// max(dist(-A*y - grad h(x), df(x)), dist(y, dg(Ax))).
double kkt_residual(const ProblemSpec& p, const Vector& x, const Vector& y);

/// RHS - LHS of the per-iteration inequality
///   l(x^{k+1}, z^{k+1}, y) <= l(x, z, y^{k+1}) + c <z^{k+1} - z^k, A(x - x^{k+1})>
///     + (1/2)(||x - x^k||^2_{M1} + ||z - z^k||^2_{M2} + c^{-1}||y - y^k||^2)
///     - (1/2)(||x - x^{k+1}||^2_{M1} + ||z - z^{k+1}||^2_{M2} + c^{-1}||y - y^{k+1}||^2)
///     - (1/2)(||x^{k+1} - x^k||^2_{M1} - L||x^{k+1} - x^k||^2
///             + ||z^{k+1} - z^k||^2_{M2} + c^{-1}||y^{k+1} - y^k||^2)
/// with M1 = M1^k, M2 = M2^k. nullopt when the probe lies outside the domain.
std::optional<double> lemma_inequality_check(const ProblemSpec& p, const SolverState& prev,
                                             const SolverState& next,
                                             const MetricOperator& m1,
                                             const MetricOperator& m2, const Probe& probe);

/// RHS - LHS of
///   c <z^{k+1} - z^k, A(x - x^{k+1})>
///     <= (c/2)(||Ax - z^k||^2 - ||Ax - z^{k+1}||^2) + (1/2c)||y^{k+1} - y^k||^2.
double lemma_second_check(const ProblemSpec& p, const SolverState& prev,
                          const SolverState& next, const Vector& x);

/// (L/2)||x^{k+1} - x^k||^2 - (h(x^{k+1}) - h(x) + <grad h(x^k), x - x^{k+1}>).
double descent_lemma_check(const ProblemSpec& p, const SolverState& prev,
                           const SolverState& next, const Vector& x);

struct SaddleSlack {
  /// l(x*, z*, y*) - l(x*, z*, y)
  double dual_side = 0.0;
  /// l(x, z, y*) - l(x*, z*, y*)
  double primal_side = 0.0;
};

SaddleSlack saddle_check(const ProblemSpec& p, const Probe& saddle, const Probe& probe);

/// -f*(-A*y) - g*(y) when h = 0, -h*(-A*y) - g*(y) when f = 0.
/// Throws Error(kUnsupported) otherwise or when a conjugate is unavailable.
double dual_objective(const ProblemSpec& p, const Vector& y);

struct SummabilityReport {
  /// Totals of ||z^k - Ax^{k+1}||^2, ||x^k - x^{k+1}||^2_{M1^k - (L/2) id} and
  /// ||z^k - z^{k+1}||^2_{M2^k}.
  double total[3] = {0.0, 0.0, 0.0};
  /// Share of each total contributed by the last quarter of the trace.
  double last_quarter_share[3] = {0.0, 0.0, 0.0};

  bool bounded(double share = 0.01) const;
};

SummabilityReport summability_check(const ProblemSpec& p,
                                    const std::vector<SolverState>& trace,
                                    const MetricSchedule& sched1,
                                    const MetricSchedule& sched2);

/// Deterministic probes drawn uniformly from a ball around a center point
/// (the ball lives in the product space of x, z and y).
class ProbeSampler {
 public:
  ProbeSampler(Probe center, std::uint64_t seed, double radius = 1.0);
  Probe next();

 private:
  Probe center_;
  Lcg64 rng_;
  double radius_;
};

}  // namespace vmadmm
