#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vmadmm/error.hpp"
#include "vmadmm/linops.hpp"
#include "vmadmm/problem.hpp"
#include "vmadmm/schedule.hpp"

namespace vmadmm {

/// Iterate (x^k, z^k, y^k) of the variable-metric proximal ADMM, plus z^{k-1}.
struct SolverState {
  Vector x;
  Vector z;
  Vector y;
  Vector z_prev;
  std::size_t k = 0;

  static SolverState zeros(const ProblemSpec& p);
  /// Validates dimensions and finiteness; z_prev starts equal to z.
  static SolverState from(const ProblemSpec& p, Vector x, Vector z, Vector y);
};

/// How the x-subproblem is solved exactly.
enum class XStrategy {
  /// M1 = (1/tau) id - c A*A: the coupling cancels, one prox of f with step tau.
  kLinearized,
  /// f Zero or Quadratic: dense solve of (Q + c A*A + M1) x = rhs.
  kQuadratic,
  /// A = id and M1 diagonal: one (diagonal-metric) prox of f.
  kProxDirect,
};

const char* to_string(XStrategy s);

/// Picks the strategy for (f, A, M1); throws Error(kUnsupported) when the
/// subproblem has no exact solver, suggesting a ShiftedGram metric.
XStrategy select_x_strategy(const ProblemSpec& p, const MetricOperator& m1);

/// argmin_x f(x) + <x - x^k, grad h(x^k)> + (c/2)||Ax - z^k + y^k/c||^2
///          + (1/2)||x - x^k||^2_{M1}
Vector x_update(const ProblemSpec& p, const SolverState& s, const MetricOperator& m1);

/// argmin_z g(z) + (c/2)||Ax^{k+1} - z + y^k/c||^2 + (1/2)||z - z^k||^2_{M2}
/// M2 must be Zero/ScaledIdentity (any g) or Diagonal (separable g).
Vector z_update(const ProblemSpec& p, const SolverState& s, const Vector& x_next,
                const MetricOperator& m2);

/// y^k + c (A x^{k+1} - z^{k+1}).
Vector y_update(const SolverState& s, const Vector& x_next, const Vector& z_next,
                double c, const LinearMap& a);

/// Distance of -grad h(x^k) + c A*(z^k - y^k/c - A x^{k+1}) + M1 (x^k - x^{k+1})
/// to the subdifferential of f at x^{k+1}. Zero at an exact x-update.
double x_update_residual(const ProblemSpec& p, const SolverState& s,
                         const MetricOperator& m1, const Vector& x_next);

/// Distance of c (A x^{k+1} - z^{k+1} + y^k/c) + M2 (z^k - z^{k+1}) to the
/// subdifferential of g at z^{k+1}.
double z_update_residual(const ProblemSpec& p, const SolverState& s,
                         const Vector& x_next, const Vector& z_next,
                         const MetricOperator& m2);

/// One full iteration with M1^k = sched1.at(k), M2^k = sched2.at(k).
SolverState step(const ProblemSpec& p, const SolverState& s,
                 const MetricSchedule& sched1, const MetricSchedule& sched2);

/// Which convergence hypotheses the metric schedules satisfy.
///
/// Every flag already includes the hypotheses shared by its theorem
/// (monotone schedules, and M1^k - (L/2) id PSD for (I)/(II)).
struct AssumptionReport {
  double lipschitz = 0.0;
  std::size_t horizon_checked = 0;

  bool m1_monotone = true;
  bool m2_monotone = true;
  double min_eig_m1 = 0.0;
  double min_eig_m1_minus_half_l = 0.0;
  double min_eig_m1_minus_l = 0.0;
  double min_eig_m2 = 0.0;
  double min_eig_ata = 0.0;

  /// M1^k - (L/2) id in P_alpha1.
  bool condition_i = false;
  double alpha1 = 0.0;
  /// A*A in P_alpha and M2^k in P_alpha2.
  bool condition_ii = false;
  double alpha = 0.0;
  double alpha2 = 0.0;
  /// h = 0, A*A in P_alpha, 2 M2^{k+1} >= M2^k >= M2^{k+1}.
  bool condition_iii = false;
  /// M1^k - L id PSD and both schedules monotone (ergodic gap bound).
  bool ergodic_ok = false;

  std::vector<std::string> notes;

  /// At least one theorem's hypotheses hold.
  bool permits_run() const {
    return ergodic_ok || condition_i || condition_ii || condition_iii;
  }
  std::string summary() const;
};

/// Checks schedules over k = 0..horizon (fewer when both schedules become
/// stationary earlier), plus the limiting metric of non-stationary schedules.
AssumptionReport validate_assumptions(const ProblemSpec& p, const MetricSchedule& sched1,
                                      const MetricSchedule& sched2,
                                      std::size_t horizon = 64);

struct StoppingRule {
  std::size_t max_iters = 1000;
  /// Stop once kkt(state) <= kkt_tol. Both must be set to take effect.
  std::optional<double> kkt_tol;
  std::function<double(const SolverState&)> kkt;
};

struct IterationRecord {
  std::size_t k = 0;
  /// ||A x^k - z^k||
  double residual_primal = 0.0;
  double step_x = 0.0;
  double step_z = 0.0;
  double step_y = 0.0;
  /// Only filled when the stopping rule has a KKT function.
  std::optional<double> kkt;
};

struct RunOptions {
  /// Run even if no theorem's hypotheses hold.
  bool force = false;
  /// Keep every state (including the initial one) in RunResult::trace.
  bool keep_trace = false;
  std::size_t validation_horizon = 64;
};

struct RunResult {
  SolverState state;
  std::vector<IterationRecord> log;
  std::vector<SolverState> trace;
  AssumptionReport assumptions;
  bool stopped_on_kkt = false;
};

/// Validates the schedules (throws AssumptionViolation unless permitted or
/// forced), then iterates step() until the stopping rule fires. Throws
/// NonFiniteIterate naming the iteration if any component blows up.
RunResult run(const ProblemSpec& p, const SolverState& init, const MetricSchedule& sched1,
              const MetricSchedule& sched2, const StoppingRule& stop,
              const RunOptions& options = {});

class AssumptionViolation : public Error {
 public:
  explicit AssumptionViolation(AssumptionReport report);
  const AssumptionReport& report() const noexcept { return report_; }

 private:
  AssumptionReport report_;
};

}  // namespace vmadmm
