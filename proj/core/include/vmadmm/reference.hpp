#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vmadmm/error.hpp"
#include "vmadmm/functions.hpp"
#include "vmadmm/linops.hpp"
#include "vmadmm/problem.hpp"

namespace vmadmm {

/// Textbook ADMM iterate.
struct AdmmState {
  Vector x;
  Vector z;
  Vector y;
  std::size_t k = 0;
};

/// x+ = argmin f(x) + (c/2)||Ax - z + y/c||^2
/// z+ = argmin g(z) + (c/2)||Ax+ - z + y/c||^2
/// y+ = y + c(Ax+ - z+)
/// Requires h = 0 and either A = id or f Zero/Quadratic.
AdmmState classical_admm_step(const ProblemSpec& p, const AdmmState& s);

std::vector<AdmmState> run_classical_admm(const ProblemSpec& p, AdmmState init,
                                          std::size_t steps);

/// State of the primal-dual iteration
///   y+ = prox_{c g*}(y + c A x)
///   x+ = prox_{tau f}(x - tau grad h(x) - tau A*(2 y+ - y))
struct PrimalDualState {
  Vector x;
  Vector y;
  Vector y_prev;
  std::size_t k = 0;
  double tau = 0.0;
  double c = 0.0;
  double norm_a = 0.0;
};

/// Validates tau, c > 0 and 1/tau - c ||A||^2 > L/2.
PrimalDualState make_primal_dual_state(const ProblemSpec& p, Vector x, Vector y, double tau,
                                       double c);

PrimalDualState condat_step(const ProblemSpec& p, const PrimalDualState& s);

/// Runs `steps` iterations; the returned trace starts with `init`. A non-empty
/// `taus` sets the step size of iteration j to taus[min(j, size - 1)].
std::vector<PrimalDualState> run_condat(const ProblemSpec& p, PrimalDualState init,
                                        std::size_t steps,
                                        const std::vector<double>& taus = {});

/// An iterate of any implementation, reduced to what is compared.
struct TracePoint {
  Vector x;
  Vector z;
  Vector y;
};

struct EquivalenceReport {
  /// Largest componentwise deviation per compared index.
  std::vector<double> deviation;
  double max_deviation = 0.0;
  bool pass = true;
  std::optional<std::size_t> first_offending;
};

/// Compares a solver trace (x^0, ...) with a primal-dual trace started from
/// (x^1, y^0): entry j of the reference pairs with solver x^{j+1} and y^j.
/// Requires solver.size() == reference.size() + 1.
EquivalenceReport equivalence_check(const std::vector<TracePoint>& solver,
                                    const std::vector<PrimalDualState>& reference,
                                    double tol);

/// Same-index comparison of x, z and y. Requires equal lengths.
EquivalenceReport equivalence_check(const std::vector<TracePoint>& solver,
                                    const std::vector<AdmmState>& reference, double tol);

}  // namespace vmadmm
