#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "vmadmm/diagnostics.hpp"
#include "vmadmm/problem.hpp"

namespace vmadmm {

struct OracleResult {
  /// Saddle point estimate with z = Ax (moved onto dom g when rounding
  /// leaves Ax just outside it).
  Probe saddle;
  double kkt = 0.0;
  std::size_t iterations = 0;
  std::string method;
};

/// Approximates a saddle point to kkt_residual < `target`.
///
/// Uses textbook ADMM when h = 0 and A = id, the primal-dual iteration with
/// conservative steps otherwise. Iterates until the KKT residual stops
/// improving (checked every 100 iterations) or the budget is spent, and keeps
/// the best iterate. Throws NotConverged carrying the best residual when the
/// target is missed.
/// `warm` seeds the iteration with (x, y) instead of zeros.
OracleResult compute_oracle(const ProblemSpec& p, std::size_t budget = 1000000,
                            double target = 1e-10,
                            const std::optional<Probe>& warm = std::nullopt);

}  // namespace vmadmm
