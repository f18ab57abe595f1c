#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vmadmm/diagnostics.hpp"
#include "vmadmm/problem.hpp"

namespace vmadmm {

/// Name and parameters of a built-in test problem.
struct ProblemParams {
  std::string name;
  std::map<std::string, double> numbers;
  std::map<std::string, std::string> strings;

  bool operator==(const ProblemParams&) const = default;
};

struct CatalogProblem {
  std::string name;
  ProblemSpec spec;
  /// Lipschitz constant of grad h.
  double lipschitz = 0.0;
  /// ||A|| by power iteration.
  double norm_a = 0.0;
  /// Closed-form saddle point, when the instance has one.
  std::optional<Probe> known_saddle;
};

/// Builds one of
///   tv1d        n, lambda, noise        f = 0, h = (1/2)||x - b||^2, g = lambda ||.||_1,
///                                       A = forward difference, b a seeded noisy ramp
///   lasso-split n, m, lambda, form      f = lambda ||.||_1, A = id and the least-squares
///                                       term (1/2)||Bx - b||^2 as h (form "h") or g (form "g")
///   box-qp      n                       f = box [-1, 1], h = random convex quadratic, g = 0
///   toy1d       lambda, b, lo, hi,      one-dimensional instances with known saddle points:
///               variant                 "smooth": f = lambda|x|, h = (1/2)(x - b)^2,
///                                       g = box [lo, hi]; "hzero": f = lambda|x|, h = 0,
///                                       g = (1/2)(z - b)^2
/// Throws Error(kInvalidArgument) on unknown names, keys or bad values.
CatalogProblem build_problem(const ProblemParams& params, double c, std::uint64_t seed);

/// Names accepted by build_problem.
std::vector<std::string> catalog_names();

/// Parameter keys accepted for a catalog problem; empty for unknown names.
std::vector<std::string> catalog_parameters(const std::string& name);

/// The data vector b of tv1d (exposed for tests).
Vector tv1d_signal(Index n, double noise, std::uint64_t seed);

}  // namespace vmadmm
