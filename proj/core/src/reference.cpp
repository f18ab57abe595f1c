#include "vmadmm/reference.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>

namespace vmadmm {

namespace {

double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("equivalence check", a.size(), b.size());
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

void record(EquivalenceReport& r, std::size_t j, double dev, double tol) {
  r.deviation.push_back(dev);
  r.max_deviation = std::max(r.max_deviation, dev);
  if (!(dev <= tol) && r.pass) {
    r.pass = false;
    r.first_offending = j;
  }
}

void length_mismatch(std::size_t expected, std::size_t actual) {
  throw Error(ErrorCode::kDimensionMismatch,
              "equivalence check: expected " + std::to_string(expected) +
                  " reference states, got " + std::to_string(actual));
}

}  // namespace

AdmmState classical_admm_step(const ProblemSpec& p, const AdmmState& s) {
  if (p.h().kind() != FunctionDescriptor::Kind::kZero) {
    throw Error(ErrorCode::kUnsupported, "classical ADMM needs h = 0");
  }
  const double c = p.c();
  const LinearMap& a = p.a();
  const Vector w = s.z - s.y / c;

  AdmmState out;
  if (a.is_identity()) {
    out.x = p.f().prox(w, 1.0 / c);
  } else if (p.f().kind() == FunctionDescriptor::Kind::kZero ||
             p.f().kind() == FunctionDescriptor::Kind::kQuadratic) {
    const Matrix ad = a.to_dense();
    Matrix k = c * (ad.transpose() * ad);
    Vector rhs = c * (ad.transpose() * w);
    if (p.f().kind() == FunctionDescriptor::Kind::kQuadratic) {
      k += p.f().q_matrix();
      rhs -= p.f().q_vector();
    }
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kSingularSystem, "classical ADMM: Q + c A*A is singular");
    }
    out.x = llt.solve(rhs);
  } else {
    throw Error(ErrorCode::kUnsupported,
                "classical ADMM: x-subproblem has no closed form for f = " + p.f().describe());
  }
  out.z = p.g().prox(a.apply(out.x) + s.y / c, 1.0 / c);
  out.y = s.y + c * (a.apply(out.x) - out.z);
  out.k = s.k + 1;
  return out;
}

std::vector<AdmmState> run_classical_admm(const ProblemSpec& p, AdmmState init,
                                          std::size_t steps) {
  std::vector<AdmmState> trace;
  trace.reserve(steps + 1);
  trace.push_back(std::move(init));
  for (std::size_t j = 0; j < steps; ++j) trace.push_back(classical_admm_step(p, trace.back()));
  return trace;
}

PrimalDualState make_primal_dual_state(const ProblemSpec& p, Vector x, Vector y, double tau,
                                       double c) {
  require_dim(x, p.n(), "primal-dual x");
  require_dim(y, p.m(), "primal-dual y");
  if (!(tau > 0.0) || !(c > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "primal-dual step sizes must be positive");
  }
  PrimalDualState s;
  s.norm_a = operator_norm(p.a());
  const double margin = 1.0 / tau - c * s.norm_a * s.norm_a;
  if (!(margin > 0.5 * p.lipschitz())) {
    throw Error(ErrorCode::kInvalidArgument,
                "primal-dual step sizes violate 1/tau - c ||A||^2 > L/2 (margin " +
                    std::to_string(margin) + ", L/2 = " + std::to_string(0.5 * p.lipschitz()) +
                    ")");
  }
  s.x = std::move(x);
  s.y = std::move(y);
  s.y_prev = s.y;
  s.tau = tau;
  s.c = c;
  return s;
}

PrimalDualState condat_step(const ProblemSpec& p, const PrimalDualState& s) {
  const LinearMap& a = p.a();
  PrimalDualState out;
  out.y = p.g().prox_conjugate(s.y + s.c * a.apply(s.x), s.c);
  const Vector v = s.x - s.tau * p.h().grad(s.x) - s.tau * a.adjoint(2.0 * out.y - s.y);
  out.x = p.f().prox(v, s.tau);
  out.y_prev = s.y;
  out.k = s.k + 1;
  out.tau = s.tau;
  out.c = s.c;
  out.norm_a = s.norm_a;
  return out;
}

std::vector<PrimalDualState> run_condat(const ProblemSpec& p, PrimalDualState init,
                                        std::size_t steps, const std::vector<double>& taus) {
  const double half_l = 0.5 * p.lipschitz();
  for (double t : taus) {
    if (!(t > 0.0) || !(1.0 / t - init.c * init.norm_a * init.norm_a > half_l)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "primal-dual step size " + std::to_string(t) + " violates 1/tau - c ||A||^2 > L/2");
    }
  }
  std::vector<PrimalDualState> trace;
  trace.reserve(steps + 1);
  trace.push_back(std::move(init));
  for (std::size_t j = 0; j < steps; ++j) {
    PrimalDualState cur = trace.back();
    if (!taus.empty()) cur.tau = taus[std::min(j, taus.size() - 1)];
    trace.push_back(condat_step(p, cur));
  }
  return trace;
}

EquivalenceReport equivalence_check(const std::vector<TracePoint>& solver,
                                    const std::vector<PrimalDualState>& reference,
                                    double tol) {
  if (solver.size() != reference.size() + 1) length_mismatch(solver.size() - 1, reference.size());
  EquivalenceReport r;
  for (std::size_t j = 0; j < reference.size(); ++j) {
    const double dev = std::max(max_abs_diff(solver[j + 1].x, reference[j].x),
                                max_abs_diff(solver[j].y, reference[j].y));
    record(r, j, dev, tol);
  }
  return r;
}

EquivalenceReport equivalence_check(const std::vector<TracePoint>& solver,
                                    const std::vector<AdmmState>& reference, double tol) {
  if (solver.size() != reference.size()) length_mismatch(solver.size(), reference.size());
  EquivalenceReport r;
  for (std::size_t j = 0; j < reference.size(); ++j) {
    const double dev = std::max({max_abs_diff(solver[j].x, reference[j].x),
                                 max_abs_diff(solver[j].z, reference[j].z),
                                 max_abs_diff(solver[j].y, reference[j].y)});
    record(r, j, dev, tol);
  }
  return r;
}

}  // namespace vmadmm
