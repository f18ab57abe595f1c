#include "vmadmm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

namespace vmadmm {

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

bool same_map(const LinearMap& a, const LinearMap& b) {
  if (a.same_as(b)) return true;
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.is_identity() && b.is_identity()) return true;
  return a.to_dense() == b.to_dense();
}

double min_eig(const MetricOperator& m, double shift) {
  if (m.is_diagonal()) return m.diagonal_entries().minCoeff() + shift;
  return smallest_eigenpair(m.shifted_dense(shift)).value;
}

std::string describe_witness(const Vector& w) {
  Index idx = 0;
  w.cwiseAbs().maxCoeff(&idx);
  std::ostringstream os;
  os << "witness direction peaks at coordinate " << idx;
  return os.str();
}

}  // namespace

SolverState SolverState::zeros(const ProblemSpec& p) {
  SolverState s;
  s.x = Vector::Zero(p.n());
  s.z = Vector::Zero(p.m());
  s.y = Vector::Zero(p.m());
  s.z_prev = s.z;
  return s;
}

SolverState SolverState::from(const ProblemSpec& p, Vector x, Vector z, Vector y) {
  require_dim(x, p.n(), "initial x");
  require_dim(z, p.m(), "initial z");
  require_dim(y, p.m(), "initial y");
  require_finite(x, "initial x");
  require_finite(z, "initial z");
  require_finite(y, "initial y");
  SolverState s;
  s.x = std::move(x);
  s.z = std::move(z);
  s.y = std::move(y);
  s.z_prev = s.z;
  return s;
}

const char* to_string(XStrategy s) {
  switch (s) {
    case XStrategy::kLinearized: return "linearized";
    case XStrategy::kQuadratic: return "quadratic";
    case XStrategy::kProxDirect: return "prox-direct";
  }
  return "unknown";
}

XStrategy select_x_strategy(const ProblemSpec& p, const MetricOperator& m1) {
  if (m1.dim() != p.n()) throw DimensionMismatch("M1", p.n(), m1.dim());
  if (m1.form() == MetricOperator::Form::kShiftedGram && m1.gram_c() == p.c() &&
      m1.gram_map() && same_map(*m1.gram_map(), p.a())) {
    return XStrategy::kLinearized;
  }
  if (p.a().is_identity() && m1.is_diagonal() &&
      (m1.scalar() || p.f().is_separable())) {
    return XStrategy::kProxDirect;
  }
  const auto kind = p.f().kind();
  if (kind == FunctionDescriptor::Kind::kZero || kind == FunctionDescriptor::Kind::kQuadratic) {
    return XStrategy::kQuadratic;
  }
  throw Error(ErrorCode::kUnsupported,
              std::string("x-update has no exact solver for f = ") + p.f().describe() +
                  " with M1 of form " + to_string(m1.form()) +
                  "; use a ShiftedGram metric M1 = (1/tau) id - c A*A with the problem's c and A");
}

Vector x_update(const ProblemSpec& p, const SolverState& s, const MetricOperator& m1) {
  const double c = p.c();
  const Vector grad_h = p.h().grad(s.x);
  switch (select_x_strategy(p, m1)) {
    case XStrategy::kLinearized: {
      const double tau = m1.tau();
      const Vector resid = p.a().apply(s.x) - s.z + s.y / c;
      const Vector v = s.x - tau * grad_h - (tau * c) * p.a().adjoint(resid);
      return p.f().prox(v, tau);
    }
    case XStrategy::kProxDirect: {
      const Vector w = s.z - s.y / c;
      if (auto mu = m1.scalar()) {
        if (*mu == 0.0) return p.f().prox(w - grad_h / c, 1.0 / c);
        const double d = c + *mu;
        const Vector v = (c * w + *mu * s.x - grad_h) / d;
        return p.f().prox(v, 1.0 / d);
      }
      const Vector d = m1.diagonal_entries().array() + c;
      const Vector v = (c * w + m1.apply(s.x) - grad_h).cwiseQuotient(d);
      return p.f().prox_diag(v, d);
    }
    case XStrategy::kQuadratic: {
      const Matrix a = p.a().to_dense();
      Matrix k = c * (a.transpose() * a) + m1.to_dense();
      Vector rhs = -grad_h + c * (a.transpose() * (s.z - s.y / c)) + m1.apply(s.x);
      if (p.f().kind() == FunctionDescriptor::Kind::kQuadratic) {
        k += p.f().q_matrix();
        rhs -= p.f().q_vector();
      }
      Eigen::LLT<Matrix> llt(k);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::kSingularSystem,
                    "x-update: Q + c A*A + M1 is singular; add a positive definite M1");
      }
      Vector x = llt.solve(rhs);
      return x;
    }
  }
  throw Error(ErrorCode::kUnsupported, "x-update: unknown strategy");
}

Vector z_update(const ProblemSpec& p, const SolverState& s, const Vector& x_next,
                const MetricOperator& m2) {
  if (m2.dim() != p.m()) throw DimensionMismatch("M2", p.m(), m2.dim());
  const double c = p.c();
  const Vector w = p.a().apply(x_next) + s.y / c;
  if (auto mu = m2.scalar()) {
    if (*mu == 0.0) return p.g().prox(w, 1.0 / c);
    const double d = c + *mu;
    return p.g().prox((c * w + *mu * s.z) / d, 1.0 / d);
  }
  if (m2.is_diagonal()) {
    if (!p.g().is_separable()) {
      throw Error(ErrorCode::kUnsupported,
                  "z-update: diagonal M2 needs a separable g, got " + p.g().describe());
    }
    const Vector d = m2.diagonal_entries().array() + c;
    return p.g().prox_diag((c * w + m2.apply(s.z)).cwiseQuotient(d), d);
  }
  throw Error(ErrorCode::kUnsupported,
              std::string("z-update: M2 of form ") + to_string(m2.form()) +
                  " is not supported; use zero, scaled identity or diagonal");
}

Vector y_update(const SolverState& s, const Vector& x_next, const Vector& z_next,
                double c, const LinearMap& a) {
  require_dim(x_next, a.cols(), "y-update x");
  require_dim(z_next, a.rows(), "y-update z");
  require_dim(s.y, a.rows(), "y-update y");
  const Vector r = a.apply(x_next) - z_next;
  return s.y + c * r;
}

double x_update_residual(const ProblemSpec& p, const SolverState& s,
                         const MetricOperator& m1, const Vector& x_next) {
  const double c = p.c();
  const Vector sub = -p.h().grad(s.x) +
                     c * p.a().adjoint(s.z - s.y / c - p.a().apply(x_next)) +
                     m1.apply(s.x - x_next);
  return p.f().subgradient_distance(x_next, sub);
}

double z_update_residual(const ProblemSpec& p, const SolverState& s,
                         const Vector& x_next, const Vector& z_next,
                         const MetricOperator& m2) {
  const double c = p.c();
  const Vector sub = c * (p.a().apply(x_next) - z_next + s.y / c) + m2.apply(s.z - z_next);
  return p.g().subgradient_distance(z_next, sub);
}

SolverState step(const ProblemSpec& p, const SolverState& s,
                 const MetricSchedule& sched1, const MetricSchedule& sched2) {
  SolverState next;
  next.x = x_update(p, s, sched1.at(s.k));
  next.z = z_update(p, s, next.x, sched2.at(s.k));
  next.y = y_update(s, next.x, next.z, p.c(), p.a());
  next.z_prev = s.z;
  next.k = s.k + 1;
  return next;
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  os << "assumptions (L = " << lipschitz << ", checked k = 0.." << horizon_checked << ")\n";
  os << "  M1 nonincreasing: " << yn(m1_monotone) << "\n";
  os << "  M2 nonincreasing: " << yn(m2_monotone) << "\n";
  os << "  min eig M1 - (L/2) id: " << min_eig_m1_minus_half_l << "\n";
  os << "  min eig M1 - L id: " << min_eig_m1_minus_l << "\n";
  os << "  min eig M2: " << min_eig_m2 << "\n";
  os << "  min eig A*A: " << min_eig_ata << "\n";
  os << "  condition (I): " << yn(condition_i);
  if (condition_i) os << " (alpha1 = " << alpha1 << ")";
  os << "\n  condition (II): " << yn(condition_ii);
  if (condition_ii) os << " (alpha = " << alpha << ", alpha2 = " << alpha2 << ")";
  os << "\n  condition (III): " << yn(condition_iii);
  os << "\n  ergodic rate hypotheses: " << yn(ergodic_ok) << "\n";
  for (const auto& n : notes) os << "  note: " << n << "\n";
  return os.str();
}

AssumptionReport validate_assumptions(const ProblemSpec& p, const MetricSchedule& sched1,
                                      const MetricSchedule& sched2, std::size_t horizon) {
  if (sched1.dim() != p.n()) throw DimensionMismatch("M1 schedule", p.n(), sched1.dim());
  if (sched2.dim() != p.m()) throw DimensionMismatch("M2 schedule", p.m(), sched2.dim());
  constexpr double kPsdTol = 1e-10;
  constexpr double kAlphaMin = 1e-10;

  AssumptionReport r;
  const double l = p.lipschitz();
  r.lipschitz = l;

  const auto s1 = sched1.stationary_after();
  const auto s2 = sched2.stationary_after();
  std::size_t last = horizon;
  if (s1 && s2) last = std::min(horizon, std::max<std::size_t>({*s1, *s2, 1}));
  last = std::max<std::size_t>(last, 1);
  r.horizon_checked = last;

  r.min_eig_m1 = kInf;
  r.min_eig_m1_minus_half_l = kInf;
  r.min_eig_m1_minus_l = kInf;
  r.min_eig_m2 = kInf;
  bool m2_doubling = true;

  auto absorb_m1 = [&](const MetricOperator& m) {
    r.min_eig_m1 = std::min(r.min_eig_m1, min_eig(m, 0.0));
    r.min_eig_m1_minus_half_l = std::min(r.min_eig_m1_minus_half_l, min_eig(m, -0.5 * l));
    r.min_eig_m1_minus_l = std::min(r.min_eig_m1_minus_l, min_eig(m, -l));
  };
  auto absorb_m2 = [&](const MetricOperator& m) {
    r.min_eig_m2 = std::min(r.min_eig_m2, min_eig(m, 0.0));
  };

  MetricOperator m1_prev = sched1.at(0);
  MetricOperator m2_prev = sched2.at(0);
  absorb_m1(m1_prev);
  absorb_m2(m2_prev);
  for (std::size_t k = 1; k <= last; ++k) {
    MetricOperator m1 = sched1.at(k);
    MetricOperator m2 = sched2.at(k);
    absorb_m1(m1);
    absorb_m2(m2);
    if (r.m1_monotone) {
      const auto lw = loewner_geq(m1_prev, m1, kPsdTol);
      if (!lw.holds) {
        r.m1_monotone = false;
        std::ostringstream os;
        os << "M1^" << k - 1 << " - M1^" << k << " has eigenvalue " << lw.min_eigenvalue
           << "; " << describe_witness(lw.witness);
        r.notes.push_back(os.str());
      }
    }
    if (r.m2_monotone) {
      const auto lw = loewner_geq(m2_prev, m2, kPsdTol);
      if (!lw.holds) {
        r.m2_monotone = false;
        std::ostringstream os;
        os << "M2^" << k - 1 << " - M2^" << k << " has eigenvalue " << lw.min_eigenvalue
           << "; " << describe_witness(lw.witness);
        r.notes.push_back(os.str());
      }
    }
    if (m2_doubling) {
      const auto lw = loewner_geq(m2.scaled(2.0), m2_prev, kPsdTol);
      if (!lw.holds) {
        m2_doubling = false;
        std::ostringstream os;
        os << "2 M2^" << k << " - M2^" << k - 1 << " has eigenvalue " << lw.min_eigenvalue;
        r.notes.push_back(os.str());
      }
    }
    m1_prev = std::move(m1);
    m2_prev = std::move(m2);
  }
  if (!s1) absorb_m1(sched1.limit());
  if (!s2) absorb_m2(sched2.limit());

  if (p.a().is_identity()) {
    r.min_eig_ata = 1.0;
  } else if (p.a().is_zero()) {
    r.min_eig_ata = 0.0;
  } else {
    const Matrix a = p.a().to_dense();
    r.min_eig_ata = smallest_eigenpair(Matrix(a.transpose() * a)).value;
  }

  const bool monotone = r.m1_monotone && r.m2_monotone;
  const bool half_l_psd = r.min_eig_m1_minus_half_l >= -kPsdTol;

  r.alpha1 = r.min_eig_m1_minus_half_l;
  r.condition_i = monotone && r.alpha1 > kAlphaMin;

  r.alpha = r.min_eig_ata;
  r.alpha2 = r.min_eig_m2;
  r.condition_ii = monotone && half_l_psd && r.alpha > kAlphaMin && r.alpha2 > kAlphaMin;

  const bool h_zero = p.h().kind() == FunctionDescriptor::Kind::kZero;
  r.condition_iii = h_zero && monotone && m2_doubling && r.alpha > kAlphaMin &&
                    r.min_eig_m1 >= -kPsdTol;

  r.ergodic_ok = monotone && r.min_eig_m1_minus_l >= -kPsdTol;

  if (!half_l_psd) {
    std::ostringstream os;
    os << "M1 - (L/2) id is not PSD (min eigenvalue " << r.min_eig_m1_minus_half_l << ")";
    r.notes.push_back(os.str());
  }
  if (!h_zero) r.notes.push_back("condition (III) needs h = 0");
  if (r.alpha <= kAlphaMin) r.notes.push_back("A*A is not positive definite");
  return r;
}

AssumptionViolation::AssumptionViolation(AssumptionReport report)
    : Error(ErrorCode::kAssumptionViolated,
            "no convergence theorem applies to these metric schedules (pass force to run "
            "anyway)\n" + report.summary()),
      report_(std::move(report)) {}

RunResult run(const ProblemSpec& p, const SolverState& init, const MetricSchedule& sched1,
              const MetricSchedule& sched2, const StoppingRule& stop,
              const RunOptions& options) {
  RunResult out;
  out.assumptions = validate_assumptions(p, sched1, sched2, options.validation_horizon);
  if (!out.assumptions.permits_run() && !options.force) {
    throw AssumptionViolation(out.assumptions);
  }
  require_dim(init.x, p.n(), "initial x");
  require_dim(init.z, p.m(), "initial z");
  require_dim(init.y, p.m(), "initial y");

  SolverState s = init;
  if (options.keep_trace) out.trace.push_back(s);
  const bool use_kkt = static_cast<bool>(stop.kkt);
  for (std::size_t it = 0; it < stop.max_iters; ++it) {
    SolverState next = step(p, s, sched1, sched2);
    if (!all_finite(next.x)) throw NonFiniteIterate(next.k, "x");
    if (!all_finite(next.z)) throw NonFiniteIterate(next.k, "z");
    if (!all_finite(next.y)) throw NonFiniteIterate(next.k, "y");

    IterationRecord rec;
    rec.k = next.k;
    rec.residual_primal = (p.a().apply(next.x) - next.z).norm();
    rec.step_x = (next.x - s.x).norm();
    rec.step_z = (next.z - s.z).norm();
    rec.step_y = (next.y - s.y).norm();
    if (use_kkt) rec.kkt = stop.kkt(next);
    out.log.push_back(rec);
    if (options.keep_trace) out.trace.push_back(next);
    s = std::move(next);
    if (use_kkt && stop.kkt_tol && *rec.kkt <= *stop.kkt_tol) {
      out.stopped_on_kkt = true;
      break;
    }
  }
  out.state = std::move(s);
  return out;
}

}  // namespace vmadmm
