#include "vmadmm/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace vmadmm {

namespace {

void require_consecutive(const SolverState& s, const SolverState& t) {
  if (t.k != s.k + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "trace states are not consecutive (k = " + std::to_string(s.k) + " then " +
                    std::to_string(t.k) + ")");
  }
}

void require_probe(const ProblemSpec& p, const Probe& q) {
  require_dim(q.x, p.n(), "probe x");
  require_dim(q.z, p.m(), "probe z");
  require_dim(q.y, p.m(), "probe y");
}

}  // namespace

double lagrangian(const ProblemSpec& p, const Vector& x, const Vector& z, const Vector& y) {
  require_dim(x, p.n(), "lagrangian x");
  require_dim(z, p.m(), "lagrangian z");
  require_dim(y, p.m(), "lagrangian y");
  const double fx = p.f().eval(x);
  const double hx = p.h().eval(x);
  const double gz = p.g().eval(z);
  if (std::isinf(fx) || std::isinf(hx) || std::isinf(gz)) return kInf;
  return fx + hx + gz + y.dot(p.a().apply(x) - z);
}

double augmented_lagrangian(const ProblemSpec& p, const Vector& x, const Vector& z,
                            const Vector& y) {
  const double l = lagrangian(p, x, z, y);
  if (std::isinf(l)) return l;
  return l + 0.5 * p.c() * (p.a().apply(x) - z).squaredNorm();
}

double gamma(const ProblemSpec& p, const SolverState& init, const MetricOperator& m1_0,
             const MetricOperator& m2_0, const Probe& probe) {
  require_probe(p, probe);
  const double c = p.c();
  return 0.5 * c * (p.a().apply(probe.x) - init.z).squaredNorm() +
         0.5 * (seminorm_sq(m1_0, probe.x - init.x) + seminorm_sq(m2_0, probe.z - init.z)) +
         (probe.y - init.y).squaredNorm() / (2.0 * c);
}

void ErgodicState::Kahan::add(const Vector& v) {
  if (sum.size() == 0) {
    sum = Vector::Zero(v.size());
    comp = Vector::Zero(v.size());
  }
  require_dim(v, sum.size(), "ergodic average");
  for (Index i = 0; i < v.size(); ++i) {
    const double yv = v[i] - comp[i];
    const double t = sum[i] + yv;
    comp[i] = (t - sum[i]) - yv;
    sum[i] = t;
  }
}

void ErgodicState::add(const SolverState& s) {
  x_.add(s.x);
  z_.add(s.z);
  y_.add(s.y);
  ++k_;
  const double inv = 1.0 / static_cast<double>(k_);
  x_bar_ = x_.sum * inv;
  z_bar_ = z_.sum * inv;
  y_bar_ = y_.sum * inv;
}

GapCertificate gap_certificate(const ProblemSpec& p, const ErgodicState& e,
                               const Probe& probe, double gamma0) {
  if (e.k() == 0) throw Error(ErrorCode::kInvalidArgument, "gap certificate needs k >= 1");
  require_probe(p, probe);
  GapCertificate cert;
  cert.k = e.k();
  cert.probe = probe;
  const double at_mean = lagrangian(p, e.x_bar(), e.z_bar(), probe.y);
  const double at_probe = lagrangian(p, probe.x, probe.z, e.y_bar());
  if (std::isinf(at_probe)) {
    cert.gap = -kInf;
  } else {
    cert.gap = at_mean - at_probe;
  }
  cert.bound = gamma0 / static_cast<double>(e.k());
  cert.slack = cert.bound - cert.gap;
  return cert;
}

std::vector<SequencePair> sequence_uv(const ProblemSpec& p,
                                      const std::vector<SolverState>& trace,
                                      const Probe& saddle, const MetricSchedule& sched1,
                                      const MetricSchedule& sched2) {
  if (p.h().kind() != FunctionDescriptor::Kind::kZero) {
    throw Error(ErrorCode::kUnsupported, "u/v sequences are defined only for h = 0");
  }
  const auto s1 = sched1.stationary_after();
  const auto s2 = sched2.stationary_after();
  if (!s1 || !s2 || *s1 > 1 || *s2 > 1) {
    throw Error(ErrorCode::kUnsupported, "u/v sequences are defined only for constant metrics");
  }
  require_probe(p, saddle);
  const MetricOperator m1 = sched1.at(0);
  const MetricOperator m2 = sched2.at(0);
  const double c = p.c();

  auto z_norm = [&](const Vector& d) { return seminorm_sq(m2, d) + c * d.squaredNorm(); };
  auto u_of = [&](const SolverState& s) {
    return seminorm_sq(m1, saddle.x - s.x) + z_norm(saddle.z - s.z) +
           (saddle.y - s.y).squaredNorm() / c + seminorm_sq(m2, s.z - s.z_prev);
  };

  std::vector<SequencePair> out;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    const SolverState& s = trace[i];
    const SolverState& t = trace[i + 1];
    require_consecutive(s, t);
    if (s.k < 1) continue;
    SequencePair pr;
    pr.k = s.k;
    pr.u = u_of(s);
    pr.u_next = u_of(t);
    const Vector dz = t.z - s.z;
    pr.dz_sq = dz.squaredNorm();
    pr.v = seminorm_sq(m1, t.x - s.x) + z_norm(dz) + (t.y - s.y).squaredNorm() / c;
    out.push_back(pr);
  }
  return out;
}

InequalityReport inequality_v_check(const std::vector<SequencePair>& pairs, double c) {
  InequalityReport r;
  for (const auto& pr : pairs) {
    const double decrease = pr.u - pr.u_next;
    const double slack = decrease - (pr.v - c * pr.dz_sq);
    const double raw = decrease - pr.v;
    r.k.push_back(pr.k);
    r.slack.push_back(slack);
    r.uncorrected_slack.push_back(raw);
    if (slack < r.min_slack) {
      r.min_slack = slack;
      r.min_slack_k = pr.k;
    }
    if (raw < -1e-10) {
      ++r.uncorrected_violations;
      if (!r.first_uncorrected_violation) r.first_uncorrected_violation = pr.k;
    }
  }
  return r;
}

MonotoneReport v_monotone_check(const std::vector<SequencePair>& pairs, double tol) {
  MonotoneReport r;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].v > pairs[i - 1].v + tol) {
      r.holds = false;
      r.first_violation = pairs[i].k;
      break;
    }
  }
  return r;
}

double accumulated_z_steps(const std::vector<SequencePair>& pairs, double c) {
  double s = 0.0;
  for (const auto& pr : pairs) s += pr.dz_sq;
  return c * s;
}

std::vector<FeasibilityPoint> feasibility_rate(const ProblemSpec& p,
                                               const std::vector<SolverState>& trace,
                                               double u1, double s) {
  std::vector<FeasibilityPoint> out;
  const double c = p.c();
  for (const auto& st : trace) {
    if (st.k < 2) continue;
    FeasibilityPoint pt;
    pt.k = st.k;
    pt.residual = (p.a().apply(st.x) - st.z).norm();
    pt.bound = std::sqrt((u1 + s) / (c * static_cast<double>(st.k - 1)));
    out.push_back(pt);
  }
  return out;
}

SlopeFit log_log_slope(const std::vector<std::size_t>& k, const std::vector<double>& values,
                       std::size_t k_lo, std::size_t k_hi, double floor) {
  if (k.size() != values.size()) {
    throw DimensionMismatch("log_log_slope values", static_cast<std::ptrdiff_t>(k.size()),
                            static_cast<std::ptrdiff_t>(values.size()));
  }
  SlopeFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] < k_lo || k[i] > k_hi || k[i] == 0) continue;
    if (!(values[i] >= floor) || !std::isfinite(values[i])) {
      ++fit.below_floor;
      continue;
    }
    const double lx = std::log(static_cast<double>(k[i]));
    const double ly = std::log(values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.points;
  }
  if (fit.points < 2) {
    fit.slope = fit.below_floor > 0 ? -kInf : std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double n = static_cast<double>(fit.points);
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

double kkt_residual(const ProblemSpec& p, const Vector& x, const Vector& y) {
  require_dim(x, p.n(), "kkt x");
  require_dim(y, p.m(), "kkt y");
  const Vector s = -p.a().adjoint(y) - p.h().grad(x);
  const double df = p.f().subgradient_distance(x, s);
  const double dg = p.g().subgradient_distance(p.a().apply(x), y);
  return std::max(df, dg);
}

std::optional<double> lemma_inequality_check(const ProblemSpec& p, const SolverState& prev,
                                             const SolverState& next,
                                             const MetricOperator& m1,
                                             const MetricOperator& m2, const Probe& probe) {
  require_probe(p, probe);
  const double c = p.c();
  const double l_lhs = lagrangian(p, next.x, next.z, probe.y);
  const double l_rhs = lagrangian(p, probe.x, probe.z, next.y);
  if (std::isinf(l_rhs)) return std::nullopt;

  const Vector dx = next.x - prev.x;
  const Vector dz = next.z - prev.z;
  const Vector dy = next.y - prev.y;
  const double coupling = c * dz.dot(p.a().apply(probe.x - next.x));
  const double before = seminorm_sq(m1, probe.x - prev.x) + seminorm_sq(m2, probe.z - prev.z) +
                        (probe.y - prev.y).squaredNorm() / c;
  const double after = seminorm_sq(m1, probe.x - next.x) + seminorm_sq(m2, probe.z - next.z) +
                       (probe.y - next.y).squaredNorm() / c;
  const double steps = seminorm_sq(m1, dx) - p.lipschitz() * dx.squaredNorm() +
                       seminorm_sq(m2, dz) + dy.squaredNorm() / c;
  const double rhs = l_rhs + coupling + 0.5 * before - 0.5 * after - 0.5 * steps;
  return rhs - l_lhs;
}

double lemma_second_check(const ProblemSpec& p, const SolverState& prev,
                          const SolverState& next, const Vector& x) {
  require_dim(x, p.n(), "probe x");
  const double c = p.c();
  const Vector ax = p.a().apply(x);
  const double lhs = c * (next.z - prev.z).dot(p.a().apply(x - next.x));
  const double rhs = 0.5 * c * ((ax - prev.z).squaredNorm() - (ax - next.z).squaredNorm()) +
                     (next.y - prev.y).squaredNorm() / (2.0 * c);
  return rhs - lhs;
}

double descent_lemma_check(const ProblemSpec& p, const SolverState& prev,
                           const SolverState& next, const Vector& x) {
  require_dim(x, p.n(), "probe x");
  const auto& h = p.h();
  const double lhs = h.eval(next.x) - h.eval(x) + h.grad(prev.x).dot(x - next.x);
  return 0.5 * p.lipschitz() * (next.x - prev.x).squaredNorm() - lhs;
}

SaddleSlack saddle_check(const ProblemSpec& p, const Probe& saddle, const Probe& probe) {
  require_probe(p, saddle);
  require_probe(p, probe);
  const double mid = lagrangian(p, saddle.x, saddle.z, saddle.y);
  SaddleSlack s;
  s.dual_side = mid - lagrangian(p, saddle.x, saddle.z, probe.y);
  s.primal_side = lagrangian(p, probe.x, probe.z, saddle.y) - mid;
  return s;
}

double dual_objective(const ProblemSpec& p, const Vector& y) {
  require_dim(y, p.m(), "dual y");
  const FunctionDescriptor* smooth_part = nullptr;
  if (p.h().kind() == FunctionDescriptor::Kind::kZero) {
    smooth_part = &p.f();
  } else if (p.f().kind() == FunctionDescriptor::Kind::kZero) {
    smooth_part = &p.h();
  } else {
    throw Error(ErrorCode::kUnsupported,
                "dual objective needs f = 0 or h = 0 (general infimal convolution is not evaluated)");
  }
  if (!smooth_part->is_conjugable() || !p.g().is_conjugable()) {
    throw Error(ErrorCode::kUnsupported, "dual objective needs conjugable functions, got " +
                                             smooth_part->describe() + " and " +
                                             p.g().describe());
  }
  const double a = smooth_part->conjugate_eval(-p.a().adjoint(y));
  const double b = p.g().conjugate_eval(y);
  if (std::isinf(a) || std::isinf(b)) return -kInf;
  return -a - b;
}

bool SummabilityReport::bounded(double share) const {
  for (int i = 0; i < 3; ++i) {
    if (last_quarter_share[i] >= share) return false;
  }
  return true;
}

SummabilityReport summability_check(const ProblemSpec& p,
                                    const std::vector<SolverState>& trace,
                                    const MetricSchedule& sched1,
                                    const MetricSchedule& sched2) {
  SummabilityReport r;
  const std::size_t n = trace.size() > 0 ? trace.size() - 1 : 0;
  const std::size_t tail_start = n - n / 4;
  double tail[3] = {0.0, 0.0, 0.0};
  const double half_l = 0.5 * p.lipschitz();
  for (std::size_t i = 0; i < n; ++i) {
    const SolverState& s = trace[i];
    const SolverState& t = trace[i + 1];
    require_consecutive(s, t);
    const Vector dx = s.x - t.x;
    const Vector dz = s.z - t.z;
    const double terms[3] = {
        (s.z - p.a().apply(t.x)).squaredNorm(),
        seminorm_sq(sched1.at(s.k), dx) - half_l * dx.squaredNorm(),
        seminorm_sq(sched2.at(s.k), dz),
    };
    for (int j = 0; j < 3; ++j) {
      r.total[j] += terms[j];
      if (i >= tail_start) tail[j] += terms[j];
    }
  }
  for (int j = 0; j < 3; ++j) {
    r.last_quarter_share[j] = r.total[j] > 1e-300 ? tail[j] / r.total[j] : 0.0;
  }
  return r;
}

ProbeSampler::ProbeSampler(Probe center, std::uint64_t seed, double radius)
    : center_(std::move(center)), rng_(seed), radius_(radius) {}

Probe ProbeSampler::next() {
  const Index n = center_.x.size();
  const Index m = center_.z.size();
  const Vector d = rng_.unit_ball(n + 2 * m, radius_);
  Probe q;
  q.x = center_.x + d.head(n);
  q.z = center_.z + d.segment(n, m);
  q.y = center_.y + d.tail(m);
  return q;
}

}  // namespace vmadmm
