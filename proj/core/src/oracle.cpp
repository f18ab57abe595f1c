#include "vmadmm/oracle.hpp"

#include <cmath>

#include "vmadmm/reference.hpp"

namespace vmadmm {

namespace {

constexpr std::size_t kChunk = 100;
constexpr std::size_t kPatience = 200;
constexpr double kFloor = 1e-14;

/// Drives `advance` in chunks, tracking the best KKT residual seen.
template <typename State, typename Advance, typename Extract>
OracleResult polish(const ProblemSpec& p, State state, std::size_t budget, double target,
                    Advance advance, Extract extract, const char* method) {
  OracleResult best;
  best.method = method;
  best.kkt = kInf;
  std::size_t stagnant = 0;
  std::size_t done = 0;
  auto consider = [&](const State& s) {
    auto [x, y] = extract(s);
    const double kkt = kkt_residual(p, x, y);
    if (kkt < best.kkt) {
      stagnant = kkt < 0.999 * best.kkt ? 0 : stagnant + 1;
      best.kkt = kkt;
      best.saddle.x = x;
      best.saddle.y = y;
      best.iterations = done;
    } else {
      ++stagnant;
    }
  };
  consider(state);
  while (done < budget && best.kkt > kFloor) {
    const std::size_t n = std::min(kChunk, budget - done);
    for (std::size_t i = 0; i < n; ++i) state = advance(state);
    done += n;
    consider(state);
    if (!std::isfinite(best.kkt)) break;
    if (stagnant >= kPatience || (best.kkt < target && stagnant >= 10)) break;
  }
  if (!(best.kkt < target)) {
    throw NotConverged("oracle (" + std::string(method) + ") missed KKT target " +
                           std::to_string(target) + " within " + std::to_string(done) +
                           " iterations",
                       best.kkt);
  }
  best.saddle.z = p.a().apply(best.saddle.x);
  // Rounding can leave Ax* an ulp outside dom g (a box face, say); pull it back.
  if (!std::isfinite(p.g().eval(best.saddle.z))) best.saddle.z = p.g().prox(best.saddle.z, 1.0);
  return best;
}

}  // namespace

OracleResult compute_oracle(const ProblemSpec& p, std::size_t budget, double target,
                            const std::optional<Probe>& warm) {
  Vector x0 = warm ? warm->x : Vector::Zero(p.n());
  Vector y0 = warm ? warm->y : Vector::Zero(p.m());
  require_dim(x0, p.n(), "oracle warm start x");
  require_dim(y0, p.m(), "oracle warm start y");

  if (p.h().kind() == FunctionDescriptor::Kind::kZero && p.a().is_identity()) {
    const ProblemSpec q = p.with_penalty(1.0);
    AdmmState s;
    s.z = p.a().apply(x0);
    s.x = std::move(x0);
    s.y = std::move(y0);
    return polish(
        p, std::move(s), budget, target,
        [&q](const AdmmState& st) { return classical_admm_step(q, st); },
        [](const AdmmState& st) { return std::pair<Vector, Vector>(st.x, st.y); }, "admm");
  }

  const double norm_a = operator_norm(p.a());
  const double c = norm_a > 0.0 ? 1.0 / norm_a : 1.0;
  const double tau = 1.0 / (1.01 * (c * norm_a * norm_a + 0.5 * p.lipschitz()) + 1e-3);
  PrimalDualState s = make_primal_dual_state(p, std::move(x0), std::move(y0), tau, c);
  return polish(
      p, std::move(s), budget, target,
      [&p](const PrimalDualState& st) { return condat_step(p, st); },
      [](const PrimalDualState& st) { return std::pair<Vector, Vector>(st.x, st.y); },
      "primal-dual");
}

}  // namespace vmadmm
