#include "vmadmm/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "vmadmm/error.hpp"

namespace vmadmm {

const char* to_string(MetricSchedule::Kind kind) {
  switch (kind) {
    case MetricSchedule::Kind::kConstant: return "constant";
    case MetricSchedule::Kind::kGeometricDecay: return "geometric_decay";
    case MetricSchedule::Kind::kShiftedGram: return "shifted_gram";
  }
  return "unknown";
}

MetricSchedule MetricSchedule::constant(MetricOperator m) {
  return MetricSchedule(Kind::kConstant, std::move(m));
}

MetricSchedule MetricSchedule::geometric_decay(MetricOperator m0, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "geometric_decay: rho must lie in (0, 1], got " + std::to_string(rho));
  }
  MetricSchedule s(Kind::kGeometricDecay, std::move(m0));
  s.rho_ = rho;
  return s;
}

MetricSchedule MetricSchedule::shifted_gram(std::vector<double> taus, double c, LinearMap a) {
  if (taus.empty()) throw Error(ErrorCode::kInvalidArgument, "shifted_gram schedule: no tau values");
  const double norm_a = operator_norm(a);
  // Validates every tau up front; at() can then reuse the norm.
  std::optional<MetricOperator> first;
  for (double tau : taus) {
    MetricOperator m = MetricOperator::shifted_gram(tau, c, a, norm_a);
    if (!first) first = std::move(m);
  }
  MetricSchedule s(Kind::kShiftedGram, std::move(*first));
  s.taus_ = std::move(taus);
  s.gram_c_ = c;
  s.norm_a_ = norm_a;
  return s;
}

MetricOperator MetricSchedule::at(std::size_t k) const {
  switch (kind_) {
    case Kind::kConstant: return base_;
    case Kind::kGeometricDecay:
      return rho_ == 1.0 ? base_ : base_.scaled(std::pow(rho_, static_cast<double>(k)));
    case Kind::kShiftedGram: {
      const double tau = taus_[std::min(k, taus_.size() - 1)];
      return MetricOperator::shifted_gram(tau, gram_c_, *base_.gram_map(), norm_a_);
    }
  }
  return base_;
}

std::optional<std::size_t> MetricSchedule::stationary_after() const {
  switch (kind_) {
    case Kind::kConstant: return 1;
    case Kind::kGeometricDecay:
      if (rho_ == 1.0 || base_.form() == MetricOperator::Form::kZero) return 1;
      return std::nullopt;
    case Kind::kShiftedGram: return taus_.size();
  }
  return std::nullopt;
}

MetricOperator MetricSchedule::limit() const {
  switch (kind_) {
    case Kind::kConstant: return base_;
    case Kind::kGeometricDecay: return rho_ == 1.0 ? base_ : MetricOperator::zero(dim());
    case Kind::kShiftedGram: return at(taus_.size() - 1);
  }
  return base_;
}

}  // namespace vmadmm
