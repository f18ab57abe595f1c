#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vmadmm/linops.hpp"

namespace vmadmm {

/// A sequence of metrics M^0, M^1, ... used as M1^k or M2^k.
class MetricSchedule {
 public:
  enum class Kind { kConstant, kGeometricDecay, kShiftedGram };

  static MetricSchedule constant(MetricOperator m);
  /// M^k = rho^k M0, rho in (0, 1].
  static MetricSchedule geometric_decay(MetricOperator m0, double rho);
  /// M^k = (1/tau_k) id - c A*A. taus[k] is used for k < taus.size(), the
  /// last entry afterwards. Every tau_k must satisfy 1/tau_k >= c ||A||^2.
  static MetricSchedule shifted_gram(std::vector<double> taus, double c, LinearMap a);

  Kind kind() const { return kind_; }
  Index dim() const { return base_.dim(); }

  MetricOperator at(std::size_t k) const;

  /// Number of leading indices after which M^k no longer changes, if finite.
  std::optional<std::size_t> stationary_after() const;

  /// lim_k M^k.
  MetricOperator limit() const;

  double rho() const { return rho_; }
  const std::vector<double>& taus() const { return taus_; }

 private:
  MetricSchedule(Kind kind, MetricOperator base) : kind_(kind), base_(std::move(base)) {}

  Kind kind_;
  MetricOperator base_;
  double rho_ = 1.0;
  std::vector<double> taus_;
  double gram_c_ = 0.0;
  double norm_a_ = 0.0;
};

const char* to_string(MetricSchedule::Kind kind);

}  // namespace vmadmm
