#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace vmadmm {

/// 64-bit linear congruential generator with Knuth's MMIX constants
/// (a = 6364136223846793005, c = 1442695040888963407, m = 2^64).
///
/// Deliberately not std::mt19937 + std::*_distribution: the distributions are
/// implementation-defined, and catalog data and probe samples must be
/// identical across standard libraries.
class Lcg64 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ = state_ * kMultiplier + kIncrement;
    return state_;
  }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; both variates of a pair are used.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Eigen::VectorXd uniform_vector(Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Uniform sample from the closed Euclidean ball of the given radius.
  Eigen::VectorXd unit_ball(Eigen::Index n, double radius = 1.0) {
    Eigen::VectorXd d = normal_vector(n);
    double norm = d.norm();
    while (norm == 0.0) {
      d = normal_vector(n);
      norm = d.norm();
    }
    const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(n));
    return d * (r / norm);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace vmadmm
