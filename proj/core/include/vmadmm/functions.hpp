#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "vmadmm/linops.hpp"

namespace vmadmm {

/// Extended reals are doubles; +inf is the distinguished "outside the domain"
/// value. Only +inf is ever produced by eval, so sums stay well defined.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A closed proper convex function from the built-in catalog.
///
///   Zero                 0
///   L1(lambda)           lambda * ||x||_1
///   SquaredL2(b, sigma)  (sigma/2) ||x - b||^2
///   IndicatorBox(lo,hi)  0 on [lo, hi], +inf outside
///   Quadratic(Q, q)      (1/2) <x, Qx> + <q, x>, Q symmetric PSD
///   Huber(delta, w)      w * sum_i huber_delta(x_i)
class FunctionDescriptor {
 public:
  enum class Kind { kZero, kL1, kSquaredL2, kIndicatorBox, kQuadratic, kHuber };

  static FunctionDescriptor zero(Index dim);
  static FunctionDescriptor l1(Index dim, double lambda);
  static FunctionDescriptor squared_l2(Vector shift, double sigma = 1.0);
  static FunctionDescriptor indicator_box(Vector lower, Vector upper);
  static FunctionDescriptor quadratic(Matrix q_mat, Vector q_vec);
  static FunctionDescriptor huber(Index dim, double delta, double weight = 1.0);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }

  bool is_proxable() const { return true; }
  bool is_smooth() const;
  bool is_conjugable() const;
  /// Sum of one-dimensional terms (prox_diag applies).
  bool is_separable() const;

  /// Lipschitz constant of the gradient; nullopt when not smooth.
  std::optional<double> lipschitz() const { return lipschitz_; }

  double lambda() const { return lambda_; }
  double sigma() const { return sigma_; }
  double delta() const { return delta_; }
  double weight() const { return weight_; }
  const Vector& shift() const { return shift_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Matrix& q_matrix() const { return *q_mat_; }
  const Vector& q_vector() const { return q_vec_; }

  double eval(const Vector& x) const;

  /// argmin_u F(u) + ||u - v||^2 / (2t).
  Vector prox(const Vector& v, double t) const;

  /// argmin_u F(u) + sum_i (d_i / 2)(u_i - v_i)^2, separable kinds only.
  Vector prox_diag(const Vector& v, const Vector& d) const;

  Vector grad(const Vector& x) const;

  double conjugate_eval(const Vector& y) const;

  /// prox of t F* via Moreau: v - t prox_{F/t}(v / t).
  Vector prox_conjugate(const Vector& v, double t) const;

  /// Euclidean distance from s to the subdifferential of F at x (+inf when
  /// x is outside dom F). Coordinates within `kink_tol` (relative to
  /// max(1, |x|_inf)) of a kink of L1 or of a box face are treated as
  /// sitting on it.
  double subgradient_distance(const Vector& x, const Vector& s,
                              double kink_tol = 1e-10) const;

  std::string describe() const;

 private:
  FunctionDescriptor(Kind kind, Index dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  Index dim_;
  std::optional<double> lipschitz_;
  double lambda_ = 0.0;
  double sigma_ = 0.0;
  double delta_ = 0.0;
  double weight_ = 0.0;
  Vector shift_;
  Vector lower_;
  Vector upper_;
  std::shared_ptr<const Matrix> q_mat_;
  Vector q_vec_;
};

const char* to_string(FunctionDescriptor::Kind kind);

}  // namespace vmadmm
