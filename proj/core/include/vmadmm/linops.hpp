#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Core>

namespace vmadmm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Throws NonFinite if any entry of `v` is NaN or infinite.
void require_finite(const Vector& v, const std::string& context);

/// Throws DimensionMismatch if `v.size() != expected`.
void require_dim(const Vector& v, Index expected, const std::string& context);

/// A finite-dimensional linear operator R^cols -> R^rows together with its
/// adjoint. Copies share the (immutable) representation.
class LinearMap {
 public:
  using Apply = std::function<Vector(const Vector&)>;

  static LinearMap dense(Matrix m);
  static LinearMap identity(Index n);
  static LinearMap zero(Index rows, Index cols);
  /// (Dx)_i = x_{i+1} - x_i, an (n-1) x n operator applied matrix-free.
  static LinearMap forward_difference(Index n);
  static LinearMap matrix_free(Index rows, Index cols, Apply apply,
                               Apply adjoint);

  Index rows() const;
  Index cols() const;

  Vector apply(const Vector& x) const;
  Vector adjoint(const Vector& v) const;

  /// Materializes the operator column by column (exact for the built-in forms).
  Matrix to_dense() const;

  bool is_identity() const;
  bool is_zero() const;
  bool is_forward_difference() const;
  /// True when both handles refer to the same representation.
  bool same_as(const LinearMap& other) const { return impl_ == other.impl_; }

  struct Impl;

 private:
  explicit LinearMap(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Largest singular value of `a`.
///
/// Power iteration on A*A from the normalized all-ones seed; if A*A
/// annihilates it a fixed pseudo-random seed is used instead. Converged once
/// the Rayleigh quotient changes by at most tol (relative) between sweeps;
/// throws NotConverged otherwise. Zero, identity and forward-difference maps
/// use their exact norms (2 cos(pi / 2n) for the latter).
double operator_norm(const LinearMap& a, double tol = 1e-12,
                     int max_iter = 200000);

/// A symmetric positive-semidefinite operator U, used as a variable metric.
/// PSD-ness is checked at construction; violations throw.
class MetricOperator {
 public:
  enum class Form { kZero, kScaledIdentity, kDiagonal, kDenseSymmetric, kShiftedGram };

  static MetricOperator zero(Index dim);
  static MetricOperator scaled_identity(Index dim, double mu);
  static MetricOperator diagonal(Vector entries);
  static MetricOperator dense_symmetric(Matrix m);
  /// (1/tau) id - c A*A. Requires 1/tau >= c ||A||^2.
  static MetricOperator shifted_gram(double tau, double c, LinearMap a);
  /// Same, with a precomputed ||A|| (used by schedules to avoid recomputation).
  static MetricOperator shifted_gram(double tau, double c, LinearMap a,
                                     double norm_a);

  Form form() const { return form_; }
  Index dim() const { return dim_; }

  Vector apply(const Vector& x) const;
  Matrix to_dense() const;

  /// Zero, ScaledIdentity and Diagonal forms.
  bool is_diagonal() const;
  /// Diagonal entries; only valid when is_diagonal().
  Vector diagonal_entries() const;
  /// The scalar mu for Zero (0) and ScaledIdentity (mu); nullopt otherwise.
  std::optional<double> scalar() const;

  double tau() const { return tau_; }
  double gram_c() const { return c_; }
  const std::optional<LinearMap>& gram_map() const { return map_; }

  /// s * U for s >= 0. ShiftedGram becomes ShiftedGram(tau / s, c * s).
  MetricOperator scaled(double s) const;

  /// U + s*id as a dense symmetric matrix (s may be negative; no PSD check).
  Matrix shifted_dense(double s) const;

 private:
  MetricOperator(Form form, Index dim) : form_(form), dim_(dim) {}

  Form form_;
  Index dim_;
  double mu_ = 0.0;
  Vector diag_;
  std::shared_ptr<const Matrix> dense_;
  double tau_ = 0.0;
  double c_ = 0.0;
  std::optional<LinearMap> map_;
};

const char* to_string(MetricOperator::Form form);

/// ||x||_U^2 = <x, Ux>, clamped to 0 when roundoff pushes it just below zero.
double seminorm_sq(const MetricOperator& u, const Vector& x);

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

/// Smallest eigenpair of a dense symmetric matrix.
EigenPair smallest_eigenpair(const Matrix& sym);
/// Largest eigenvalue of a dense symmetric matrix.
double largest_eigenvalue(const Matrix& sym);

struct LoewnerResult {
  bool holds = false;
  /// lambda_min(U1 - U2).
  double min_eigenvalue = 0.0;
  /// Unit eigenvector for min_eigenvalue; a violating direction when !holds.
  Vector witness;
};

/// U1 >= U2 in the Loewner order, i.e. lambda_min(U1 - U2) >= -slack.
LoewnerResult loewner_geq(const MetricOperator& u1, const MetricOperator& u2,
                          double slack = 1e-12);

/// Smallest eigenvalue of U (with witness), for P_alpha membership checks.
EigenPair smallest_eigenpair(const MetricOperator& u);

/// U in P_alpha, i.e. U >= alpha * id (within 1e-12).
bool in_p_alpha(const MetricOperator& u, double alpha);

/// Plain-text dense matrix: first line "rows cols", then row-major entries.
Matrix read_matrix(std::istream& in, const std::string& source = "<stream>");
Matrix load_matrix(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& m);

}  // namespace vmadmm
