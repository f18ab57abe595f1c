#include "vmadmm/functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>

#include "vmadmm/error.hpp"

namespace vmadmm {

namespace {

// Dense Cholesky below this dimension, conjugate gradient above.
constexpr Index kQuadraticCgThreshold = 500;
// Relative slack on the L1 conjugate's inf-ball: Moreau-computed dual points
// can overshoot the radius by an ulp.
constexpr double kConjugateBallSlack = 1e-12;

double soft_threshold(double v, double k) {
  if (v > k) return v - k;
  if (v < -k) return v + k;
  return 0.0;
}

double huber_prox_scalar(double v, double t, double delta, double weight) {
  const double tw = t * weight;
  if (std::abs(v) <= delta + tw) return v * delta / (delta + tw);
  return v > 0.0 ? v - tw : v + tw;
}

[[noreturn]] void unsupported(const FunctionDescriptor& f, const std::string& op) {
  throw Error(ErrorCode::kUnsupported, op + " is not available for " + f.describe());
}

}  // namespace

const char* to_string(FunctionDescriptor::Kind kind) {
  switch (kind) {
    case FunctionDescriptor::Kind::kZero: return "zero";
    case FunctionDescriptor::Kind::kL1: return "l1";
    case FunctionDescriptor::Kind::kSquaredL2: return "squared_l2";
    case FunctionDescriptor::Kind::kIndicatorBox: return "indicator_box";
    case FunctionDescriptor::Kind::kQuadratic: return "quadratic";
    case FunctionDescriptor::Kind::kHuber: return "huber";
  }
  return "unknown";
}

FunctionDescriptor FunctionDescriptor::zero(Index dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "zero: dim < 1");
  FunctionDescriptor f(Kind::kZero, dim);
  f.lipschitz_ = 0.0;
  return f;
}

FunctionDescriptor FunctionDescriptor::l1(Index dim, double lambda) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "l1: dim < 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "l1: lambda must be positive and finite");
  }
  FunctionDescriptor f(Kind::kL1, dim);
  f.lambda_ = lambda;
  return f;
}

FunctionDescriptor FunctionDescriptor::squared_l2(Vector shift, double sigma) {
  if (shift.size() < 1) throw Error(ErrorCode::kInvalidArgument, "squared_l2: empty shift");
  require_finite(shift, "squared_l2 shift");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "squared_l2: sigma must be positive and finite");
  }
  FunctionDescriptor f(Kind::kSquaredL2, shift.size());
  f.shift_ = std::move(shift);
  f.sigma_ = sigma;
  f.lipschitz_ = sigma;
  return f;
}

FunctionDescriptor FunctionDescriptor::indicator_box(Vector lower, Vector upper) {
  if (lower.size() < 1 || lower.size() != upper.size()) {
    throw DimensionMismatch("indicator_box bounds", lower.size(), upper.size());
  }
  for (Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i] ||
        lower[i] == kInf || upper[i] == -kInf) {
      throw Error(ErrorCode::kInvalidArgument,
                  "indicator_box: empty interval at coordinate " + std::to_string(i));
    }
  }
  FunctionDescriptor f(Kind::kIndicatorBox, lower.size());
  f.lower_ = std::move(lower);
  f.upper_ = std::move(upper);
  return f;
}

FunctionDescriptor FunctionDescriptor::quadratic(Matrix q_mat, Vector q_vec) {
  if (q_mat.rows() < 1 || q_mat.rows() != q_mat.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: Q must be square");
  }
  if (q_vec.size() != q_mat.rows()) {
    throw DimensionMismatch("quadratic: q", q_mat.rows(), q_vec.size());
  }
  if (!q_mat.allFinite()) throw Error(ErrorCode::kNonFinite, "quadratic: Q not finite");
  require_finite(q_vec, "quadratic q");
  const double scale = std::max(1.0, q_mat.cwiseAbs().maxCoeff());
  if ((q_mat - q_mat.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: Q not symmetric");
  }
  Matrix sym = 0.5 * (q_mat + q_mat.transpose());
  const double low = smallest_eigenpair(sym).value;
  if (low < -1e-12 * scale) {
    throw Error(ErrorCode::kNotPositiveSemidefinite,
                "quadratic: Q has eigenvalue " + std::to_string(low));
  }
  FunctionDescriptor f(Kind::kQuadratic, sym.rows());
  f.lipschitz_ = std::max(0.0, largest_eigenvalue(sym));
  f.q_mat_ = std::make_shared<const Matrix>(std::move(sym));
  f.q_vec_ = std::move(q_vec);
  return f;
}

FunctionDescriptor FunctionDescriptor::huber(Index dim, double delta, double weight) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "huber: dim < 1");
  if (!(delta > 0.0) || !(weight > 0.0) || !std::isfinite(delta) || !std::isfinite(weight)) {
    throw Error(ErrorCode::kInvalidArgument, "huber: delta and weight must be positive");
  }
  FunctionDescriptor f(Kind::kHuber, dim);
  f.delta_ = delta;
  f.weight_ = weight;
  f.lipschitz_ = weight / delta;
  return f;
}

bool FunctionDescriptor::is_smooth() const { return lipschitz_.has_value(); }

bool FunctionDescriptor::is_conjugable() const {
  return kind_ == Kind::kZero || kind_ == Kind::kL1 || kind_ == Kind::kSquaredL2 ||
         kind_ == Kind::kIndicatorBox;
}

bool FunctionDescriptor::is_separable() const { return kind_ != Kind::kQuadratic; }

double FunctionDescriptor::eval(const Vector& x) const {
  require_dim(x, dim_, "eval " + describe());
  switch (kind_) {
    case Kind::kZero: return 0.0;
    case Kind::kL1: return lambda_ * x.lpNorm<1>();
    case Kind::kSquaredL2: return 0.5 * sigma_ * (x - shift_).squaredNorm();
    case Kind::kIndicatorBox:
      for (Index i = 0; i < dim_; ++i) {
        if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return kInf;
      }
      return 0.0;
    case Kind::kQuadratic: return 0.5 * x.dot(*q_mat_ * x) + q_vec_.dot(x);
    case Kind::kHuber: {
      double sum = 0.0;
      for (Index i = 0; i < dim_; ++i) {
        const double a = std::abs(x[i]);
        sum += a <= delta_ ? 0.5 * a * a / delta_ : a - 0.5 * delta_;
      }
      return weight_ * sum;
    }
  }
  return 0.0;
}

Vector FunctionDescriptor::prox(const Vector& v, double t) const {
  require_dim(v, dim_, "prox " + describe());
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "prox: step t must be positive and finite");
  }
  switch (kind_) {
    case Kind::kZero: return v;
    case Kind::kL1: {
      Vector u(dim_);
      const double k = t * lambda_;
      for (Index i = 0; i < dim_; ++i) u[i] = soft_threshold(v[i], k);
      return u;
    }
    case Kind::kSquaredL2: return (v + (t * sigma_) * shift_) / (1.0 + t * sigma_);
    case Kind::kIndicatorBox: return v.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::kQuadratic: {
      Matrix system = t * (*q_mat_);
      system.diagonal().array() += 1.0;
      const Vector rhs = v - t * q_vec_;
      if (dim_ < kQuadraticCgThreshold) {
        Eigen::LLT<Matrix> llt(system);
        if (llt.info() != Eigen::Success) {
          throw Error(ErrorCode::kSingularSystem, "prox quadratic: Cholesky failed");
        }
        return llt.solve(rhs);
      }
      Eigen::ConjugateGradient<Matrix, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(1e-15);
      cg.compute(system);
      Vector u = cg.solve(rhs);
      if (cg.info() != Eigen::Success) {
        throw Error(ErrorCode::kSingularSystem, "prox quadratic: CG did not converge");
      }
      return u;
    }
    case Kind::kHuber: {
      Vector u(dim_);
      for (Index i = 0; i < dim_; ++i) u[i] = huber_prox_scalar(v[i], t, delta_, weight_);
      return u;
    }
  }
  return v;
}

Vector FunctionDescriptor::prox_diag(const Vector& v, const Vector& d) const {
  require_dim(v, dim_, "prox_diag " + describe());
  require_dim(d, dim_, "prox_diag weights");
  if (!is_separable()) unsupported(*this, "prox_diag (not separable)");
  for (Index i = 0; i < dim_; ++i) {
    if (!(d[i] > 0.0) || !std::isfinite(d[i])) {
      throw Error(ErrorCode::kInvalidArgument, "prox_diag: weights must be positive");
    }
  }
  Vector u(dim_);
  switch (kind_) {
    case Kind::kZero: return v;
    case Kind::kL1:
      for (Index i = 0; i < dim_; ++i) u[i] = soft_threshold(v[i], lambda_ / d[i]);
      return u;
    case Kind::kSquaredL2:
      for (Index i = 0; i < dim_; ++i) {
        u[i] = (sigma_ * shift_[i] + d[i] * v[i]) / (sigma_ + d[i]);
      }
      return u;
    case Kind::kIndicatorBox: return v.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::kHuber:
      for (Index i = 0; i < dim_; ++i) {
        u[i] = huber_prox_scalar(v[i], 1.0 / d[i], delta_, weight_);
      }
      return u;
    case Kind::kQuadratic: break;
  }
  unsupported(*this, "prox_diag");
}

Vector FunctionDescriptor::grad(const Vector& x) const {
  require_dim(x, dim_, "grad " + describe());
  switch (kind_) {
    case Kind::kZero: return Vector::Zero(dim_);
    case Kind::kSquaredL2: return sigma_ * (x - shift_);
    case Kind::kQuadratic: return *q_mat_ * x + q_vec_;
    case Kind::kHuber: {
      Vector g(dim_);
      for (Index i = 0; i < dim_; ++i) {
        g[i] = weight_ * std::clamp(x[i] / delta_, -1.0, 1.0);
      }
      return g;
    }
    default: unsupported(*this, "grad (not smooth)");
  }
}

double FunctionDescriptor::conjugate_eval(const Vector& y) const {
  require_dim(y, dim_, "conjugate_eval " + describe());
  switch (kind_) {
    case Kind::kZero: return y.isZero(0.0) ? 0.0 : kInf;
    case Kind::kL1:
      return y.lpNorm<Eigen::Infinity>() <= lambda_ * (1.0 + kConjugateBallSlack) ? 0.0 : kInf;
    case Kind::kSquaredL2: return y.dot(shift_) + 0.5 * y.squaredNorm() / sigma_;
    case Kind::kIndicatorBox: {
      double sum = 0.0;
      for (Index i = 0; i < dim_; ++i) {
        if (y[i] > 0.0) {
          if (upper_[i] == kInf) return kInf;
          sum += y[i] * upper_[i];
        } else if (y[i] < 0.0) {
          if (lower_[i] == -kInf) return kInf;
          sum += y[i] * lower_[i];
        }
      }
      return sum;
    }
    default: unsupported(*this, "conjugate_eval");
  }
}

Vector FunctionDescriptor::prox_conjugate(const Vector& v, double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "prox_conjugate: t must be positive and finite");
  }
  return v - t * prox(v / t, 1.0 / t);
}

double FunctionDescriptor::subgradient_distance(const Vector& x, const Vector& s,
                                                double kink_tol) const {
  require_dim(x, dim_, "subgradient_distance point");
  require_dim(s, dim_, "subgradient_distance subgradient");
  const double kink = kink_tol * std::max(1.0, x.lpNorm<Eigen::Infinity>());
  switch (kind_) {
    case Kind::kZero: return s.norm();
    case Kind::kL1: {
      double sq = 0.0;
      for (Index i = 0; i < dim_; ++i) {
        double d;
        if (std::abs(x[i]) <= kink) {
          d = std::max(0.0, std::abs(s[i]) - lambda_);
        } else if (x[i] > 0.0) {
          d = s[i] - lambda_;
        } else {
          d = s[i] + lambda_;
        }
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    case Kind::kIndicatorBox: {
      double sq = 0.0;
      for (Index i = 0; i < dim_; ++i) {
        if (x[i] < lower_[i] - kink || x[i] > upper_[i] + kink) return kInf;
        const bool at_lo = x[i] - lower_[i] <= kink;
        const bool at_hi = upper_[i] - x[i] <= kink;
        double d;
        if (at_lo && at_hi) {
          d = 0.0;
        } else if (at_lo) {
          d = std::max(0.0, s[i]);  // normal cone (-inf, 0]
        } else if (at_hi) {
          d = std::max(0.0, -s[i]);  // normal cone [0, +inf)
        } else {
          d = s[i];
        }
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    default: return (s - grad(x)).norm();
  }
}

std::string FunctionDescriptor::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << "(dim=" << dim_;
  switch (kind_) {
    case Kind::kL1: os << ", lambda=" << lambda_; break;
    case Kind::kSquaredL2: os << ", sigma=" << sigma_; break;
    case Kind::kHuber: os << ", delta=" << delta_ << ", weight=" << weight_; break;
    case Kind::kQuadratic: os << ", L=" << *lipschitz_; break;
    default: break;
  }
  os << ")";
  return os.str();
}

}  // namespace vmadmm
