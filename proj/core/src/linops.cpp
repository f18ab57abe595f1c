#include "vmadmm/linops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <variant>

#include <Eigen/Eigenvalues>

#include "vmadmm/error.hpp"
#include "vmadmm/random.hpp"

namespace vmadmm {

void require_finite(const Vector& v, const std::string& context) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kNonFinite, context + ": vector has non-finite entries");
  }
}

void require_dim(const Vector& v, Index expected, const std::string& context) {
  if (v.size() != expected) throw DimensionMismatch(context, expected, v.size());
}

// ---------------------------------------------------------------------------
// LinearMap

namespace {

struct DenseRep {
  Matrix m;
};
struct IdentityRep {};
struct ZeroRep {};
struct ForwardDifferenceRep {};
struct CallableRep {
  LinearMap::Apply apply;
  LinearMap::Apply adjoint;
};

}  // namespace

struct LinearMap::Impl {
  Index rows;
  Index cols;
  std::variant<DenseRep, IdentityRep, ZeroRep, ForwardDifferenceRep, CallableRep> rep;
};

LinearMap::LinearMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

LinearMap LinearMap::dense(Matrix m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "LinearMap::dense: empty matrix");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "LinearMap::dense: non-finite entries");
  }
  const Index r = m.rows(), c = m.cols();
  return LinearMap(std::make_shared<const Impl>(Impl{r, c, DenseRep{std::move(m)}}));
}

LinearMap LinearMap::identity(Index n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "LinearMap::identity: n < 1");
  return LinearMap(std::make_shared<const Impl>(Impl{n, n, IdentityRep{}}));
}

LinearMap LinearMap::zero(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::kInvalidArgument, "LinearMap::zero: empty shape");
  }
  return LinearMap(std::make_shared<const Impl>(Impl{rows, cols, ZeroRep{}}));
}

LinearMap LinearMap::forward_difference(Index n) {
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument, "LinearMap::forward_difference: n < 2");
  }
  return LinearMap(std::make_shared<const Impl>(Impl{n - 1, n, ForwardDifferenceRep{}}));
}

LinearMap LinearMap::matrix_free(Index rows, Index cols, Apply apply, Apply adjoint) {
  if (rows < 1 || cols < 1 || !apply || !adjoint) {
    throw Error(ErrorCode::kInvalidArgument, "LinearMap::matrix_free: bad arguments");
  }
  return LinearMap(std::make_shared<const Impl>(
      Impl{rows, cols, CallableRep{std::move(apply), std::move(adjoint)}}));
}

Index LinearMap::rows() const { return impl_->rows; }
Index LinearMap::cols() const { return impl_->cols; }

Vector LinearMap::apply(const Vector& x) const {
  require_dim(x, impl_->cols, "LinearMap::apply");
  const Index rows = impl_->rows;
  return std::visit(
      [&](const auto& rep) -> Vector {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, DenseRep>) {
          return rep.m * x;
        } else if constexpr (std::is_same_v<T, IdentityRep>) {
          return x;
        } else if constexpr (std::is_same_v<T, ZeroRep>) {
          return Vector::Zero(rows);
        } else if constexpr (std::is_same_v<T, ForwardDifferenceRep>) {
          return x.tail(rows) - x.head(rows);
        } else {
          Vector out = rep.apply(x);
          require_dim(out, rows, "LinearMap::apply (callable result)");
          return out;
        }
      },
      impl_->rep);
}

Vector LinearMap::adjoint(const Vector& v) const {
  require_dim(v, impl_->rows, "LinearMap::adjoint");
  const Index cols = impl_->cols;
  return std::visit(
      [&](const auto& rep) -> Vector {
        using T = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<T, DenseRep>) {
          return rep.m.transpose() * v;
        } else if constexpr (std::is_same_v<T, IdentityRep>) {
          return v;
        } else if constexpr (std::is_same_v<T, ZeroRep>) {
          return Vector::Zero(cols);
        } else if constexpr (std::is_same_v<T, ForwardDifferenceRep>) {
          // D^T v: out_0 = -v_0, out_j = v_{j-1} - v_j, out_{n-1} = v_{n-2}.
          Vector out(cols);
          const Index m = v.size();
          out[0] = -v[0];
          for (Index j = 1; j < m; ++j) out[j] = v[j - 1] - v[j];
          out[cols - 1] = v[m - 1];
          return out;
        } else {
          Vector out = rep.adjoint(v);
          require_dim(out, cols, "LinearMap::adjoint (callable result)");
          return out;
        }
      },
      impl_->rep);
}

Matrix LinearMap::to_dense() const {
  if (const auto* d = std::get_if<DenseRep>(&impl_->rep)) return d->m;
  Matrix out(impl_->rows, impl_->cols);
  Vector e = Vector::Zero(impl_->cols);
  for (Index j = 0; j < impl_->cols; ++j) {
    e[j] = 1.0;
    out.col(j) = apply(e);
    e[j] = 0.0;
  }
  return out;
}

bool LinearMap::is_identity() const {
  return std::holds_alternative<IdentityRep>(impl_->rep);
}

bool LinearMap::is_forward_difference() const {
  return std::holds_alternative<ForwardDifferenceRep>(impl_->rep);
}

bool LinearMap::is_zero() const { return std::holds_alternative<ZeroRep>(impl_->rep); }

// ---------------------------------------------------------------------------
// operator_norm

namespace {

// Returns lambda_max(A*A) estimate; nullopt if the seed is annihilated.
std::optional<double> power_iterate(const LinearMap& a, Vector v, double tol,
                                    int max_iter, double& last) {
  v.normalize();
  double prev = -1.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = a.adjoint(a.apply(v));
    const double wn = w.norm();
    if (wn == 0.0) return std::nullopt;
    const double lambda = v.dot(w);
    last = lambda;
    if (lambda > 0.0 && std::abs(lambda - prev) <= tol * lambda) return lambda;
    prev = lambda;
    v = w / wn;
  }
  throw NotConverged("operator_norm: power iteration did not converge",
                     std::sqrt(std::max(last, 0.0)));
}

}  // namespace

double operator_norm(const LinearMap& a, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "operator_norm: tol <= 0");
  if (max_iter < 1) throw Error(ErrorCode::kInvalidArgument, "operator_norm: max_iter < 1");
  if (a.is_zero()) return 0.0;
  if (a.is_identity()) return 1.0;
  if (a.is_forward_difference()) {
    return 2.0 * std::cos(std::acos(-1.0) / (2.0 * static_cast<double>(a.cols())));
  }

  double last = 0.0;
  if (auto l = power_iterate(a, Vector::Ones(a.cols()), tol, max_iter, last)) {
    return std::sqrt(*l);
  }
  Lcg64 rng(0x5eed5eed5eedULL);
  if (auto l = power_iterate(a, rng.uniform_vector(a.cols(), 0.5, 1.5), tol,
                             max_iter, last)) {
    return std::sqrt(*l);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// MetricOperator

namespace {

constexpr double kPsdTol = 1e-12;

}  // namespace

const char* to_string(MetricOperator::Form form) {
  switch (form) {
    case MetricOperator::Form::kZero: return "zero";
    case MetricOperator::Form::kScaledIdentity: return "scaled_identity";
    case MetricOperator::Form::kDiagonal: return "diagonal";
    case MetricOperator::Form::kDenseSymmetric: return "dense_symmetric";
    case MetricOperator::Form::kShiftedGram: return "shifted_gram";
  }
  return "unknown";
}

MetricOperator MetricOperator::zero(Index dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "MetricOperator::zero: dim < 1");
  return MetricOperator(Form::kZero, dim);
}

MetricOperator MetricOperator::scaled_identity(Index dim, double mu) {
  if (dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "MetricOperator::scaled_identity: dim < 1");
  }
  if (!std::isfinite(mu)) {
    throw Error(ErrorCode::kNonFinite, "MetricOperator::scaled_identity: mu not finite");
  }
  if (mu < 0.0) {
    throw Error(ErrorCode::kNotPositiveSemidefinite,
                "MetricOperator::scaled_identity: mu = " + std::to_string(mu) + " < 0");
  }
  MetricOperator out(Form::kScaledIdentity, dim);
  out.mu_ = mu;
  return out;
}

MetricOperator MetricOperator::diagonal(Vector entries) {
  if (entries.size() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "MetricOperator::diagonal: empty");
  }
  require_finite(entries, "MetricOperator::diagonal");
  for (Index i = 0; i < entries.size(); ++i) {
    if (entries[i] < 0.0) {
      throw Error(ErrorCode::kNotPositiveSemidefinite,
                  "MetricOperator::diagonal: entry " + std::to_string(i) + " is negative");
    }
  }
  MetricOperator out(Form::kDiagonal, entries.size());
  out.diag_ = std::move(entries);
  return out;
}

MetricOperator MetricOperator::dense_symmetric(Matrix m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "MetricOperator::dense_symmetric: not square");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNonFinite, "MetricOperator::dense_symmetric: non-finite");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kPsdTol * scale) {
    throw Error(ErrorCode::kInvalidArgument, "MetricOperator::dense_symmetric: not symmetric");
  }
  Matrix sym = 0.5 * (m + m.transpose());
  const EigenPair low = smallest_eigenpair(sym);
  if (low.value < -kPsdTol * scale) {
    throw Error(ErrorCode::kNotPositiveSemidefinite,
                "MetricOperator::dense_symmetric: smallest eigenvalue " +
                    std::to_string(low.value));
  }
  MetricOperator out(Form::kDenseSymmetric, sym.rows());
  out.dense_ = std::make_shared<const Matrix>(std::move(sym));
  return out;
}

MetricOperator MetricOperator::shifted_gram(double tau, double c, LinearMap a) {
  const double norm_a = operator_norm(a);
  return shifted_gram(tau, c, std::move(a), norm_a);
}

MetricOperator MetricOperator::shifted_gram(double tau, double c, LinearMap a,
                                            double norm_a) {
  if (!(tau > 0.0) || !(c > 0.0) || !std::isfinite(tau) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument,
                "MetricOperator::shifted_gram: tau and c must be positive and finite");
  }
  const double inv_tau = 1.0 / tau;
  const double gram = c * norm_a * norm_a;
  if (inv_tau < gram * (1.0 - kPsdTol)) {
    throw Error(ErrorCode::kNotPositiveSemidefinite,
                "MetricOperator::shifted_gram: 1/tau = " + std::to_string(inv_tau) +
                    " < c*||A||^2 = " + std::to_string(gram));
  }
  MetricOperator out(Form::kShiftedGram, a.cols());
  out.tau_ = tau;
  out.c_ = c;
  out.map_ = std::move(a);
  return out;
}

Vector MetricOperator::apply(const Vector& x) const {
  require_dim(x, dim_, "MetricOperator::apply");
  switch (form_) {
    case Form::kZero: return Vector::Zero(dim_);
    case Form::kScaledIdentity: return mu_ * x;
    case Form::kDiagonal: return diag_.cwiseProduct(x);
    case Form::kDenseSymmetric: return (*dense_) * x;
    case Form::kShiftedGram: return x / tau_ - c_ * map_->adjoint(map_->apply(x));
  }
  return Vector();
}

Matrix MetricOperator::to_dense() const {
  switch (form_) {
    case Form::kZero: return Matrix::Zero(dim_, dim_);
    case Form::kScaledIdentity: return mu_ * Matrix::Identity(dim_, dim_);
    case Form::kDiagonal: return diag_.asDiagonal();
    case Form::kDenseSymmetric: return *dense_;
    case Form::kShiftedGram: {
      const Matrix a = map_->to_dense();
      Matrix out = -c_ * (a.transpose() * a);
      out.diagonal().array() += 1.0 / tau_;
      return out;
    }
  }
  return Matrix();
}

bool MetricOperator::is_diagonal() const {
  return form_ == Form::kZero || form_ == Form::kScaledIdentity || form_ == Form::kDiagonal;
}

Vector MetricOperator::diagonal_entries() const {
  switch (form_) {
    case Form::kZero: return Vector::Zero(dim_);
    case Form::kScaledIdentity: return Vector::Constant(dim_, mu_);
    case Form::kDiagonal: return diag_;
    default:
      throw Error(ErrorCode::kUnsupported,
                  std::string("MetricOperator::diagonal_entries: form ") +
                      to_string(form_) + " is not diagonal");
  }
}

std::optional<double> MetricOperator::scalar() const {
  if (form_ == Form::kZero) return 0.0;
  if (form_ == Form::kScaledIdentity) return mu_;
  return std::nullopt;
}

MetricOperator MetricOperator::scaled(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::kInvalidArgument, "MetricOperator::scaled: s must be >= 0");
  }
  if (s == 0.0) return zero(dim_);
  switch (form_) {
    case Form::kZero: return *this;
    case Form::kScaledIdentity: return scaled_identity(dim_, mu_ * s);
    case Form::kDiagonal: return diagonal(diag_ * s);
    case Form::kDenseSymmetric: {
      MetricOperator out(Form::kDenseSymmetric, dim_);
      out.dense_ = std::make_shared<const Matrix>(*dense_ * s);
      return out;
    }
    case Form::kShiftedGram: {
      MetricOperator out(Form::kShiftedGram, dim_);
      out.tau_ = tau_ / s;
      out.c_ = c_ * s;
      out.map_ = map_;
      return out;
    }
  }
  return *this;
}

Matrix MetricOperator::shifted_dense(double s) const {
  Matrix out = to_dense();
  out.diagonal().array() += s;
  return out;
}

double seminorm_sq(const MetricOperator& u, const Vector& x) {
  require_dim(x, u.dim(), "seminorm_sq");
  if (u.form() == MetricOperator::Form::kZero) return 0.0;
  const Vector ux = u.apply(x);
  const double value = x.dot(ux);
  if (value < 0.0) {
    // Roundoff only: PSD is enforced at construction. The cancellation error of
    // <x, Ux> scales with ||x|| ||Ux|| (and ||x||^2/tau for ShiftedGram).
    double scale = x.norm() * ux.norm();
    if (u.form() == MetricOperator::Form::kShiftedGram) {
      scale = std::max(scale, x.squaredNorm() / u.tau());
    }
    if (value >= -1e-14 || value >= -1e-13 * scale) return 0.0;
  }
  return value;
}

EigenPair smallest_eigenpair(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotConverged, "symmetric eigensolve failed");
  }
  return EigenPair{es.eigenvalues()[0], es.eigenvectors().col(0)};
}

double largest_eigenvalue(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotConverged, "symmetric eigensolve failed");
  }
  return es.eigenvalues()[es.eigenvalues().size() - 1];
}

EigenPair smallest_eigenpair(const MetricOperator& u) {
  if (u.is_diagonal()) {
    const Vector d = u.diagonal_entries();
    Index i = 0;
    const double v = d.minCoeff(&i);
    Vector w = Vector::Zero(u.dim());
    w[i] = 1.0;
    return EigenPair{v, std::move(w)};
  }
  return smallest_eigenpair(u.to_dense());
}

LoewnerResult loewner_geq(const MetricOperator& u1, const MetricOperator& u2,
                          double slack) {
  if (u1.dim() != u2.dim()) throw DimensionMismatch("loewner_geq", u1.dim(), u2.dim());
  EigenPair low;
  if (u1.is_diagonal() && u2.is_diagonal()) {
    const Vector d = u1.diagonal_entries() - u2.diagonal_entries();
    Index i = 0;
    low.value = d.minCoeff(&i);
    low.vector = Vector::Zero(u1.dim());
    low.vector[i] = 1.0;
  } else {
    low = smallest_eigenpair(Matrix(u1.to_dense() - u2.to_dense()));
  }
  return LoewnerResult{low.value >= -slack, low.value, std::move(low.vector)};
}

bool in_p_alpha(const MetricOperator& u, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kInvalidArgument, "in_p_alpha: alpha <= 0");
  return smallest_eigenpair(u).value >= alpha - 1e-12;
}

// ---------------------------------------------------------------------------
// Text IO

Matrix read_matrix(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next_nonblank = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      if (out.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_nonblank(line)) throw ParseError(source, line_no, "missing header line");
  std::istringstream header(line);
  long long rows = 0, cols = 0;
  if (!(header >> rows >> cols) || rows < 1 || cols < 1) {
    throw ParseError(source, line_no, "header must be \"rows cols\" with positive integers");
  }
  std::string extra;
  if (header >> extra) throw ParseError(source, line_no, "trailing tokens in header");

  Matrix m(rows, cols);
  Index filled = 0;
  const Index total = static_cast<Index>(rows * cols);
  while (filled < total && next_nonblank(line)) {
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (filled >= total) throw ParseError(source, line_no, "too many entries");
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw ParseError(source, line_no, "bad numeric entry '" + tok + "'");
      }
      m(filled / cols, filled % cols) = v;
      ++filled;
    }
  }
  if (filled < total) {
    throw ParseError(source, line_no,
                     "expected " + std::to_string(total) + " entries, found " +
                         std::to_string(filled));
  }
  if (next_nonblank(line)) throw ParseError(source, line_no, "trailing data after matrix");
  return m;
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open matrix file " + path);
  return read_matrix(in, path);
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? " " : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace vmadmm
