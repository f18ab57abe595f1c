#include "vmadmm/catalog.hpp"

#include <cmath>
#include <set>

#include "vmadmm/random.hpp"

namespace vmadmm {

namespace {

class ParamReader {
 public:
  explicit ParamReader(const ProblemParams& p) : p_(p) {}

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    auto it = p_.numbers.find(key);
    return it == p_.numbers.end() ? fallback : it->second;
  }

  Index count(const std::string& key, Index fallback, Index minimum) {
    const double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v) || v < static_cast<double>(minimum)) {
      fail(key + " must be an integer >= " + std::to_string(minimum));
    }
    return static_cast<Index>(v);
  }

  double positive(const std::string& key, double fallback) {
    const double v = number(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key + " must be positive");
    return v;
  }

  std::string text(const std::string& key, const std::string& fallback,
                   const std::set<std::string>& allowed) {
    seen_.insert(key);
    auto it = p_.strings.find(key);
    const std::string v = it == p_.strings.end() ? fallback : it->second;
    if (!allowed.count(v)) fail(key + " = \"" + v + "\" is not allowed");
    return v;
  }

  void finish() const {
    for (const auto& [k, v] : p_.numbers) {
      if (!seen_.count(k)) fail("unknown parameter " + k);
    }
    for (const auto& [k, v] : p_.strings) {
      if (!seen_.count(k)) fail("unknown parameter " + k);
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kInvalidArgument, "problem " + p_.name + ": " + msg);
  }

 private:
  const ProblemParams& p_;
  std::set<std::string> seen_;
};

CatalogProblem finish(std::string name, ProblemSpec spec) {
  const double l = spec.lipschitz();
  const double na = operator_norm(spec.a());
  return CatalogProblem{std::move(name), std::move(spec), l, na, std::nullopt};
}

CatalogProblem make_tv1d(ParamReader& r, double c, std::uint64_t seed) {
  const Index n = r.count("n", 50, 2);
  const double lambda = r.positive("lambda", 0.5);
  const double noise = r.number("noise", 0.1);
  r.finish();
  ProblemSpec spec(FunctionDescriptor::zero(n),
                   FunctionDescriptor::squared_l2(tv1d_signal(n, noise, seed), 1.0),
                   FunctionDescriptor::l1(n - 1, lambda), LinearMap::forward_difference(n), c);
  return finish("tv1d", std::move(spec));
}

CatalogProblem make_lasso(ParamReader& r, double c, std::uint64_t seed) {
  const Index n = r.count("n", 20, 1);
  const Index m = r.count("m", 30, 1);
  const double lambda = r.positive("lambda", 0.1);
  const std::string form = r.text("form", "h", {"h", "g"});
  r.finish();

  Lcg64 rng(seed);
  Matrix b_mat(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) b_mat(i, j) = scale * rng.normal();
  }
  Vector x_true = Vector::Zero(n);
  for (Index j = 0; j < n; j += 4) x_true[j] = rng.uniform(-2.0, 2.0);
  const Vector b = b_mat * x_true + 0.01 * rng.normal_vector(m);

  Matrix q = b_mat.transpose() * b_mat;
  q = 0.5 * (q + q.transpose()).eval();
  auto lsq = FunctionDescriptor::quadratic(q, -(b_mat.transpose() * b));
  auto zero = FunctionDescriptor::zero(n);
  auto f = FunctionDescriptor::l1(n, lambda);
  if (form == "h") {
    return finish("lasso-split", ProblemSpec(f, lsq, zero, LinearMap::identity(n), c));
  }
  return finish("lasso-split", ProblemSpec(f, zero, lsq, LinearMap::identity(n), c));
}

CatalogProblem make_box_qp(ParamReader& r, double c, std::uint64_t seed) {
  const Index n = r.count("n", 10, 1);
  r.finish();
  Lcg64 rng(seed);
  Matrix g(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  Matrix q = g.transpose() * g / static_cast<double>(n);
  q = 0.5 * (q + q.transpose()).eval();
  q.diagonal().array() += 0.1;
  const Vector qv = 2.0 * rng.normal_vector(n);
  ProblemSpec spec(FunctionDescriptor::indicator_box(Vector::Constant(n, -1.0),
                                                     Vector::Constant(n, 1.0)),
                   FunctionDescriptor::quadratic(q, qv), FunctionDescriptor::zero(n),
                   LinearMap::identity(n), c);
  return finish("box-qp", std::move(spec));
}

Vector scalar(double v) { return Vector::Constant(1, v); }

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

CatalogProblem make_toy1d(ParamReader& r, double c) {
  const double lambda = r.positive("lambda", 1.0);
  const double b = r.number("b", 3.0);
  const double lo = r.number("lo", -1.0);
  const double hi = r.number("hi", 1.5);
  const std::string variant = r.text("variant", "smooth", {"smooth", "hzero"});
  r.finish();
  if (!(lo <= hi)) r.fail("lo must not exceed hi");

  const auto l1 = FunctionDescriptor::l1(1, lambda);
  const auto quad = FunctionDescriptor::squared_l2(scalar(b), 1.0);
  const auto id = LinearMap::identity(1);
  Probe saddle;
  if (variant == "smooth") {
    ProblemSpec spec(l1, quad, FunctionDescriptor::indicator_box(scalar(lo), scalar(hi)), id, c);
    CatalogProblem out = finish("toy1d", std::move(spec));
    // minimize lambda|x| + (x - b)^2 / 2 over [lo, hi]; y is the box multiplier.
    double x = std::clamp(soft_threshold(b, lambda), lo, hi);
    if (x == 0.0) {
      saddle.y = scalar(0.0);
    } else {
      const double sign = x > 0.0 ? 1.0 : -1.0;
      saddle.y = scalar(-(x - b) - lambda * sign);
    }
    if (x == 0.0 && (lo == 0.0 || hi == 0.0)) {
      // Kink on a face: the multiplier is not unique; leave it to the oracle.
      return out;
    }
    saddle.x = scalar(x);
    saddle.z = scalar(x);
    out.known_saddle = saddle;
    return out;
  }
  ProblemSpec spec(l1, FunctionDescriptor::zero(1), quad, id, c);
  CatalogProblem out = finish("toy1d", std::move(spec));
  const double x = soft_threshold(b, lambda);
  saddle.x = scalar(x);
  saddle.z = scalar(x);
  saddle.y = scalar(x - b);
  out.known_saddle = saddle;
  return out;
}

}  // namespace

Vector tv1d_signal(Index n, double noise, std::uint64_t seed) {
  Lcg64 rng(seed);
  Vector b(n);
  for (Index i = 0; i < n; ++i) {
    const double t = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    // Ramp with a plateau in the middle third, so the TV penalty has something to flatten.
    const double base = t < 1.0 / 3.0 ? 3.0 * t : (t < 2.0 / 3.0 ? 1.0 : 3.0 * t - 1.0);
    b[i] = base + noise * rng.normal();
  }
  return b;
}

std::vector<std::string> catalog_names() { return {"box-qp", "lasso-split", "toy1d", "tv1d"}; }

std::vector<std::string> catalog_parameters(const std::string& name) {
  if (name == "tv1d") return {"lambda", "n", "noise"};
  if (name == "lasso-split") return {"form", "lambda", "m", "n"};
  if (name == "box-qp") return {"n"};
  if (name == "toy1d") return {"b", "hi", "lambda", "lo", "variant"};
  return {};
}

CatalogProblem build_problem(const ProblemParams& params, double c, std::uint64_t seed) {
  ParamReader r(params);
  if (params.name == "tv1d") return make_tv1d(r, c, seed);
  if (params.name == "lasso-split") return make_lasso(r, c, seed);
  if (params.name == "box-qp") return make_box_qp(r, c, seed);
  if (params.name == "toy1d") return make_toy1d(r, c);
  throw Error(ErrorCode::kInvalidArgument, "unknown problem \"" + params.name +
                                               "\" (expected tv1d, lasso-split, box-qp or toy1d)");
}

}  // namespace vmadmm
