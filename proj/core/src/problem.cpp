#include "vmadmm/problem.hpp"

#include <cmath>

#include "vmadmm/error.hpp"

namespace vmadmm {

ProblemSpec::ProblemSpec(FunctionDescriptor f, FunctionDescriptor h,
                         FunctionDescriptor g, LinearMap a, double c)
    : f_(std::move(f)), h_(std::move(h)), g_(std::move(g)), a_(std::move(a)), c_(c) {
  if (f_.dim() != a_.cols()) throw DimensionMismatch("ProblemSpec: f.dim vs A.cols", a_.cols(), f_.dim());
  if (h_.dim() != a_.cols()) throw DimensionMismatch("ProblemSpec: h.dim vs A.cols", a_.cols(), h_.dim());
  if (g_.dim() != a_.rows()) throw DimensionMismatch("ProblemSpec: g.dim vs A.rows", a_.rows(), g_.dim());
  if (!h_.is_smooth()) {
    throw Error(ErrorCode::kInvalidArgument, "ProblemSpec: h must be smooth, got " + h_.describe());
  }
  if (!(c_ > 0.0) || !std::isfinite(c_)) {
    throw Error(ErrorCode::kInvalidArgument, "ProblemSpec: penalty c must be positive and finite");
  }
}

double ProblemSpec::objective(const Vector& x) const {
  const double fx = f_.eval(x);
  const double gx = g_.eval(a_.apply(x));
  if (fx == kInf || gx == kInf) return kInf;
  return fx + h_.eval(x) + gx;
}

ProblemSpec ProblemSpec::with_penalty(double c) const {
  return ProblemSpec(f_, h_, g_, a_, c);
}

}  // namespace vmadmm
