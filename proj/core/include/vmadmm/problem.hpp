#pragma once

#include "vmadmm/functions.hpp"
#include "vmadmm/linops.hpp"

namespace vmadmm {

/// min_x f(x) + h(x) + g(Ax) with penalty parameter c.
///
/// f: R^n (proper convex lsc), h: R^n (convex, L-smooth), g: R^m, A: R^n -> R^m.
class ProblemSpec {
 public:
  ProblemSpec(FunctionDescriptor f, FunctionDescriptor h, FunctionDescriptor g,
              LinearMap a, double c);

  const FunctionDescriptor& f() const { return f_; }
  const FunctionDescriptor& h() const { return h_; }
  const FunctionDescriptor& g() const { return g_; }
  const LinearMap& a() const { return a_; }
  double c() const { return c_; }

  Index n() const { return a_.cols(); }
  Index m() const { return a_.rows(); }

  /// Lipschitz constant of grad h.
  double lipschitz() const { return *h_.lipschitz(); }

  /// f(x) + h(x) + g(Ax), +inf outside the domain.
  double objective(const Vector& x) const;

  /// Same problem with a different penalty.
  ProblemSpec with_penalty(double c) const;

 private:
  FunctionDescriptor f_;
  FunctionDescriptor h_;
  FunctionDescriptor g_;
  LinearMap a_;
  double c_;
};

}  // namespace vmadmm
