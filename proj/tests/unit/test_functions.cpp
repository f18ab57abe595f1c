#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vmadmm/error.hpp"
#include "vmadmm/functions.hpp"
#include "vmadmm/random.hpp"

using namespace vmadmm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

void expect_vec_near(const Vector& a, const Vector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (Index i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "index " << i;
}

// Every catalog kind in dimension 3, with a few parameter choices.
std::vector<FunctionDescriptor> catalog3() {
  Matrix q(3, 3);
  q << 2, 0.5, 0, 0.5, 1, 0.2, 0, 0.2, 0.5;
  return {FunctionDescriptor::zero(3),
          FunctionDescriptor::l1(3, 0.7),
          FunctionDescriptor::squared_l2(vec({1, -2, 0.5}), 1.5),
          FunctionDescriptor::indicator_box(vec({-1, 0, -kInf}), vec({1, 2, 0.3})),
          FunctionDescriptor::quadratic(q, vec({0.3, -1, 2})),
          FunctionDescriptor::huber(3, 0.5, 2.0)};
}

}  // namespace

TEST(Eval, Examples) {
  EXPECT_DOUBLE_EQ(FunctionDescriptor::l1(2, 2.0).eval(vec({1, -3})), 8.0);
  EXPECT_DOUBLE_EQ(FunctionDescriptor::squared_l2(vec({0, 0})).eval(vec({3, 4})), 12.5);
  const double out = FunctionDescriptor::indicator_box(vec({0, 0}), vec({1, 1})).eval(vec({2, 0}));
  EXPECT_TRUE(std::isinf(out) && out > 0);
}

TEST(Eval, DimensionMismatch) {
  EXPECT_THROW(FunctionDescriptor::l1(2, 1.0).eval(vec({1, 2, 3})), DimensionMismatch);
}

TEST(Prox, Examples) {
  expect_vec_near(FunctionDescriptor::l1(2, 1.0).prox(vec({2, -0.5}), 1.0), vec({1, 0}), 0.0);
  const Vector v = vec({3.25, -7});
  EXPECT_EQ(FunctionDescriptor::zero(2).prox(v, 0.3), v);
  Matrix i1 = Matrix::Identity(1, 1);
  expect_vec_near(FunctionDescriptor::quadratic(i1, vec({0})).prox(vec({4}), 1.0), vec({2}),
                  1e-15);
}

TEST(Prox, RejectsNonpositiveStep) {
  EXPECT_THROW(FunctionDescriptor::l1(1, 1.0).prox(vec({1}), 0.0), Error);
}

TEST(ProxDiag, Examples) {
  expect_vec_near(FunctionDescriptor::l1(2, 1.0).prox_diag(vec({2, 2}), vec({1, 4})),
                  vec({1, 1.75}), 1e-15);
  expect_vec_near(FunctionDescriptor::zero(1).prox_diag(vec({3}), vec({7})), vec({3}), 0.0);
  expect_vec_near(
      FunctionDescriptor::indicator_box(vec({0}), vec({1})).prox_diag(vec({5}), vec({2})),
      vec({1}), 0.0);
}

TEST(ProxDiag, RejectsNonSeparable) {
  EXPECT_THROW(FunctionDescriptor::quadratic(diag2(1, 2), vec({0, 0}))
                   .prox_diag(vec({1, 1}), vec({1, 1})),
               Error);
}

TEST(Grad, Examples) {
  expect_vec_near(FunctionDescriptor::squared_l2(vec({1, 1}), 2.0).grad(vec({2, 3})),
                  vec({2, 4}), 0.0);
  expect_vec_near(FunctionDescriptor::zero(2).grad(vec({5, -1})), vec({0, 0}), 0.0);
  expect_vec_near(FunctionDescriptor::quadratic(diag2(2, 4), vec({1, 0})).grad(vec({1, 1})),
                  vec({3, 4}), 0.0);
}

TEST(Grad, RejectsNonSmooth) {
  EXPECT_THROW(FunctionDescriptor::l1(1, 1.0).grad(vec({1})), Error);
}

TEST(Conjugate, Examples) {
  const auto l1 = FunctionDescriptor::l1(2, 1.0);
  EXPECT_EQ(l1.conjugate_eval(vec({0.5, -1})), 0.0);
  EXPECT_TRUE(std::isinf(l1.conjugate_eval(vec({2, 0}))));
  EXPECT_DOUBLE_EQ(FunctionDescriptor::squared_l2(vec({0, 0})).conjugate_eval(vec({2, 0})), 2.0);
}

TEST(ProxConjugate, Examples) {
  expect_vec_near(FunctionDescriptor::l1(1, 1.0).prox_conjugate(vec({3}), 1.0), vec({1}),
                  1e-15);
  expect_vec_near(FunctionDescriptor::zero(1).prox_conjugate(vec({4}), 2.0), vec({0}), 0.0);
  // Independent check: argmin_y y^2/2 + (y - 3)^2/2.
  const double coarse = golden_min(
      [](double y) { return 0.5 * y * y + 0.5 * (y - 3) * (y - 3); }, -10.0, 10.0);
  const double ref = bisect_min([](double y) { return y + (y - 3); }, -10.0, 10.0);
  EXPECT_NEAR(coarse, ref, 1e-7);
  const Vector got = FunctionDescriptor::squared_l2(vec({0})).prox_conjugate(vec({3}), 1.0);
  EXPECT_NEAR(got[0], ref, 1e-8);
  EXPECT_NEAR(got[0], 1.5, 1e-15);
}

TEST(Capabilities, LipschitzConstants) {
  EXPECT_EQ(*FunctionDescriptor::zero(2).lipschitz(), 0.0);
  EXPECT_EQ(*FunctionDescriptor::squared_l2(vec({0, 0}), 3.0).lipschitz(), 3.0);
  EXPECT_NEAR(*FunctionDescriptor::quadratic(diag2(2, 4), vec({0, 0})).lipschitz(), 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(*FunctionDescriptor::huber(2, 0.5, 2.0).lipschitz(), 4.0);
  EXPECT_FALSE(FunctionDescriptor::l1(2, 1.0).lipschitz().has_value());
  EXPECT_FALSE(FunctionDescriptor::indicator_box(vec({0}), vec({1})).is_smooth());
}

TEST(Construction, RejectsInvalid) {
  EXPECT_THROW(FunctionDescriptor::l1(2, 0.0), Error);
  EXPECT_THROW(FunctionDescriptor::squared_l2(vec({0}), -1.0), Error);
  EXPECT_THROW(FunctionDescriptor::indicator_box(vec({1}), vec({0})), Error);
  Matrix indef = diag2(1, -1);
  EXPECT_THROW(FunctionDescriptor::quadratic(indef, vec({0, 0})), Error);
  EXPECT_THROW(FunctionDescriptor::huber(2, 0.0), Error);
}

TEST(Properties, ProxSubgradientCertificate) {
  Lcg64 rng(101);
  for (const auto& f : catalog3()) {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector v = 3.0 * rng.normal_vector(3);
      const double t = rng.uniform(0.1, 3.0);
      const Vector u = f.prox(v, t);
      const Vector s = (v - u) / t;
      const double fu = f.eval(u);
      ASSERT_TRUE(std::isfinite(fu)) << f.describe();
      for (int probe = 0; probe < 100; ++probe) {
        const Vector w = u + 2.0 * rng.normal_vector(3);
        const double fw = f.eval(w);
        if (!std::isfinite(fw)) continue;
        EXPECT_GE(fw - fu - s.dot(w - u), -1e-10 * std::max(1.0, std::abs(fu)))
            << f.describe();
      }
    }
  }
}

TEST(Properties, ProxDiagIsCoordinatewiseMinimizer) {
  Lcg64 rng(102);
  std::vector<FunctionDescriptor> separable = {
      FunctionDescriptor::zero(3), FunctionDescriptor::l1(3, 0.7),
      FunctionDescriptor::squared_l2(vec({1, -2, 0.5}), 1.5),
      FunctionDescriptor::indicator_box(vec({-1, 0, -2}), vec({1, 2, 0.3})),
      FunctionDescriptor::huber(3, 0.5, 2.0)};
  for (const auto& f : separable) {
    const Vector v = 3.0 * rng.normal_vector(3);
    const Vector d = rng.uniform_vector(3, 0.2, 5.0);
    const Vector u = f.prox_diag(v, d);
    for (Index i = 0; i < 3; ++i) {
      auto obj = [&](double t) {
        Vector w = u;
        w[i] = t;
        const double fw = f.eval(w);
        return std::isfinite(fw) ? fw + 0.5 * d[i] * (t - v[i]) * (t - v[i]) : 1e300;
      };
      const double ref = golden_min(obj, -10.0, 10.0);
      EXPECT_NEAR(u[i], ref, 1e-7) << f.describe() << " coordinate " << i;
    }
  }
}

TEST(Properties, GradientMatchesCentralDifferences) {
  Lcg64 rng(103);
  for (const auto& f : catalog3()) {
    if (!f.is_smooth()) continue;
    for (int trial = 0; trial < 20; ++trial) {
      const Vector x = 2.0 * rng.normal_vector(3);
      const Vector g = f.grad(x);
      for (Index i = 0; i < 3; ++i) {
        Vector xp = x, xm = x;
        xp[i] += 1e-6;
        xm[i] -= 1e-6;
        EXPECT_NEAR(g[i], (f.eval(xp) - f.eval(xm)) / 2e-6, 1e-5) << f.describe();
      }
    }
  }
}

TEST(Properties, LipschitzCertificate) {
  Lcg64 rng(104);
  for (const auto& f : catalog3()) {
    if (!f.is_smooth()) continue;
    const double l = *f.lipschitz();
    for (int trial = 0; trial < 100; ++trial) {
      const Vector x = 2.0 * rng.normal_vector(3), w = 2.0 * rng.normal_vector(3);
      EXPECT_LE((f.grad(x) - f.grad(w)).norm(), l * (x - w).norm() * (1 + 1e-10))
          << f.describe();
    }
  }
}

TEST(Properties, MoreauIdentityAtUnitStep) {
  Lcg64 rng(105);
  for (const auto& f : catalog3()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vector v = 3.0 * rng.normal_vector(3);
      const Vector sum = f.prox(v, 1.0) + f.prox_conjugate(v, 1.0);
      EXPECT_LE((sum - v).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, v.norm()))
          << f.describe();
    }
  }
}

TEST(Properties, FenchelYoung) {
  Lcg64 rng(106);
  for (const auto& f : catalog3()) {
    if (!f.is_conjugable()) continue;
    int finite_pairs = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Vector x = 2.0 * rng.normal_vector(3);
      // Some conjugates are indicators of small sets; include y = 0.
      const Vector y = trial % 5 == 0 ? Vector::Zero(3).eval()
                                      : (trial % 2 == 0 ? 0.5 : 2.0) * rng.normal_vector(3);
      const double fx = f.eval(x), fy = f.conjugate_eval(y);
      if (!std::isfinite(fx) || !std::isfinite(fy)) continue;
      ++finite_pairs;
      EXPECT_GE(fx + fy - x.dot(y), -1e-10) << f.describe();
    }
    EXPECT_GT(finite_pairs, 0) << f.describe();
  }
}

TEST(Properties, ConjugateAttainsSupremum) {
  // f*(y) = <y, x> - f(x) at x = grad f*(y); checked through y in df(x).
  Lcg64 rng(107);
  const auto f = FunctionDescriptor::squared_l2(vec({1, -2, 0.5}), 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = rng.normal_vector(3);
    const Vector y = f.grad(x);
    EXPECT_NEAR(f.eval(x) + f.conjugate_eval(y), x.dot(y), 1e-12 * (1 + x.squaredNorm()));
  }
}

TEST(SubgradientDistance, ZeroAtProxOutput) {
  Lcg64 rng(108);
  for (const auto& f : catalog3()) {
    const Vector v = 3.0 * rng.normal_vector(3);
    const Vector u = f.prox(v, 0.7);
    EXPECT_LE(f.subgradient_distance(u, (v - u) / 0.7), 1e-10) << f.describe();
  }
  const auto l1 = FunctionDescriptor::l1(1, 1.0);
  EXPECT_NEAR(l1.subgradient_distance(vec({0}), vec({1.5})), 0.5, 1e-15);
  EXPECT_NEAR(l1.subgradient_distance(vec({2}), vec({0})), 1.0, 1e-15);
  EXPECT_TRUE(std::isinf(
      FunctionDescriptor::indicator_box(vec({0}), vec({1})).subgradient_distance(vec({2}),
                                                                                vec({0}))));
}
