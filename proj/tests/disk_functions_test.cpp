#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"

using namespace innerfn;
using innerfn::testing::catalog;
using innerfn::testing::central_difference;
using innerfn::testing::random_disk_points;

namespace {

const cplx I(0.0, 1.0);

FunctionExpr mobius(cplx lambda, cplx a) { return FunctionExpr::single(MobiusTransform(lambda, a)); }
FunctionExpr monomial(int m) { return FunctionExpr::single(Monomial{m}); }
FunctionExpr atom(cplx zeta, double mass) {
  return FunctionExpr::single(SingularAtomSpec({{zeta, mass}}));
}

}  // namespace

TEST(Eval, MobiusAtOrigin) { EXPECT_NEAR(std::abs(eval(mobius(1.0, 0.5), 0.0) - cplx(-0.5)), 0.0, 1e-15); }

TEST(Eval, MonomialSquare) { EXPECT_NEAR(std::abs(eval(monomial(2), 0.5) - 0.25), 0.0, 1e-15); }

TEST(Eval, SingularAtomAtOrigin) {
  EXPECT_NEAR(std::abs(eval(atom(1.0, 1.0), 0.0) - std::exp(-1.0)), 0.0, 1e-15);
}

TEST(Eval, RejectsPointsOffTheDisk) {
  EXPECT_THROW(eval(monomial(1), 1.0), DomainError);
  EXPECT_THROW(eval(monomial(1), cplx(0.8, 0.8)), DomainError);
}

TEST(Eval, OverflowGuard) {
  const auto f = FunctionExpr::single(OuterExpPolynomial{{800.0}});
  EXPECT_THROW(eval(f, 0.0), OutOfRangeError);
  const auto s = atom(1.0, 1.0);
  EXPECT_NEAR(log_abs(s, 0.999), -(1.999 / 0.001), 1e-6);
}

TEST(Deriv, MobiusAtOrigin) { EXPECT_NEAR(std::abs(deriv(mobius(1.0, 0.5), 0.0) - 0.75), 0.0, 1e-15); }

TEST(Deriv, MonomialSquare) { EXPECT_NEAR(std::abs(deriv(monomial(2), 0.25) - 0.5), 0.0, 1e-15); }

TEST(Deriv, SingularAtomAgainstClosedFormAndFiniteDifference) {
  const auto s = atom(1.0, 1.0);
  const cplx d = deriv(s, 0.0);
  EXPECT_NEAR(std::abs(d - (-2.0 * std::exp(-1.0))), 0.0, 1e-14);
  const cplx fd = central_difference([&](cplx z) { return eval(s, z); }, 0.0);
  EXPECT_NEAR(std::abs(d - fd), 0.0, 1e-8);
}

TEST(Deriv, ProductRuleAtAZero) {
  // B = z^2 (z - 0.5)/(1 - 0.5 z): derivative at the double zero is 0, and
  // next to the simple zero it is finite and matches the closed form.
  const FunctionExpr b({Monomial{2}, MobiusTransform(1.0, 0.5)});
  EXPECT_EQ(deriv(b, 0.0), cplx(0.0));
  const cplx z = 0.5 + 1e-9;
  const cplx m = (z - 0.5) / (1.0 - 0.5 * z);
  const cplx dm = 0.75 / ((1.0 - 0.5 * z) * (1.0 - 0.5 * z));
  EXPECT_NEAR(std::abs(deriv(b, z) - (2.0 * z * m + z * z * dm)), 0.0, 1e-14);
}

TEST(BoundaryEval, MobiusAtOne) {
  EXPECT_NEAR(std::abs(boundary_eval(mobius(1.0, 0.5), 1.0) - 1.0), 0.0, 1e-15);
}

TEST(BoundaryEval, MonomialCube) { EXPECT_NEAR(std::abs(boundary_eval(monomial(3), I) + I), 0.0, 1e-15); }

TEST(BoundaryEval, AtomIsSpectral) {
  EXPECT_THROW(boundary_eval(atom(1.0, 1.0), 1.0), SpectrumProximityError);
  EXPECT_THROW(boundary_eval(atom(1.0, 1.0), std::polar(1.0, 1e-7)), SpectrumProximityError);
}

TEST(BoundaryEval, RequiresUnimodularPoint) { EXPECT_THROW(boundary_eval(monomial(1), 0.5), DomainError); }

TEST(Truncate, GeometricSequence) {
  const auto b = truncate_blaschke(RadialGeometricSequence{1.0, 0.5}, std::ldexp(1.0, -10));
  ASSERT_EQ(b.zeros().size(), 10u);
  for (int k = 1; k <= 10; ++k)
    EXPECT_NEAR(std::abs(b.zeros()[k - 1].point - (1.0 - std::ldexp(1.0, -k))), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(b.tail_mass(), std::ldexp(1.0, -10));
  EXPECT_TRUE(b.normalized());
  ASSERT_EQ(b.accumulation_points().size(), 1u);
  EXPECT_EQ(b.accumulation_points()[0], cplx(1.0));
}

TEST(Truncate, SingleTerm) {
  const auto b = truncate_blaschke(FiniteSequence{{0.5}}, 1e-3);
  ASSERT_EQ(b.zeros().size(), 1u);
  EXPECT_EQ(b.zeros()[0].point, cplx(0.5));
  EXPECT_EQ(b.zeros()[0].multiplicity, 1);
}

TEST(Truncate, HarmonicSequenceRejected) {
  EXPECT_THROW(truncate_blaschke(RadialPowerSequence{1.0, 1.0}, 1e-3), DomainError);
}

TEST(Truncate, PowerSequenceTailBound) {
  const auto b = truncate_blaschke(RadialPowerSequence{I, 2.0}, 1e-2);
  // sum_{k > n} k^-2 <= 1/n <= 0.01
  EXPECT_EQ(b.zeros().size(), 100u);
  EXPECT_LE(b.tail_mass(), 1e-2);
}

TEST(Construction, RejectsInvalidData) {
  EXPECT_THROW(MobiusTransform(1.0, 1.0), DomainError);
  EXPECT_THROW(MobiusTransform(1.1, 0.0), DomainError);
  EXPECT_THROW(SingularAtomSpec({{0.9, 1.0}}), DomainError);
  EXPECT_THROW(SingularAtomSpec({{1.0, -1.0}}), DomainError);
  EXPECT_THROW(OuterPolynomial({1.0, -1.0}), DomainError);  // root at 1
  EXPECT_THROW(BlaschkeSpec({{cplx(0.6, 0.8), 1}}), DomainError);
}

TEST(Construction, InnerPredicate) {
  EXPECT_TRUE(mobius(I, 0.3).is_inner());
  EXPECT_TRUE(FunctionExpr({Monomial{2}, SingularAtomSpec({{1.0, 1.0}})}, I).is_inner());
  EXPECT_FALSE(FunctionExpr({Monomial{2}}, 2.0).is_inner());
  EXPECT_FALSE(FunctionExpr::single(OuterPolynomial({1.0, -0.5})).is_inner());
}

TEST(CatalogProperties, InnerFunctionsMapIntoTheDisk) {
  const auto pts = random_disk_points(1000, 0.99, 11);
  for (const auto& e : catalog()) {
    for (const auto& z : pts) {
      ASSERT_LT(std::abs(eval(e.spec.expr, z)), 1.0) << e.name << " at " << z;
    }
  }
}

TEST(CatalogProperties, DerivativeMatchesFiniteDifferences) {
  // Radius 0.9 keeps the h = 1e-6 quotient away from the steep region at
  // the singular atoms, where FD truncation error dominates.
  const auto pts = random_disk_points(100, 0.9, 12);
  for (const auto& e : catalog()) {
    const auto& f = e.spec.expr;
    for (const auto& z : pts) {
      const cplx d = deriv(f, z);
      const cplx fd = central_difference([&](cplx w) { return eval(f, w); }, z);
      ASSERT_LE(std::abs(fd - d), 1e-6 * (std::abs(d) + std::abs(eval(f, z))))
          << e.name << " at " << z;
    }
  }
}

TEST(CatalogProperties, BoundaryModulusIsOne) {
  for (const auto& e : catalog()) {
    std::size_t used = 0;
    for (const auto& zeta : circle_points(256, 0.5)) {
      bool near = false;
      for (const auto& p : representation_spectrum(e.spec.expr))
        if (std::abs(zeta - p) < 1e-3) near = true;
      if (near) continue;
      ASSERT_NEAR(std::abs(boundary_eval(e.spec.expr, zeta)), 1.0, 1e-10) << e.name;
      ++used;
    }
    EXPECT_GT(used, 200u);
  }
}

TEST(CatalogProperties, FactorOrderIndependence) {
  const auto pts = random_disk_points(64, 0.95, 13);
  for (const auto& e : catalog()) {
    auto factors = e.spec.expr.factors();
    std::reverse(factors.begin(), factors.end());
    const FunctionExpr g(factors, e.spec.expr.constant());
    for (const auto& z : pts) {
      const cplx a = eval(e.spec.expr, z);
      ASSERT_LE(std::abs(a - eval(g, z)), 1e-12 * std::max(std::abs(a), 1e-300)) << e.name;
    }
  }
}

TEST(Products, FactorOrderIndependenceForMixedProducts) {
  const std::vector<Factor> fs{MobiusTransform(I, cplx(0.2, -0.4)), Monomial{2},
                               SingularAtomSpec({{cplx(0, 1), 0.7}}),
                               BlaschkeSpec({{cplx(-0.5, 0.1), 2}}, true),
                               OuterPolynomial({2.0, cplx(0.0, 1.0)})};
  std::vector<Factor> perm{fs[3], fs[0], fs[4], fs[2], fs[1]};
  const FunctionExpr f(fs, 0.5), g(perm, 0.5);
  for (const auto& z : random_disk_points(64, 0.95, 14)) {
    const cplx a = eval(f, z);
    EXPECT_LE(std::abs(a - eval(g, z)), 1e-12 * std::abs(a));
    EXPECT_LE(std::abs(deriv(f, z) - deriv(g, z)), 1e-11 * std::abs(deriv(f, z)) + 1e-15);
  }
}

TEST(Blaschke, NormalizedFactorsHavePositiveValueAtZero) {
  // (-conj(a)/|a|)(z - a)/(1 - conj(a) z) at 0 equals |a|.
  const cplx a(0.3, -0.4);
  const auto b = FunctionExpr::single(BlaschkeSpec({{a, 1}}, true));
  EXPECT_NEAR(std::abs(eval(b, 0.0) - std::abs(a)), 0.0, 1e-15);
  const auto raw = FunctionExpr::single(BlaschkeSpec({{a, 1}}, false));
  EXPECT_NEAR(std::abs(eval(raw, 0.0) + a), 0.0, 1e-15);
}

TEST(Blaschke, MultiplicityMatchesRepetition) {
  const auto b1 = FunctionExpr::single(BlaschkeSpec({{0.4, 3}}));
  const auto b2 = FunctionExpr::single(BlaschkeSpec({{0.4, 1}, {0.4, 1}, {0.4, 1}}));
  for (const auto& z : random_disk_points(16, 0.9, 15)) {
    EXPECT_LE(std::abs(eval(b1, z) - eval(b2, z)), 1e-14);
    EXPECT_LE(std::abs(deriv(b1, z) - deriv(b2, z)), 1e-13);
  }
}
