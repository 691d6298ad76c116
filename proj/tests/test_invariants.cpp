#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rext/error.hpp"
#include "rext/invariants.hpp"

using namespace rext;

namespace {

PackOptions quick(int order = 2) {
  PackOptions o;
  o.order = order;
  o.bach = false;
  o.weyl_derivatives = false;
  return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

AffineSurface random_surface(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  auto lin = [&] {
    return Expr(u(rng)) + Expr(u(rng)) * Expr::x1() + Expr(u(rng)) * sin(Expr::x2()) +
           Expr(u(rng)) * Expr::x1() * Expr::x2();
  };
  return explicit_surface({lin(), lin(), lin(), lin(), lin(), lin()});
}

Matrix2 rotation(double r, double th) {
  return {{{r * std::cos(th), r * std::sin(th)}, {-r * std::sin(th), r * std::cos(th)}}};
}

}  // namespace

TEST(Invariants, ClosedFormsForConstantEndomorphisms) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int complex_cases = 0;
  for (int n = 0; n < 200; ++n) {
    Matrix2 t{{{u(rng), u(rng)}, {u(rng), u(rng)}}};
    if (n % 2 == 1) t = rotation(std::abs(u(rng)) + 0.1, u(rng) * 2.0);
    const ExtensionMetric m = build_metric(AffineSurface(), EndoField::constant(t));
    const QuadraticInvariants q = quadratic_invariants(curvature_pack(m, {u(rng), u(rng), u(rng), u(rng)}, quick()));
    const JordanClass jc = classify_matrix(t);
    if (std::abs(jc.lambda1.imag()) > 1e-12) ++complex_cases;
    const QuadraticInvariants e = eigen_invariants(jc.lambda1, jc.lambda2);
    EXPECT_LT(rel(q.tau, e.tau), 1e-9);
    EXPECT_LT(rel(q.norm_rho2, e.norm_rho2), 1e-9);
    EXPECT_LT(rel(q.norm_r2, e.norm_r2), 1e-9);
  }
  EXPECT_GT(complex_cases, 50);
}

TEST(Invariants, DiagonalEndoMatchesPolynomials) {
  const ExtensionMetric m = build_metric(AffineSurface(), EndoField::constant({{{2.0, 0.0}, {0.0, -1.0}}}));
  const QuadraticInvariants q = quadratic_invariants(curvature_pack(m, {0.1, 0.2, 0.3, 0.4}, quick()));
  EXPECT_NEAR(q.tau, 2.0 * (4 - 2 + 1), 1e-10);
  EXPECT_NEAR(q.norm_r2, 4.0 * (16 + 4 + 1), 1e-10);
  EXPECT_NEAR(q.norm_rho2, 32 - 16 + 4 - 4 + 2, 1e-10);
}

TEST(Invariants, RotationExamples) {
  const double r = 1.0;
  const ExtensionMetric m1 = build_metric(AffineSurface(), EndoField::constant(rotation(r, std::numbers::pi / 3)));
  const QuadraticInvariants q1 = quadratic_invariants(curvature_pack(m1, {0.3, -0.1, 0.5, 0.2}, quick()));
  EXPECT_NEAR(q1.tau, 0.0, 1e-10);
  EXPECT_NEAR(q1.norm_r2, 0.0, 1e-10);
  EXPECT_NEAR(q1.norm_rho2, -3.0 * std::pow(r, 4), 1e-10);

  const double th = 0.5 * std::atan((std::sqrt(7.0) + 1) / (std::sqrt(7.0) - 1));
  const ExtensionMetric m2 = build_metric(AffineSurface(), EndoField::constant(rotation(1.0, th)));
  const QuadraticInvariants q2 = quadratic_invariants(curvature_pack(m2, {0.3, -0.1, 0.5, 0.2}, quick()));
  EXPECT_NEAR(q2.norm_rho2, 0.0, 1e-10);

  // Non-constant radius: the invariants stay pointwise polynomial in T.
  EndoField varying({{{parse_expr("(1 + x1^2)*cos(1.0471975511965976)"), parse_expr("(1 + x1^2)*sin(1.0471975511965976)")},
                      {parse_expr("-(1 + x1^2)*sin(1.0471975511965976)"), parse_expr("(1 + x1^2)*cos(1.0471975511965976)")}}});
  const ExtensionMetric m3 = build_metric(type_a_surface({0.2, 0, 0.1, 0.3, 0, 0}), varying);
  const Point4 p{0.5, 0.2, -0.3, 0.4};
  const QuadraticInvariants q3 = quadratic_invariants(curvature_pack(m3, p, quick()));
  EXPECT_NEAR(q3.tau, 0.0, 1e-9);
  EXPECT_NEAR(q3.norm_r2, 0.0, 1e-9);
  EXPECT_NEAR(q3.norm_rho2, -3.0 * std::pow(1.25, 4), 1e-9);
}

TEST(Invariants, VsiVerdicts) {
  const ExtensionMetric rot = build_metric(AffineSurface(), EndoField::constant(rotation(1.0, std::numbers::pi / 3)));
  const VsiReport r = vsi_classify(rot, {0.1, 0.1, 0.2, 0.3});
  EXPECT_EQ(r.verdict, VsiVerdict::NotVsi);
  EXPECT_EQ(r.witness, "normRho2");
  EXPECT_FALSE(r.nilpotent_by_classifier);
  EXPECT_TRUE(r.consistent);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  const NilpotentSpec spec{parse_expr("1 + x1^2/4"), parse_expr("sin(x1) + x2/3")};
  const ExtensionMetric nil =
      build_metric(random_surface(rng), spec.endo(), {parse_expr("x1*x2"), parse_expr("cos(x2)"), 0.4});
  const VsiReport v = vsi_classify(nil, {u(rng), u(rng), u(rng), u(rng)});
  EXPECT_EQ(v.verdict, VsiVerdict::VsiEvidence) << v.witness << " = " << v.witness_value;
  ASSERT_TRUE(v.derivative.has_value());
  EXPECT_LT(std::abs(v.derivative->norm_dr2), 1e-9);
  EXPECT_LT(std::abs(v.derivative->norm_dw2), 1e-9);
  EXPECT_LT(std::abs(v.derivative->cubic), 1e-9);
  EXPECT_TRUE(v.nilpotent_by_eigenvalues);
  EXPECT_TRUE(v.consistent);
}

TEST(Invariants, DerivativeLevelOnNonNilpotentData) {
  const ExtensionMetric m =
      build_metric(type_a_surface({0.3, 0, 0, 0.2, 0, 0}), EndoField::constant(rotation(1.0, std::numbers::pi / 3)));
  const DerivativeInvariants d = derivative_level_invariants(m.field(), {0.2, 0.1, 0.4, -0.3});
  EXPECT_TRUE(std::abs(d.cubic) > 1e-6 || std::abs(d.norm_dr2) > 1e-6);
  const DerivativeInvariants flat = derivative_level_invariants(build_metric(AffineSurface(), EndoField()).field(),
                                                                {0.2, 0.1, 0.4, -0.3});
  EXPECT_EQ(flat.norm_dr2, 0.0);
  EXPECT_EQ(flat.cubic, 0.0);
}

TEST(Invariants, ClassifierSweeps) {
  const ClassifierSweep a = sweep_classifier(-3.0, 0.0, 4.0);
  EXPECT_TRUE(a.ok);
  EXPECT_GT(a.min_nonzero, 1e-3);
  EXPECT_GT(a.samples, 2 * 50 * 50);
  const ClassifierSweep b = sweep_classifier(56.0 / 5.0, 1.0, -88.0 / 5.0);
  EXPECT_TRUE(b.ok);
  // |rho|^2 alone is indefinite and must be caught.
  const ClassifierSweep c = sweep_classifier(0.0, 0.0, 1.0);
  EXPECT_FALSE(c.ok);
  EXPECT_LT(std::abs(c.witness_value), 1e-9);
}

TEST(Invariants, WalkerBlocksForGenericData) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int n = 0; n < 5; ++n) {
    const ExtensionMetric m = build_metric(random_surface(rng), EndoField::canonical(),
                                           {parse_expr("x2 + x1^2"), parse_expr("x1*x2"), parse_expr("cos(x1)")});
    const WalkerBlocksReport b = walker_blocks(m, {u(rng), u(rng), u(rng), u(rng)});
    EXPECT_LT(b.max(), 1e-10);
  }
  EXPECT_THROW(walker_blocks(build_metric(AffineSurface(), EndoField::mirrored()), {0, 0, 0, 0}), Error);
}

TEST(Invariants, WalkerTwoFormAndOneForm) {
  const AffineSurface s = explicit_surface({parse_expr("x1*sin(x2)"), parse_expr("x2"), parse_expr("cos(x1*x2)"),
                                            parse_expr("exp(x1*x2/2)"), parse_expr("x1*x2"), parse_expr("x1^3")});
  const ExtensionMetric m = build_metric(s, EndoField::canonical(), {parse_expr("x2 + x1^2"), 0.0, 1.0});
  const Point4 p{0.3, -0.2, 0.7, -0.4};
  const WalkerInvariants w = walker_invariants(m, p);
  EXPECT_NEAR(w.omega_h, -2.0 * ricci_affine(s, p).ricci_anti[0][1], 1e-12);
  const double e1 = std::abs(walker_domega(m, p, 0.02) + w.omega_h);
  const double e2 = std::abs(walker_domega(m, p, 0.01) + w.omega_h);
  EXPECT_LT(e2, 5e-3);
  EXPECT_GT(e1 / e2, 3.5);
}

TEST(Invariants, TypeASurfacesHaveVanishingBeta1) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int n = 0; n < 10; ++n) {
    const ExtensionMetric m = build_metric(type_a_surface({u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)}),
                                           EndoField::canonical(), {u(rng), u(rng), u(rng)});
    const WalkerInvariants w = walker_invariants(m, {u(rng), u(rng), u(rng), u(rng)});
    if (!w.beta1) {
      EXPECT_EQ(w.beta1_flag, WalkerFlag::DegenerateRhoH);
      continue;
    }
    EXPECT_NEAR(*w.beta1, 0.0, 1e-12);
    EXPECT_FALSE(w.beta2.has_value());
    EXPECT_EQ(w.beta2_flag, WalkerFlag::ZeroOmega);
  }
}

TEST(Invariants, TypeBCanonicalClosedForms) {
  const double c121 = 0.7, c221 = -0.3, c222 = 0.9;
  const Point4 p{1.3, 0.4, 0.6, -0.8};
  const double x1 = p.x1, x3 = p.y1, phi = 1.3 + 0.16;
  const DeformationField def{parse_expr("x1 + x2^2"), parse_expr("x1*x2"), 0.5};
  for (double c : {0.4, 0.0, 2.0}) {
    const WalkerInvariants w =
        walker_invariants(build_metric(type_b_surface({1.0, 0, c121, c, c221, c222}), EndoField::canonical(), def), p);
    const double d = 2 * (2 - c) * c * x1 * x1 * phi - 4 * (2 - c) * (2 - c) * c * x1 * x3 - (4 * c + 1) * c121 * c121 +
                     4 * (c - 2) * c221 * c * c - c222 * c222 + 2 * (1 - 2 * (c - 1) * c) * c121 * c222;
    const double b2 = ((c + 3) * (c + 3) * x1 * x1 * phi + 2 * (c - 2) * (c + 3) * (c + 3) * x1 * x3 -
                       2 * (c + 3) * (c + 3) * c * c221 - 2 * ((c - 1) * c + 3) * c222 * c222 -
                       2 * ((4 * c + 9) * c + 6) * c121 * c121 - 2 * ((3 * c - 4) * c - 9) * c121 * c222) /
                      d;
    ASSERT_TRUE(w.beta1 && w.beta2);
    EXPECT_LT(rel(*w.beta1, (c121 + c222) * (c121 + c222) / d), 1e-8);
    EXPECT_LT(rel(*w.beta2, b2), 1e-8);
    if (c == 0.0)
      EXPECT_NEAR(*w.beta1, -std::pow(c121 + c222, 2) / std::pow(c121 - c222, 2), 1e-10);
    if (c == 2.0)
      EXPECT_NEAR(*w.beta1, -std::pow(c121 + c222, 2) / std::pow(3 * c121 + c222, 2), 1e-10);
  }
  for (double a : {0.6, 0.0}) {
    const WalkerInvariants w =
        walker_invariants(build_metric(type_b_surface({a, 0, c121, a, c221, c222}), EndoField::canonical(), def), p);
    const double d = 2 * a * x1 * x1 * phi - 4 * a * a * x1 * x3 - c222 * c222 - (4 * a * a + 1) * c121 * c121 -
                     4 * a * c221 + 2 * c121 * c222;
    const double b2 = (4 * (a + 1) * (a + 1) * x1 * x1 * phi - 8 * (a + 1) * (a + 1) * a * x1 * x3 -
                       2 * (a + 2) * c222 * c222 - 8 * (a + 1) * (a + 1) * c221 -
                       2 * (a * (8 * a + 9) + 2) * c121 * c121 + 4 * (3 * a + 2) * c121 * c222) /
                      d;
    ASSERT_TRUE(w.beta1 && w.beta2);
    EXPECT_LT(rel(*w.beta1, (c121 + c222) * (c121 + c222) / d), 1e-8);
    EXPECT_LT(rel(*w.beta2, b2), 1e-8);
  }
}

TEST(Invariants, TypeBMirroredClosedForms) {
  const double c111 = 0.6, c112 = -0.5, c121 = 0.7;
  const Point4 p{1.3, 0.4, 0.6, -0.8};
  const double x1 = p.x1, x4 = p.y2, phi = 1.3 + 0.16;
  const DeformationField def{0.3, parse_expr("x1*x2"), parse_expr("x1 + x2^2")};
  {
    const double c122 = 0.4;
    const WalkerInvariants w =
        walker_invariants(build_metric(type_b_surface({c111, c112, c121, c122, 0, 0}), EndoField::mirrored(), def), p);
    const double d = c121 * c121 * (-2 * x1 * x1 * phi - 4 * c121 * x1 * x4 - 4 * c111 * c122 + 4 * c112 * c121 - 1);
    const double b2 = c121 * c121 *
                      (x1 * x1 * phi + 2 * c121 * x1 * x4 - 12 * c122 - 2 * c112 * c121 - 4 - 2 * c111 * c111 -
                       8 * c122 * c122 - 6 * (c122 + 1) * c111) /
                      d;
    ASSERT_TRUE(w.mirrored && w.beta1 && w.beta2);
    EXPECT_LT(rel(*w.beta1, c121 * c121 / d), 1e-8);
    EXPECT_LT(rel(*w.beta2, b2), 1e-8);
  }
  {
    const double c122 = 2.0;
    const WalkerInvariants w = walker_invariants(
        build_metric(type_b_surface({c111, c112, c121, c122, 0, c121}), EndoField::mirrored(), def), p);
    ASSERT_TRUE(w.beta1 && w.beta2);
    EXPECT_NEAR(*w.beta1, -0.25, 1e-10);
    const double b2 = -(x1 * x1 * phi - 2 * c121 * x1 * x4 - 4 * c122 * c122 - 2 * c122) / (c122 * c122);
    EXPECT_LT(rel(*w.beta2, b2), 1e-8);
  }
}

TEST(Invariants, WalkerUndefinedMarkers) {
  // Flat surface, Phi = 0: the horizontal Ricci block vanishes.
  const WalkerInvariants w = walker_invariants(build_metric(AffineSurface(), EndoField::canonical()), {0, 0, 0, 0});
  EXPECT_FALSE(w.beta1.has_value());
  EXPECT_EQ(w.beta1_flag, WalkerFlag::DegenerateRhoH);
  EXPECT_FALSE(w.beta2.has_value());
  EXPECT_THROW(walker_invariants(build_metric(AffineSurface(), EndoField::constant({{{1, 0}, {0, 1}}})), {0, 0, 0, 0}),
               Error);
}

TEST(Invariants, BetaIndependentOfFiberRelabeling) {
  // Fiber translations fixing the base point change beta through x3 only in
  // the displayed way; the C_12^2 = 0 case is fiber independent.
  const ExtensionMetric m =
      build_metric(type_b_surface({1.0, 0, 0.7, 0.0, -0.3, 0.9}), EndoField::canonical(), {parse_expr("x1"), 0, 0});
  const double b = *walker_invariants(m, {1.1, 0.2, 0.0, 0.0}).beta1;
  for (double y : {-2.0, 0.5, 3.0}) EXPECT_NEAR(*walker_invariants(m, {1.1, 0.2, y, -y}).beta1, b, 1e-10);
}
