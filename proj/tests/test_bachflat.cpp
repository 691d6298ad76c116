#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rext/bachflat.hpp"
#include "rext/error.hpp"

using namespace rext;

namespace {

Point4 random_point(std::mt19937_64& rng, double x1lo = -1.0, double x1hi = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), v(x1lo, x1hi);
  return {v(rng), u(rng), u(rng), u(rng)};
}

double max_abs(const Matrix4& e) {
  double m = 0.0;
  for (const auto& r : e)
    for (double x : r) m = std::max(m, std::abs(x));
  return m;
}

Expr coef(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  return Expr(u(rng));
}

// Smooth random function of (x1, x2).
Expr random_base_function(std::mt19937_64& rng) {
  const Expr x1 = Expr::x1(), x2 = Expr::x2();
  return coef(rng) + coef(rng) * x1 + coef(rng) * x2 + coef(rng) * x1 * x2 + coef(rng) * sin(x1 + coef(rng) * x2);
}

}  // namespace

TEST(Thm11, Anchors) {
  const Point4 p{0.3, -0.4, 0.8, 0.1};
  const auto a = thm11_check(type_a_surface({0, 0, 1, 1, 0, 0}), p);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_EQ(a[1], 0.0);
  const auto b = thm11_check(type_a_surface({1, 0, 0, 0, 0, 0}), p);
  EXPECT_EQ(b[0], 0.0);
  EXPECT_NEAR(b[1], 1.0, 1e-15);
}

TEST(Thm11, Remark12FamilySatisfiesRelations) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 10; ++n) {
    const Expr c = coef(rng) + coef(rng) * sin(Expr::x2());
    const AffineSurface s = remark12_surface(random_base_function(rng), c, random_base_function(rng),
                                             random_base_function(rng), random_base_function(rng));
    for (int k = 0; k < 5; ++k) {
      const auto r = thm11_check(s, random_point(rng));
      EXPECT_LT(r[0], 1e-12);
      EXPECT_LT(r[1], 1e-12);
    }
  }
}

TEST(Operators, P1VanishesForZeroXiOnFlatSurface) {
  const NilpotentSpec spec{parse_expr("1 + x1^2"), Expr(0.0)};
  EXPECT_EQ(p1_eval(pde_operands(AffineSurface(), spec, {0.2, 0.5, 0, 0})), 0.0);
}

TEST(Operators, P2ConstantSymbols) {
  const double a = 0.7, b = -0.4;
  const AffineSurface s = type_a_surface({a, 0, 0, b, 0, 0});
  const NilpotentSpec spec{Expr(1.0), Expr(0.0)};
  const Point4 p{0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(p2_eval(pde_operands(s, spec, p)), a * a - a * b, 1e-14);
  const QIdentityReport q = q_identities(s, spec, p);
  EXPECT_NEAR(q.b22, -4 * (a * a - a * b), 1e-10);
}

TEST(Operators, MissingOrderIsReported) {
  PDEOperands ops;
  ops.xi.order = 0;
  EXPECT_THROW(p1_eval(ops), Error);
  ops.xi.order = 2;
  ops.alpha.order = 1;
  EXPECT_THROW(p2_eval(ops), Error);
}

TEST(Identities, Q3AtRandomData) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 6; ++n) {
    std::array<Expr, 6> g;
    for (auto& e : g) e = random_base_function(rng);
    const AffineSurface s = explicit_surface(g);
    const NilpotentSpec spec{Expr(1.5) + Expr(0.3) * sin(random_base_function(rng)), random_base_function(rng)};
    const Point4 p = random_point(rng);
    const QIdentityReport r = q_identities(s, spec, p, {random_base_function(rng), 0.0, random_base_function(rng)});
    const double scale = 1.0 + std::abs(r.q3);
    EXPECT_LT(r.q3_residual / scale, 1e-9);
    EXPECT_LT(r.mixed_block, 1e-9);
    EXPECT_LT(r.fiber_block, 1e-9);
  }
}

TEST(Identities, BachComponentsAlongP1Solution) {
  std::mt19937_64 rng(9);
  // xi = -x2 / (x1 + c) solves P1 = 0 over the flat connection.
  const NilpotentSpec spec{parse_expr("1 + 0.3*x1^2 + 0.2*sin(x2)"), parse_expr("-x2/(x1 + 3)")};
  for (int n = 0; n < 5; ++n) {
    const Point4 p = random_point(rng);
    const QIdentityReport r = q_identities(AffineSurface(), spec, p);
    EXPECT_LT(std::abs(r.p1), 1e-14);
    EXPECT_LT(r.b22_residual, 1e-9);
    EXPECT_LT(r.b12_residual, 1e-9);
    EXPECT_LT(r.b11_residual, 1e-9);
  }
  const AffineSurface s = type_a_surface({0, 0, 1, 1, 0, 0});
  const NilpotentSpec e42{parse_expr("(1 + 0.3*sin(x2))*sqrt(exp(2*x1) + 1 + x2^2)"), Expr(0.0)};
  for (int n = 0; n < 5; ++n) {
    const QIdentityReport r = q_identities(s, e42, random_point(rng));
    EXPECT_LT(std::abs(r.p2), 1e-9);
    EXPECT_LT(std::abs(r.b22), 1e-8);
  }
}

TEST(Identities, CorrectedP2MatchesBachOnGeneralData) {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 5; ++n) {
    const Expr xi = random_base_function(rng);
    const ScalarField xf(xi);
    std::array<ScalarField, 6> g;
    for (int k : {0, 2, 3, 4, 5}) g[k] = ScalarField(random_base_function(rng));
    // Gamma_11^2 absorbs every other term of P1, so P1 vanishes identically.
    g[1] = ScalarField(
        [xf, g](const Point4& p, int k) {
          const Jet x = xf.jet(p, k + 1);
          const Jet v = x.truncated(k);
          return x.diff(0) - v * x.diff(1) - g[4].jet(p, k) * v * v * v +
                 (2.0 * g[2].jet(p, k) - g[5].jet(p, k)) * v * v - (g[0].jet(p, k) - 2.0 * g[3].jet(p, k)) * v;
        },
        "G11_2 from P1", false, true);
    const AffineSurface s(g);
    const NilpotentSpec spec{Expr(1.5) + Expr(0.3) * sin(random_base_function(rng)), xi};
    const Point4 p = random_point(rng);
    const QIdentityReport r = q_identities(s, spec, p);
    const double scale = 1.0 + std::abs(r.b22);
    EXPECT_LT(std::abs(r.p1), 1e-12);
    EXPECT_LT(r.b22_residual / scale, 1e-10);
    EXPECT_LT(r.b12_residual / scale, 1e-10);
    EXPECT_LT(r.b11_residual / scale, 1e-10);
    const double displayed = p2_eval(pde_operands(s, spec, p), P2Form::AsDisplayed);
    EXPECT_GT(std::abs(r.b22 + 4 * displayed), 1e-6);
  }
}

TEST(Identities, AlphaZeroIsRejected) {
  EXPECT_THROW(q_identities(AffineSurface(), {Expr(0.0), Expr(0.0)}, {0, 0, 0, 0}), Error);
}

TEST(Equivalence, CanonicalRelationsIffBachFlat) {
  std::mt19937_64 rng(2024);
  int flat = 0, curved = 0;
  for (int n = 0; n < 50; ++n) {
    AffineSurface s;
    if (n % 2 == 0) {
      s = remark12_surface(random_base_function(rng), coef(rng) + coef(rng) * Expr::x2(), random_base_function(rng),
                           random_base_function(rng), random_base_function(rng));
    } else {
      std::array<Expr, 6> g;
      for (auto& e : g) e = random_base_function(rng);
      s = explicit_surface(g);
    }
    std::vector<Point4> pts;
    for (int k = 0; k < 3; ++k) pts.push_back(random_point(rng));
    double rel = 0.0;
    for (const Point4& p : pts) {
      const auto r = thm11_check(s, p);
      rel = std::max({rel, r[0], r[1]});
    }
    const double bach = bach_scan(build_metric(s, EndoField::canonical()), pts).max_abs;
    if (rel < 1e-10) {
      EXPECT_LT(bach, 1e-8) << "surface " << n;
      ++flat;
    } else {
      EXPECT_GT(bach, 1e-6) << "surface " << n;
      ++curved;
    }
  }
  EXPECT_EQ(flat, 25);
  EXPECT_EQ(curved, 25);
}

TEST(Equivalence, DeformationDoesNotChangeVerdict) {
  std::mt19937_64 rng(77);
  const AffineSurface good = type_a_surface({0, 0, 1, 1, 0, 0});
  const AffineSurface bad = type_a_surface({1, 0.5, 0.2, 0, 0, 0});
  std::vector<Point4> pts{random_point(rng), random_point(rng)};
  for (int n = 0; n < 3; ++n) {
    const DeformationField phi{random_base_function(rng), random_base_function(rng), random_base_function(rng)};
    EXPECT_LT(bach_scan(build_metric(good, EndoField::canonical(), phi), pts).max_abs, 1e-8);
    EXPECT_GT(bach_scan(build_metric(bad, EndoField::canonical(), phi), pts).max_abs, 1e-6);
  }
}

TEST(Conformal, FiberBlockIsSecondFiberDerivative) {
  std::mt19937_64 rng(3);
  std::array<Expr, 6> g;
  for (auto& e : g) e = random_base_function(rng);
  const ExtensionMetric m = build_metric(explicit_surface(g), NilpotentSpec{parse_expr("1 + x2^2"), Expr::x1()}.endo());
  const ScalarField phi(parse_expr("exp(y1*x2) + y2^3 + y1*y2*x1"));
  for (int n = 0; n < 4; ++n) {
    const Point4 p = random_point(rng);
    const Matrix4 e = brinkmann_e(m.field(), phi, p);
    const Jet f = phi.jet(p, 2);
    EXPECT_NEAR(e[2][2], 2 * f.derivative({0, 0, 2, 0}), 1e-11);
    EXPECT_NEAR(e[2][3], 2 * f.derivative({0, 0, 1, 1}), 1e-11);
    EXPECT_NEAR(e[3][3], 2 * f.derivative({0, 0, 0, 2}), 1e-11);
  }
}

TEST(Conformal, PackReuseMatchesDirectEvaluation) {
  const ExtensionMetric m = build_metric(type_b_surface({1, 0, 0.7, 0.4, -0.3, 0.9}), EndoField::canonical());
  const Point4 p{1.2, 0.3, -0.5, 0.4};
  PackOptions o;
  o.order = 2;
  o.bach = false;
  o.weyl_derivatives = false;
  const ScalarField phi(parse_expr("x1^1.6*exp(0.2*x2)"));
  const Matrix4 a = brinkmann_e(m.field(), phi, p);
  const Matrix4 b = brinkmann_e(curvature_pack(m.field(), p, o), phi, p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(a[i][j], b[i][j]);
}

TEST(Conformal, ETildeDetectsNonConformallyEinsteinData) {
  std::mt19937_64 rng(21);
  const ExtensionMetric m = build_metric(type_b_surface({1, 0, 0.7, 0.4, -0.3, 0.9}), EndoField::canonical());
  const ScalarField phi(parse_expr("x1^1.6"));
  double worst = 0.0;
  for (int n = 0; n < 4; ++n) {
    const Point4 p = random_point(rng, 0.6, 1.6);
    for (const auto& a : e_tilde(m.field(), phi, p))
      for (const auto& r : a)
        for (double x : r) worst = std::max(worst, std::abs(x));
  }
  EXPECT_GT(worst, 1e-6);
}

TEST(Conformal, FlatMetricIsEinsteinForUnitFactor) {
  const ExtensionMetric m = build_metric(AffineSurface(), EndoField());
  EXPECT_LT(einstein_residual(m.field(), ScalarField(1.0), {0.1, 0.2, 0.3, 0.4}), 1e-15);
  EXPECT_LT(max_abs(brinkmann_e(m.field(), ScalarField(1.0), {0.1, 0.2, 0.3, 0.4})), 1e-15);
}

TEST(Conformal, NonPositiveFactorIsRejected) {
  const ExtensionMetric m = build_metric(AffineSurface(), EndoField());
  EXPECT_THROW(einstein_residual(m.field(), ScalarField(-1.0), {0, 0, 0, 0}), Error);
  EXPECT_THROW(e_tilde(m.field(), ScalarField(0.0), {0, 0, 0, 0}), Error);
}

TEST(Conformal, OdeProfileMatchesClosedForm) {
  // 2P'' + A P = 0 with A = -2 k^2 has P = exp(k x2) for P(0) = 1, P'(0) = k.
  const double k = 0.37;
  const ScalarField p = ode_profile(-2 * k * k, 1.0, k);
  for (double x2 : {-0.9, -0.2, 0.0, 0.6}) {
    const Jet j = p.jet({1.0, x2, 0, 0}, 3);
    EXPECT_NEAR(j.value(), std::exp(k * x2), 1e-12);
    EXPECT_NEAR(j.derivative({0, 1, 0, 0}), k * std::exp(k * x2), 1e-12);
    EXPECT_NEAR(j.derivative({0, 3, 0, 0}), k * k * k * std::exp(k * x2), 1e-11);
    EXPECT_EQ(j.derivative({1, 0, 0, 0}), 0.0);
  }
}

TEST(Catalog, AllExampleIdentitiesPass) {
  const auto checks = example_catalog_checks(1);
  EXPECT_GE(checks.size(), 30u);
  for (const CatalogCheck& c : checks) {
    EXPECT_TRUE(c.pass) << c.name << " value " << c.value << " expected " << c.expected << " residual "
                        << c.residual << " " << c.note;
    EXPECT_FALSE(c.citation.empty());
  }
}

TEST(Catalog, StrictSweepsFindNothingBelowTolerance) {
  int strict = 0, controls = 0;
  for (const CatalogCheck& c : example_catalog_checks(4)) {
    if (c.name.ends_with("strict_sweep")) {
      ++strict;
      EXPECT_GE(c.value, 1e-4) << c.name;
    }
    if (c.name.ends_with("control_sweep")) {
      ++controls;
      EXPECT_LT(c.value, 1e-8) << c.name;
    }
  }
  EXPECT_EQ(strict, 5);
  EXPECT_EQ(controls, 3);
}
