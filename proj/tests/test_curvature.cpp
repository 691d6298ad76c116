#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "rext/curvature.hpp"
#include "rext/error.hpp"
#include "fd_oracle.hpp"

using namespace rext;

namespace {

Point4 random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  return {u(rng), u(rng), u(rng), u(rng)};
}

AffineSurface example42() { return type_a_surface({0, 0, 1, 1, 0, 0}); }

EndoField example42_endo() {
  return EndoField({{{0.0, parse_expr("(1 + x2^2/3)*sqrt(exp(2*x1) + 2 + sin(x2))")}, {0.0, 0.0}}}, "ex42");
}

AffineSurface generic_surface() {
  return explicit_surface({parse_expr("x1*x2"), parse_expr("sin(x2)"), parse_expr("1 + x1^2"), parse_expr("0.5"),
                           parse_expr("exp(x1/2)"), parse_expr("x2")});
}

}  // namespace

TEST(Curvature, FlatDataIsFlat) {
  const ExtensionMetric m = build_metric(AffineSurface(), EndoField());
  const CurvaturePack pk = curvature_pack(m, {0.2, 0.1, 0.3, -0.4});
  EXPECT_LT(pk.riemann.max_abs_value(), 1e-12);
  EXPECT_LT(pk.weyl.max_abs_value(), 1e-12);
  EXPECT_LT(pk.bach->max_abs_value(), 1e-12);
  EXPECT_LT(std::abs(pk.tau.value()), 1e-12);
}

TEST(Curvature, R2323IsMinusOneForCanonicalEndo) {
  std::mt19937_64 rng(11);
  const ExtensionMetric m =
      build_metric(generic_surface(), EndoField::canonical(), {parse_expr("x2"), parse_expr("x1*x2"), 1.0});
  for (int n = 0; n < 5; ++n) {
    PackOptions o;
    o.order = 2;
    o.bach = false;
    o.weyl_derivatives = false;
    const CurvaturePack pk = curvature_pack(m, random_point(rng), o);
    EXPECT_NEAR(pk.riemann(1, 2, 1, 2).value(), -1.0, 1e-12);
  }
}

TEST(Curvature, RiemannSymmetriesAndWeylTraceFree) {
  std::mt19937_64 rng(3);
  const ExtensionMetric m =
      build_metric(generic_surface(), EndoField::constant({{{0.3, 1.2}, {-0.4, 0.7}}}), {parse_expr("x1"), 0.0, 0.0});
  PackOptions o;
  o.order = 2;
  o.bach = false;
  o.weyl_derivatives = false;
  const CurvaturePack pk = curvature_pack(m, random_point(rng), o);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          const double r = pk.riemann(i, j, k, l).value();
          EXPECT_NEAR(r, -pk.riemann(j, i, k, l).value(), 1e-10);
          EXPECT_NEAR(r, -pk.riemann(i, j, l, k).value(), 1e-10);
          EXPECT_NEAR(r, pk.riemann(k, l, i, j).value(), 1e-10);
          EXPECT_NEAR(r + pk.riemann(j, k, i, l).value() + pk.riemann(k, i, j, l).value(), 0.0, 1e-10);
        }
  EXPECT_LT(max_trace(pk.weyl, pk.g_inv), 1e-9);
}

TEST(Curvature, Example42IsBachFlat) {
  std::mt19937_64 rng(5);
  const ExtensionMetric m = build_metric(example42(), example42_endo(), {parse_expr("x1*x2"), 0.0, 1.0});
  for (int n = 0; n < 3; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const CurvaturePack pk = curvature_pack(m, random_point(rng));
    const auto t1 = std::chrono::steady_clock::now();
    if (n == 0) std::printf("pack time %.3f s\n", std::chrono::duration<double>(t1 - t0).count());
    EXPECT_LT(pk.bach->max_abs_value(), 1e-8);
  }
}

TEST(Curvature, GenericNilpotentIsNotBachFlat) {
  const ExtensionMetric m = build_metric(generic_surface(), EndoField::canonical());
  const CurvaturePack pk = curvature_pack(m, {0.3, 0.2, 0.5, -0.1});
  EXPECT_GT(pk.bach->max_abs_value(), 1e-4);
  double tr = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      tr += pk.g_inv[i][j].value() * (*pk.bach)(i, j).value();
      EXPECT_NEAR((*pk.bach)(i, j).value(), (*pk.bach)(j, i).value(), 1e-8);
    }
  EXPECT_LT(std::abs(tr), 1e-8);
}

TEST(Curvature, MetricIsParallel) {
  const ExtensionMetric m = build_metric(generic_surface(), NilpotentSpec{parse_expr("1+x1"), parse_expr("x2")}.endo());
  const Point4 p{0.1, 0.4, -0.3, 0.6};
  const JetMatrix4 g = m.metric(p, 3);
  const JetTensor gamma = levi_civita(g, inverse(g));
  JetTensor gt(2, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) gt(i, j) = g[i][j];
  EXPECT_LT(covariant_derivative(gt, gamma).max_abs_value(), 1e-11);
}

TEST(Curvature, ThetaAnchors) {
  const ThetaTensor a = theta_extract(Matrix2{{{1, 0}, {0, 0}}});
  EXPECT_NEAR(a[0][0][0][0], 1.0 / 6.0, 1e-10);
  const ThetaTensor b = theta_extract(Matrix2{{{1, 1}, {0, 1}}});
  EXPECT_NEAR(b[0][0][1][1], -3.0, 1e-9);
  const ThetaTensor z = theta_extract(Matrix2{{{0, 0}, {0, 0}}});
  EXPECT_EQ(z[0][0][0][0], 0.0);
}

TEST(Curvature, ThetaClosedFormsForDiagonal) {
  const double l1 = 0.7;
  const double l2 = -1.3;
  const ThetaTensor t = theta_extract(Matrix2{{{l1, 0.4}, {0, l2}}});
  const double d = (l1 - l2) * (l1 - l2);
  EXPECT_NEAR(t[0][0][0][0], l1 * l1 * d * (l1 * l1 + l1 * l2 - 5 * l2 * l2) / 6, 1e-9);
  EXPECT_NEAR(t[1][1][1][1], l2 * l2 * d * (-5 * l1 * l1 + l1 * l2 + l2 * l2) / 6, 1e-9);
}

TEST(Frame, OrthonormalAndAnchors) {
  const NilpotentSpec spec{parse_expr("1 + x1/3"), parse_expr("x2 - x1/2")};
  const AffineSurface s = type_b_surface({1, 0, 0.5, 0.3, 0.2, 0.7});
  const ExtensionMetric m = build_metric(s, spec.endo(), {parse_expr("x2"), 0.0, 0.0});
  const Point4 p{0.9, 0.3, 0.4, -0.2};
  const FrameSD f = frame_sd(m, p);
  const double eta[4] = {1, 1, -1, -1};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(f.frame_gram[a][b], a == b ? eta[a] : 0.0, 1e-10);
  const double al = 1 + p.x1 / 3;
  const double xi = p.x2 - p.x1 / 2;
  EXPECT_NEAR(f.w_minus[0][0].value(), 0.5 * al * al * std::pow(xi * xi + 1, 2), 1e-9);
  const AffineCurvature c = ricci_affine(s, p);
  EXPECT_NEAR(f.w_plus[0][1].value(), -2 * c.ricci_anti[0][1], 1e-9);
}

TEST(Frame, ScalarEndoIsHalfConformallyFlat) {
  const ExtensionMetric m = build_metric(generic_surface(), EndoField::scalar(parse_expr("1 + x1*x2")));
  const FrameSD f = frame_sd(m, {0.2, 0.5, 0.3, 0.1});
  double wp = 0.0, wm = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      wp = std::max(wp, std::abs(f.w_plus[a][b].value()));
      wm = std::max(wm, std::abs(f.w_minus[a][b].value()));
    }
  EXPECT_LT(std::min(wp, wm), 1e-10);
  EXPECT_GT(std::max(wp, wm), 1e-3);
}

TEST(StructuralZeros, CanonicalEndo) {
  const ExtensionMetric m =
      build_metric(generic_surface(), EndoField::canonical(), {parse_expr("x2"), parse_expr("x1"), 2.0});
  const auto rep = structural_zeros(m, {0.3, -0.2, 0.7, 0.4});
  for (const auto& v : rep.violations) ADD_FAILURE() << v.name << " = " << v.value;
  EXPECT_TRUE(rep.ok);
  EXPECT_NEAR(rep.r2323, -1.0, 1e-12);
  const auto flat = structural_zeros(build_metric(AffineSurface(), EndoField::canonical()), {0.1, 0.2, 0.3, 0.4});
  for (const auto& a : flat.allowed)
    if (a.name != "R_2323" && a.name != "g_^13" && a.name.rfind("R_", 0) == 0) EXPECT_NEAR(a.value, 0.0, 1e-12) << a.name;
  EXPECT_THROW(structural_zeros(build_metric(AffineSurface(), EndoField::mirrored()), {0, 0, 0, 0}), Error);
}

TEST(Curvature, BachIsConformallyCovariant) {
  // B(e^{2f} g) = e^{-2f} B(g) in dimension four.
  const ExtensionMetric m = build_metric(generic_surface(), EndoField::canonical(), {parse_expr("x2"), 0.0, 0.0});
  const ScalarField f2 = parse_expr("exp(0.6*x1 - 0.4*y2 + 0.3*x2*y1)");
  const MetricField h = conformal_rescale(m.field(), f2, 1.0);
  const Point4 p{0.3, -0.2, 0.4, 0.5};
  const CurvaturePack a = curvature_pack(m.field(), p);
  const CurvaturePack b = curvature_pack(h, p);
  const double s = f2.value(p);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR((*b.bach)(i, j).value() * s, (*a.bach)(i, j).value(), 1e-7);
  EXPECT_GT(a.bach->max_abs_value(), 1e-3);
}


TEST(Curvature, AgreesWithFiniteDifferenceOracle) {
  const ExtensionMetric m = build_metric(generic_surface(), NilpotentSpec{parse_expr("1 + x1/2"), parse_expr("x2/3")}.endo(),
                                         {parse_expr("x1*x2"), 0.0, parse_expr("x2")});
  const Point4 p{0.3, -0.2, 0.5, 0.4};
  const CurvaturePack pk = curvature_pack(m, p);
  oracle::Oracle o{m.field(), 0.02};
  const auto c = o.curvature(p);
  double rmax = 0.0, rerr = 0.0;
  for (std::size_t n = 0; n < 256; ++n) {
    rmax = std::max(rmax, std::abs(c.riemann[n]));
    rerr = std::max(rerr, std::abs(c.riemann[n] - pk.riemann.flat(n).value()));
  }
  EXPECT_LT(rerr, 1e-4 * rmax);
  const auto b = o.bach(p);
  double bmax = 0.0, berr = 0.0;
  for (std::size_t n = 0; n < 16; ++n) {
    bmax = std::max(bmax, std::abs(b[n]));
    berr = std::max(berr, std::abs(b[n] - pk.bach->flat(n).value()));
  }
  EXPECT_GT(bmax, 1e-3);
  EXPECT_LT(berr, 1e-3 * bmax) << "bach max " << bmax << " err " << berr;
}
