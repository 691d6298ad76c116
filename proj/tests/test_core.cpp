#include <gtest/gtest.h>

#include <cmath>

#include "rext/error.hpp"
#include "rext/expr.hpp"
#include "rext/field.hpp"
#include "rext/jet.hpp"
#include "rext/surface.hpp"

using namespace rext;

namespace {

// Central difference with one Richardson step; error O(h^4).
template <class F>
double richardson(F f, double x, double h) {
  const auto d = [&](double s) { return (f(x + s) - f(x - s)) / (2 * s); };
  return (4 * d(h / 2) - d(h)) / 3;
}

}  // namespace

TEST(Jet, LayoutIsGradedAndInvertible) {
  EXPECT_EQ(jet_size(0), 1u);
  EXPECT_EQ(jet_size(4), 70u);
  EXPECT_EQ(jet_size(6), 210u);
  for (std::size_t i = 0; i < jet_size(6); ++i) EXPECT_EQ(jet_index(jet_multi_index(i)), i);
  int last = 0;
  for (std::size_t i = 0; i < jet_size(6); ++i) {
    const auto& mu = jet_multi_index(i);
    const int deg = mu[0] + mu[1] + mu[2] + mu[3];
    EXPECT_GE(deg, last);
    last = deg;
  }
}

TEST(Jet, ExpSinLogMatchClosedFormDerivatives) {
  const double a = 0.3;
  const Jet x = Jet::variable(6, 0, a);
  const Jet e = exp(sin(x));
  // d/dx exp(sin x) = cos x exp(sin x)
  EXPECT_NEAR(e.derivative({1, 0, 0, 0}), std::cos(a) * std::exp(std::sin(a)), 1e-14);
  const Jet l = log(1.0 + x * x);
  EXPECT_NEAR(l.derivative({2, 0, 0, 0}), 2 * (1 - a * a) / std::pow(1 + a * a, 2), 1e-13);
  EXPECT_THROW(log(Jet::variable(3, 0, -1.0)), Error);
}

TEST(Jet, ProductRuleMixedVariables) {
  const Jet x = Jet::variable(4, 0, 0.7);
  const Jet y = Jet::variable(4, 2, -0.4);
  const Jet f = exp(x * y) * cos(y);
  const auto g = [](double xx, double yy) { return std::exp(xx * yy) * std::cos(yy); };
  const double dxdy = richardson(
      [&](double yy) { return richardson([&](double xx) { return g(xx, yy); }, 0.7, 1e-3); }, -0.4, 1e-3);
  EXPECT_NEAR(f.derivative({1, 0, 1, 0}), dxdy, 1e-7);
}

TEST(Jet, DiffLowersOrderAndIsExact) {
  const Jet x = Jet::variable(5, 1, 2.0);
  const Jet f = ipow(x, 5);
  const Jet df = f.diff(1);
  EXPECT_EQ(df.order(), 4);
  EXPECT_NEAR(df.value(), 5 * 16.0, 1e-12);
  EXPECT_NEAR(df.derivative({0, 3, 0, 0}), 5 * 4 * 3 * 2 * 2.0, 1e-10);
}

TEST(Jet, MatrixInverse) {
  JetMatrix4 m = identity_matrix(3);
  const Jet x = Jet::variable(3, 0, 0.5);
  m[0][2] = x;
  m[2][0] = 1.0 + x * x;
  m[1][3] = exp(x);
  m[3][1] = Jet(3, 1.0);
  m[3][3] = Jet(3, 0.0);
  const JetMatrix4 p = multiply(m, inverse(m));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_LT((p[i][j] - (i == j ? 1.0 : 0.0)).max_abs(), 1e-12);
  JetMatrix4 z = identity_matrix(2);
  z[1][1] = Jet(2, 0.0);
  EXPECT_THROW(inverse(z), Error);
}

TEST(Expr, ParseCountsNodesAndRoundTrips) {
  const Expr e = parse_expr("2*exp(x1)+y1^2");
  EXPECT_EQ(e.node_count(), 7);
  EXPECT_NEAR(e.eval({0.0, 0.0, 3.0, 0.0}), 11.0, 1e-15);
  const Expr r = parse_expr(e.to_string());
  EXPECT_EQ(r.node_count(), 7);
  EXPECT_NEAR(r.eval({0.4, 0.0, 1.5, 0.0}), e.eval({0.4, 0.0, 1.5, 0.0}), 1e-15);
}

TEST(Expr, ErrorsCarryPositions) {
  try {
    parse_expr("x1 + foo(2)");
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::UnknownIdentifier);
  }
  EXPECT_THROW(parse_expr("x1 + * 2"), ParseError);
  EXPECT_THROW(parse_expr("(x1"), ParseError);
  const ConstantTable c{{"a", 2.5}};
  EXPECT_NEAR(parse_expr("a*x2", c).eval({0, 2, 0, 0}), 5.0, 1e-15);
}

TEST(Expr, JetAgreesWithFiniteDifferences) {
  const Expr e = parse_expr("x1^3*sin(x2) + sqrt(1 + y1^2)/exp(y2)");
  const Point4 p{0.3, -0.2, 0.5, 0.1};
  const Jet j = e.eval_jet(p, 2);
  const double fd = richardson([&](double t) { return e.eval({p.x1, t, p.y1, p.y2}); }, p.x2, 1e-3);
  EXPECT_NEAR(j.derivative({0, 1, 0, 0}), fd, 1e-9);
  const double fd2 = richardson([&](double t) { return e.eval({p.x1, p.x2, t, p.y2}); }, p.y1, 1e-3);
  EXPECT_NEAR(j.derivative({0, 0, 1, 0}), fd2, 1e-9);
}

TEST(Field, TaylorPolynomialReexpands) {
  const Point4 c{1.0, 0.0, 0.0, 0.0};
  const Jet coeffs = ipow(Jet::variable(4, 0, 1.0), 3);  // x1^3 about x1 = 1
  const ScalarField f = ScalarField::taylor_polynomial(c, coeffs, "cube");
  EXPECT_NEAR(f.value({2.0, 5.0, 0.0, 0.0}), 8.0, 1e-13);
  EXPECT_NEAR(f.jet({2.0, 0.0, 0.0, 0.0}, 2).derivative({2, 0, 0, 0}), 12.0, 1e-12);
}

TEST(Surface, AffineRicciOfTypeAExample) {
  // Gamma_12^1 = Gamma_12^2 = 1, others zero.
  const AffineSurface s = type_a_surface({0, 0, 1, 1, 0, 0});
  const AffineCurvature c = ricci_affine(s, {0.1, 0.2, 0, 0});
  EXPECT_NEAR(c.ricci[0][0], -1.0, 1e-14);
  EXPECT_NEAR(c.ricci[0][1], 1.0, 1e-14);
  EXPECT_NEAR(c.ricci[1][0], 1.0, 1e-14);
  EXPECT_NEAR(c.ricci[1][1], -1.0, 1e-14);
}

TEST(Surface, TypeBDomainAndFlatness) {
  const AffineSurface b = type_b_surface({1, 0, 0, 0, 0, 0});
  EXPECT_THROW(christoffel_at(b, {-1.0, 0, 0, 0}, 2), Error);
  const Point4 pts[] = {{0.5, 0.0, 0, 0}, {2.0, 1.0, 0, 0}};
  EXPECT_TRUE(is_flat(b, pts).flat);
  const AffineSurface a = type_a_surface({0, 0, 1, 1, 0, 0});
  EXPECT_FALSE(is_flat(a, pts).flat);
  EXPECT_TRUE(is_flat(AffineSurface(), pts).flat);
}

TEST(Surface, SwapExchangesCoordinates) {
  const AffineSurface s = explicit_surface({parse_expr("x1"), Expr(0.0), parse_expr("x2^2"), Expr(1.0), Expr(0.0),
                                            parse_expr("exp(x1)")});
  const AffineSurface t = s.swapped();
  const Point4 p{0.3, 0.7, 0, 0};
  const Point4 q{0.7, 0.3, 0, 0};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) EXPECT_NEAR(t.symbol(i, j, k).value(p), s.symbol(1 - i, 1 - j, 1 - k).value(q), 1e-15);
  const AffineCurvature a = ricci_affine(s, q);
  const AffineCurvature b = ricci_affine(t, p);
  EXPECT_NEAR(b.ricci[0][1], a.ricci[1][0], 1e-13);
  EXPECT_NEAR(b.ricci[0][0], a.ricci[1][1], 1e-13);
}
