// SPDX-License-Identifier: Apache-2.0
#include "rext/bachflat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rext/error.hpp"

namespace rext {

std::array<double, 2> thm11_check(const AffineSurface& s, const Point4& p) {
  const auto r = canonical_bach_relations(s, p);
  return {std::abs(r[0]), std::abs(r[1])};
}

BaseDerivatives BaseDerivatives::from_jet(const Jet& j) {
  BaseDerivatives d;
  d.order = std::min(j.order(), 2);
  d.v = j.value();
  if (d.order >= 1) {
    d.d10 = j.derivative({1, 0, 0, 0});
    d.d01 = j.derivative({0, 1, 0, 0});
  }
  if (d.order >= 2) {
    d.d20 = j.derivative({2, 0, 0, 0});
    d.d11 = j.derivative({1, 1, 0, 0});
    d.d02 = j.derivative({0, 2, 0, 0});
  }
  return d;
}

PDEOperands pde_operands(const AffineSurface& s, const NilpotentSpec& spec, const Point4& p) {
  PDEOperands ops;
  ops.xi = BaseDerivatives::from_jet(spec.xi.eval_jet(p, 2));
  ops.alpha = BaseDerivatives::from_jet(spec.alpha.eval_jet(p, 2));
  const ChristoffelJets g = christoffel_at(s, p, 1);
  const int idx[6][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}};
  for (int n = 0; n < 6; ++n) ops.gamma[n] = BaseDerivatives::from_jet(g[idx[n][0]][idx[n][1]][idx[n][2]]);
  return ops;
}

double p1_eval(const PDEOperands& o) {
  if (o.xi.order < 1) throw Error(ErrorCode::Order, "P1 needs first derivatives of xi");
  const double x = o.xi.v;
  const double g111 = o.gamma[0].v, g112 = o.gamma[1].v, g121 = o.gamma[2].v, g122 = o.gamma[3].v,
               g221 = o.gamma[4].v, g222 = o.gamma[5].v;
  return -o.xi.d10 + x * o.xi.d01 + g221 * x * x * x - (2 * g121 - g222) * x * x + (g111 - 2 * g122) * x + g112;
}

double p2_eval(const PDEOperands& o, P2Form form) {
  if (o.xi.order < 1 || o.alpha.order < 2)
    throw Error(ErrorCode::Order, "P2 needs first derivatives of xi and second derivatives of alpha");
  for (const auto& g : o.gamma)
    if (g.order < 1) throw Error(ErrorCode::Order, "P2 needs first derivatives of the Christoffel symbols");
  const double x = o.xi.v, x01 = o.xi.d01;
  const double a = o.alpha.v, a10 = o.alpha.d10, a01 = o.alpha.d01, a20 = o.alpha.d20, a11 = o.alpha.d11,
               a02 = o.alpha.d02;
  const auto& G111 = o.gamma[0];
  const auto& G112 = o.gamma[1];
  const auto& G121 = o.gamma[2];
  const auto& G122 = o.gamma[3];
  const auto& G221 = o.gamma[4];
  const auto& G222 = o.gamma[5];
  const double g111 = G111.v, g112 = G112.v, g121 = G121.v, g122 = G122.v, g221 = G221.v, g222 = G222.v;
  const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, aa = a * a;

  double p = 0.0;
  p += a * a20 + x2 * a * a02 - 2 * x * a * a11 + a10 * a10 + x2 * a01 * a01 - 2 * x * a10 * a01;
  const double lead = form == P2Form::Corrected ? 2 * x01 : 2 * x * a01;
  p += -a * a10 * (lead - 5 * g221 * x2 + 2 * (4 * g121 - g222) * x - 3 * g111 + 2 * g122);
  p += a * a01 * (2 * x * x01 - 6 * g221 * x3 + (10 * g121 - 3 * g222) * x2 - 4 * (g111 - g122) * x - g112);
  p += 6 * x4 * aa * g221 * g221;
  p += -2 * x3 * aa * (G221.d01 + 9 * g121 * g221 - 3 * g221 * g222);
  p += -x2 * aa *
       (4 * g221 * x01 - 3 * G121.d01 - 2 * G221.d10 + G222.d01 - 12 * g121 * g121 - g222 * g222 - 7 * g111 * g221 +
        7 * g121 * g222 + 9 * g122 * g221);
  p += x * aa *
       (2 * (3 * g121 - g222) * x01 - G111.d01 - 3 * G121.d10 + G122.d01 + G222.d10 -
        2 * (g111 - g122) * (4 * g121 - g222) + 4 * g112 * g221);
  p += -aa * (2 * (g111 - g122) * x01 - G111.d10 + G122.d10 - g111 * g111 + g111 * g122 + 3 * g112 * g121 -
              g112 * g222);
  return p;
}

QIdentityReport q_identities(const AffineSurface& s, const NilpotentSpec& spec, const Point4& p,
                             const DeformationField& phi) {
  const PDEOperands ops = pde_operands(s, spec, p);
  if (std::abs(ops.alpha.v) < 1e-12) throw Error(ErrorCode::InvalidArgument, "q identities need alpha(p) != 0");
  const ExtensionMetric m(s, spec.endo(), phi);
  PackOptions o;
  o.order = 4;
  const CurvaturePack pk = curvature_pack(m, p, o);
  const JetTensor& b = *pk.bach;
  QIdentityReport r;
  r.b11 = b(0, 0).value();
  r.b12 = b(0, 1).value();
  r.b22 = b(1, 1).value();
  r.alpha = ops.alpha.v;
  r.xi = ops.xi.v;
  r.p1 = p1_eval(ops);
  r.p2 = p2_eval(ops);
  const double q1 = r.b11 - r.b12 * r.xi;
  const double q2 = r.b11 - r.b22 * r.xi * r.xi;
  r.q3 = 2 * q1 - q2;
  r.q3_residual = std::abs(r.q3 + 4 * r.alpha * r.alpha * r.p1 * r.p1);
  r.b11_residual = std::abs(r.b11 + 4 * r.xi * r.xi * r.p2);
  r.b12_residual = std::abs(r.b12 + 4 * r.xi * r.p2);
  r.b22_residual = std::abs(r.b22 + 4 * r.p2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double v = std::abs(b(i, j).value());
      if ((i < 2) != (j < 2)) r.mixed_block = std::max(r.mixed_block, v);
      if (i >= 2 && j >= 2) r.fiber_block = std::max(r.fiber_block, v);
    }
  return r;
}

ScalarField fiber_linear(double a, double b, const ScalarField& psi) {
  if (a == 0.0 && b == 0.0) return psi;
  return ScalarField(
      [a, b, psi](const Point4& p, int order) {
        Jet r = psi.jet(p, order);
        if (a != 0.0) r += a * Jet::variable(order, 2, p.y1);
        if (b != 0.0) r += b * Jet::variable(order, 3, p.y2);
        return r;
      },
      psi.description() + " + fiber-linear");
}

ScalarField product(const ScalarField& f, const ScalarField& g) {
  return ScalarField([f, g](const Point4& p, int order) { return f.jet(p, order) * g.jet(p, order); },
                     "(" + f.description() + ")*(" + g.description() + ")", false, f.base_only() && g.base_only());
}

ScalarField ode_profile(double a, double p0, double p1, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "ode_profile needs a positive step");
  auto state = [a, p0, p1, h](double x) {
    std::array<double, 2> u{p0, p1};
    const auto rhs = [a](const std::array<double, 2>& v) { return std::array<double, 2>{v[1], -0.5 * a * v[0]}; };
    const int n = static_cast<int>(std::ceil(std::abs(x) / h));
    if (n == 0) return u;
    const double dt = x / n;
    for (int k = 0; k < n; ++k) {
      const auto k1 = rhs(u);
      const auto k2 = rhs({u[0] + 0.5 * dt * k1[0], u[1] + 0.5 * dt * k1[1]});
      const auto k3 = rhs({u[0] + 0.5 * dt * k2[0], u[1] + 0.5 * dt * k2[1]});
      const auto k4 = rhs({u[0] + dt * k3[0], u[1] + dt * k3[1]});
      for (int i = 0; i < 2; ++i) u[i] += dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return u;
  };
  return ScalarField(
      [a, state](const Point4& p, int order) {
        const auto u = state(p.x2);
        std::vector<double> d(order + 1);
        for (int n = 0; n <= order; ++n) d[n] = n < 2 ? u[n] : -0.5 * a * d[n - 2];
        return compose(Jet::variable(order, 1, p.x2), d);
      },
      "ode(2P''+" + std::to_string(a) + "P=0)", false, true);
}

Matrix4 brinkmann_e(const CurvaturePack& pk, const ScalarField& phi, const Point4& p) {
  const Jet f = phi.jet(p, 2);
  double d1[4], hes[4][4];
  for (int i = 0; i < 4; ++i) {
    MultiIndex mu{0, 0, 0, 0};
    mu[i] = 1;
    d1[i] = f.derivative(mu);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      MultiIndex mu{0, 0, 0, 0};
      mu[i] += 1;
      mu[j] += 1;
      double h = f.derivative(mu);
      for (int k = 0; k < 4; ++k) h -= pk.gamma(i, j, k).value() * d1[k];
      hes[i][j] = h;
    }
  double lap = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) lap += pk.g_inv[i][j].value() * hes[i][j];
  const double v = f.value();
  const double tau = pk.tau.value();
  Matrix4 e{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      e[i][j] = 2 * hes[i][j] + v * pk.ricci(i, j).value() - 0.25 * (2 * lap + v * tau) * pk.g[i][j].value();
  return e;
}

namespace {

PackOptions second_order_pack() {
  PackOptions o;
  o.order = 2;
  o.bach = false;
  o.weyl_derivatives = false;
  return o;
}

}  // namespace

Matrix4 brinkmann_e(const MetricField& g, const ScalarField& phi, const Point4& p) {
  return brinkmann_e(curvature_pack(g, p, second_order_pack()), phi, p);
}

std::array<std::array<std::array<double, 4>, 4>, 4> e_tilde(const MetricField& g, const ScalarField& phi,
                                                             const Point4& p) {
  const Jet f = phi.jet(p, 1);
  if (!(f.value() > 0.0)) throw Error(ErrorCode::Domain, "the conformal factor must be positive");
  PackOptions o;
  o.order = 3;
  o.bach = false;
  o.weyl_derivatives = true;
  const CurvaturePack pk = curvature_pack(g, p, o);
  double grad[4] = {0, 0, 0, 0};  // g^{lm} d_m log(phi)
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m) {
      MultiIndex mu{0, 0, 0, 0};
      mu[m] = 1;
      grad[l] += pk.g_inv[l][m].value() * f.derivative(mu) / f.value();
    }
  std::array<std::array<std::array<double, 4>, 4>, 4> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        double s = (*pk.div_weyl)(i, j, k).value();
        for (int l = 0; l < 4; ++l) s -= pk.weyl(i, j, k, l).value() * grad[l];
        out[i][j][k] = s;
      }
  return out;
}

double einstein_residual(const MetricField& g, const ScalarField& phi, const Point4& p) {
  if (!(phi.value(p) > 0.0)) throw Error(ErrorCode::Domain, "the conformal factor must be positive");
  const MetricField bar = conformal_rescale(g, phi, -2.0);
  PackOptions o;
  o.order = 2;
  o.bach = false;
  o.weyl_derivatives = false;
  const CurvaturePack pk = curvature_pack(bar, p, o);
  const double t4 = pk.tau.value() / 4.0;
  double r = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r = std::max(r, std::abs(pk.ricci(i, j).value() - t4 * pk.g[i][j].value()));
  return r;
}

BachScan bach_scan(const ExtensionMetric& m, std::span<const Point4> points, int order) {
  BachScan s;
  PackOptions o;
  o.order = order;
  for (const Point4& p : points) {
    const CurvaturePack pk = curvature_pack(m, p, o);
    const double v = pk.bach->max_abs_value();
    if (v >= s.max_abs) {
      s.max_abs = v;
      s.worst = p;
    }
  }
  return s;
}

CandidateSweep candidate_sweep(const MetricField& g, std::span<const ConformalCandidate> family,
                               std::span<const Point4> points, double tol) {
  std::vector<CurvaturePack> packs;
  packs.reserve(points.size());
  for (const Point4& p : points) packs.push_back(curvature_pack(g, p, second_order_pack()));
  CandidateSweep out;
  out.tol = tol;
  out.best_residual = std::numeric_limits<double>::infinity();
  for (const ConformalCandidate& c : family) {
    double worst = 0.0;
    bool usable = true;
    for (std::size_t n = 0; n < points.size() && usable; ++n) {
      const double v = c.phi.value(points[n]);
      if (!std::isfinite(v) || std::abs(v) < 1e-12) {
        usable = false;
        break;
      }
      const Matrix4 e = brinkmann_e(packs[n], c.phi, points[n]);
      double m = 0.0;
      for (const auto& row : e)
        for (double x : row) m = std::max(m, std::abs(x));
      worst = std::max(worst, m / std::abs(v));
    }
    if (!usable || !std::isfinite(worst)) continue;
    ++out.candidates;
    if (worst < out.best_residual) {
      out.best_residual = worst;
      out.best_label = c.label;
    }
  }
  out.none_below = !(out.best_residual < tol);
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void add_fiber_variants(std::vector<ConformalCandidate>& out, const ScalarField& psi, const std::string& label) {
  for (double a : {0.0, 0.5})
    for (double b : {0.0, 0.5}) {
      std::string l = label;
      if (a != 0.0 || b != 0.0) l += " + " + fmt(a) + " y1 + " + fmt(b) + " y2";
      out.push_back({fiber_linear(a, b, psi), l});
    }
}

}  // namespace

std::vector<ConformalCandidate> power_ansatz_family(double exponent, std::span<const std::array<double, 3>> ode) {
  std::vector<std::pair<ScalarField, std::string>> profiles;
  for (int ia = -4; ia <= 4; ++ia)
    for (double b : {-0.5, 0.0, 0.5}) {
      const double a = 0.5 * ia;
      profiles.emplace_back(ScalarField(exp(Expr(a) * Expr::x2() + Expr(b) * ipow(Expr::x2(), 2))),
                            "exp(" + fmt(a) + " x2 + " + fmt(b) + " x2^2)");
    }
  for (double w : {0.5, 1.0, 2.0})
    for (double s : {0.0, 1.0})
      profiles.emplace_back(ScalarField(Expr(2.0) + cos(Expr(w) * Expr::x2() + Expr(s))),
                            "(2 + cos(" + fmt(w) + " x2 + " + fmt(s) + "))");
  static const std::array<std::array<double, 3>, 4> default_ode{
      {{-0.5, 1.0, 0.0}, {-0.5, 1.0, 0.5}, {0.5, 1.0, 0.0}, {0.5, 1.0, -0.5}}};
  auto add_ode = [&](const std::array<double, 3>& d) {
    profiles.emplace_back(ode_profile(d[0], d[1], d[2]),
                          "P[2P''+" + fmt(d[0]) + "P=0, P(0)=" + fmt(d[1]) + ", P'(0)=" + fmt(d[2]) + "]");
  };
  for (const auto& d : default_ode) add_ode(d);
  for (const auto& d : ode) add_ode(d);
  std::vector<ConformalCandidate> out;
  for (double shift : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double e = exponent + shift;
    const ScalarField power(pow(Expr::x1(), Expr(e)));
    for (const auto& [pf, label] : profiles)
      add_fiber_variants(out, product(power, pf), "x1^" + fmt(e) + " " + label);
  }
  return out;
}

std::vector<ConformalCandidate> exp_ansatz_family(double rate) {
  std::vector<ConformalCandidate> out;
  for (double r : {rate, -rate, 2 * rate, 0.0})
    for (double e : {-1.0, 0.0, 0.5, 1.0, 1.5, 2.0})
      for (double k : {-1.0, 0.0, 1.0}) {
        const Expr psi = exp(Expr(r) * Expr::x2() / Expr::x1() + Expr(k) * Expr::x1()) * pow(Expr::x1(), Expr(e));
        add_fiber_variants(out, ScalarField(psi),
                           "exp(" + fmt(r) + " x2/x1 + " + fmt(k) + " x1) x1^" + fmt(e));
      }
  return out;
}

}  // namespace rext
