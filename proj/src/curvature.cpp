// SPDX-License-Identifier: Apache-2.0
#include "rext/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rext/error.hpp"

namespace rext {

const ConventionRecord& conventions() {
  static const ConventionRecord rec;
  return rec;
}

JetTensor levi_civita(const JetMatrix4& g, const JetMatrix4& g_inv) {
  const int order = g[0][0].order() - 1;
  if (order < 0) throw Error(ErrorCode::Order, "Christoffel symbols need metric jets of order >= 1");
  // dg[a][b][c] = d_a g_bc
  std::array<std::array<std::array<Jet, 4>, 4>, 4> dg;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = b; c < 4; ++c) {
        dg[a][b][c] = g[b][c].diff(a);
        dg[a][c][b] = dg[a][b][c];
      }
  JetTensor gamma(3, order);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      std::array<Jet, 4> first;  // Gamma_ij,l (lowered)
      for (int l = 0; l < 4; ++l) first[l] = 0.5 * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
      for (int k = 0; k < 4; ++k) {
        Jet s(order);
        for (int l = 0; l < 4; ++l) s += g_inv[k][l] * first[l];
        gamma(i, j, k) = s;
        gamma(j, i, k) = s;
      }
    }
  return gamma;
}

JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma) {
  const int order = std::min(t.order() - 1, gamma.order());
  if (order < 0) throw Error(ErrorCode::Order, "covariant derivative: jet order exhausted");
  const int r = t.rank();
  JetTensor out(r + 1, order);
  std::vector<std::array<Jet, 4>> d(t.size());
  for (std::size_t n = 0; n < t.size(); ++n)
    for (int v = 0; v < 4; ++v) d[n][v] = t.flat(n).diff(v).truncated(order);
  std::size_t stride[8];
  stride[r - 1] = 1;
  for (int k = r - 2; k >= 0; --k) stride[k] = stride[k + 1] * 4;
  for (std::size_t n = 0; n < t.size(); ++n) {
    const std::vector<int> idx = t.unflatten(n);
    for (int v = 0; v < 4; ++v) {
      Jet s = d[n][v];
      for (int slot = 0; slot < r; ++slot) {
        const std::size_t base = n - stride[slot] * idx[slot];
        for (int m = 0; m < 4; ++m) {
          const Jet& gm = gamma(v, idx[slot], m);
          const Jet& tm = t.flat(base + stride[slot] * m);
          s -= gm * tm;
        }
      }
      out.flat(n * 4 + v) = std::move(s);
    }
  }
  return out;
}

double max_trace(const JetTensor& t, const JetMatrix4& g_inv) {
  double worst = 0.0;
  for (int s1 = 0; s1 < 4; ++s1)
    for (int s2 = s1 + 1; s2 < 4; ++s2)
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
          double sum = 0.0;
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
              int idx[4];
              int free = 0;
              for (int k = 0; k < 4; ++k) {
                if (k == s1)
                  idx[k] = a;
                else if (k == s2)
                  idx[k] = b;
                else
                  idx[k] = free++ == 0 ? p : q;
              }
              sum += g_inv[a][b].value() * t(idx[0], idx[1], idx[2], idx[3]).value();
            }
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

CurvaturePack curvature_pack(const MetricField& metric, const Point4& p, const PackOptions& opt) {
  const int K = opt.order;
  if (K < 2 || K > kMaxJetOrder) throw Error(ErrorCode::Order, "curvature needs a metric jet order in [2, 6]");
  if (opt.bach && K < 4) throw Error(ErrorCode::Order, "the Bach tensor needs metric jets of order >= 4");
  if ((opt.weyl_derivatives || opt.riemann_derivative) && K < 3)
    throw Error(ErrorCode::Order, "first covariant derivatives of curvature need metric jets of order >= 3");

  CurvaturePack pk;
  pk.point = p;
  pk.order = K;
  pk.g = metric(p, K);
  pk.g_inv = inverse(pk.g);
  pk.gamma = levi_civita(pk.g, pk.g_inv);

  const int ro = K - 2;
  pk.riemann_up = JetTensor(4, ro);
  std::array<std::array<std::array<std::array<Jet, 4>, 4>, 4>, 4> dgam;  // dgam[i][j][k][l] = d_i Gamma_jk^l
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = j; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          dgam[i][j][k][l] = pk.gamma(j, k, l).diff(i);
          dgam[i][k][j][l] = dgam[i][j][k][l];
        }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      if (j < i) {
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) pk.riemann_up(i, j, k, l) = -pk.riemann_up(j, i, k, l);
        continue;
      }
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          Jet s = dgam[i][j][k][l] - dgam[j][i][k][l];
          for (int m = 0; m < 4; ++m)
            s += pk.gamma(j, k, m) * pk.gamma(i, m, l) - pk.gamma(i, k, m) * pk.gamma(j, m, l);
          pk.riemann_up(i, j, k, l) = s.truncated(ro);
        }
    }

  pk.riemann = JetTensor(4, ro);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          Jet s(ro);
          for (int m = 0; m < 4; ++m) s += pk.riemann_up(i, j, l, m) * pk.g[m][k];
          pk.riemann(i, j, k, l) = s;
        }

  pk.ricci = JetTensor(2, ro);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      Jet s(ro);
      for (int i = 0; i < 4; ++i) s += pk.riemann_up(i, j, k, i);
      pk.ricci(j, k) = s;
    }
  pk.tau = Jet(ro);
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) pk.tau += pk.g_inv[j][k] * pk.ricci(j, k);

  pk.weyl = JetTensor(4, ro);
  const Jet tau6 = pk.tau / 6.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          const auto& g = pk.g;
          const auto& r = pk.ricci;
          Jet w = pk.riemann(i, j, k, l) -
                  0.5 * (r(j, l) * g[i][k] - r(i, l) * g[j][k] + g[j][l] * r(i, k) - g[i][l] * r(j, k)) +
                  tau6 * (g[j][l] * g[i][k] - g[i][l] * g[j][k]);
          pk.weyl(i, j, k, l) = w.truncated(ro);
        }

  if (opt.riemann_derivative) pk.driemann = covariant_derivative(pk.riemann, pk.gamma);

  if (opt.weyl_derivatives || opt.bach) {
    pk.dweyl = covariant_derivative(pk.weyl, pk.gamma);
    const int dor = pk.dweyl->order();
    JetTensor div(3, dor);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          Jet s(dor);
          for (int l = 0; l < 4; ++l)
            for (int n = 0; n < 4; ++n) s += pk.g_inv[l][n] * (*pk.dweyl)(i, j, k, l, n);
          div(i, j, k) = s;
        }
    pk.div_weyl = std::move(div);
  }

  if (opt.bach) {
    const JetTensor ddw = covariant_derivative(*pk.dweyl, pk.gamma);
    const int bo = ddw.order();
    // raised Ricci rho^{kl}
    std::array<std::array<Jet, 4>, 4> rho_up;
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l) {
        Jet s(bo);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) s += pk.g_inv[k][a] * pk.g_inv[l][b] * pk.ricci(a, b);
        rho_up[k][l] = s;
      }
    JetTensor bach(2, bo);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        Jet s(bo);
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            Jet inner(bo);
            for (int a = 0; a < 4; ++a)
              for (int b = 0; b < 4; ++b) inner += pk.g_inv[k][a] * pk.g_inv[l][b] * ddw(k, i, l, j, b, a);
            s += inner + 0.5 * rho_up[k][l] * pk.weyl(k, i, l, j);
          }
        bach(i, j) = s;
      }
    pk.bach = std::move(bach);
  }
  return pk;
}

ThetaTensor theta_extract(const ExtensionMetric& m, const Point4& base) {
  const EndoJets t = m.endo().jets(base, 2);
  for (const auto& row : t)
    for (const Jet& e : row)
      if (e.shifted().max_abs() != 0.0)
        throw Error(ErrorCode::InvalidArgument, "theta_extract requires a constant endomorphism");
  const Point4 p{base.x1, base.x2, 0.0, 0.0};
  PackOptions opt;
  opt.order = 6;
  opt.weyl_derivatives = false;
  opt.bach = true;
  const CurvaturePack pk = curvature_pack(m.field(), p, opt);
  ThetaTensor th{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          MultiIndex mu{0, 0, 0, 0};
          mu[2 + i] += 1;
          mu[2 + j] += 1;
          const double c = (*pk.bach)(k, l).coeff(mu);
          th[i][j][k][l] = i == j ? c : 0.5 * c;
        }
  return th;
}

ThetaTensor theta_extract(const Matrix2& t) {
  return theta_extract(ExtensionMetric(AffineSurface(), EndoField::constant(t)), {0.0, 0.0, 0.0, 0.0});
}

namespace {

constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

}  // namespace

FrameSD frame_sd(const CurvaturePack& pk) {
  FrameSD f;
  const int o = pk.weyl.order();
  const auto g = [&](int i, int j) { return pk.g[i][j].truncated(o); };
  const Jet one(o, 1.0);
  const Jet zero(o);
  f.e[0] = {one, zero, 0.5 * (one - g(0, 0)), zero};
  f.e[1] = {zero, one, -g(0, 1), 0.5 * (one - g(1, 1))};
  f.e[2] = {one, zero, -0.5 * (one + g(0, 0)), zero};
  f.e[3] = {zero, one, -g(0, 1), -0.5 * (one + g(1, 1))};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) s += pk.g[i][j].value() * f.e[a][i].value() * f.e[b][j].value();
      f.frame_gram[a][b] = s;
    }
  // Weyl tensor in the frame, one slot at a time.
  JetTensor cur = pk.weyl;
  for (int slot = 0; slot < 4; ++slot) {
    JetTensor next(4, o);
    for (std::size_t n = 0; n < next.size(); ++n) {
      std::vector<int> idx = next.unflatten(n);
      const int a = idx[slot];
      Jet s(o);
      for (int i = 0; i < 4; ++i) {
        idx[slot] = i;
        s += f.e[a][i] * cur.flat(cur.flatten(idx));
      }
      next.flat(n) = s;
    }
    cur = std::move(next);
  }
  const double r = 1.0 / std::sqrt(2.0);
  f.e_plus = {{{r, 0, 0, 0, 0, r}, {0, r, 0, 0, r, 0}, {0, 0, r, -r, 0, 0}}};
  f.e_minus = {{{r, 0, 0, 0, 0, -r}, {0, r, 0, 0, -r, 0}, {0, 0, r, r, 0, 0}}};
  // The 2-form e^a ^ e^b pairs with the bivector eta_a eta_b e_a ^ e_b, and
  // W(x ^ y, z ^ w) = W(x, y, w, z).
  const double eta[4] = {1, 1, -1, -1};
  auto pair_w = [&](const std::array<double, 6>& u, const std::array<double, 6>& v) {
    Jet s(o);
    for (int P = 0; P < 6; ++P) {
      if (u[P] == 0.0) continue;
      for (int Q = 0; Q < 6; ++Q) {
        if (v[Q] == 0.0) continue;
        const int a = kPairs[P][0], b = kPairs[P][1], c = kPairs[Q][0], d = kPairs[Q][1];
        s += (u[P] * v[Q] * eta[a] * eta[b] * eta[c] * eta[d]) * cur(a, b, d, c);
      }
    }
    return s;
  };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      f.w_plus[a][b] = pair_w(f.e_plus[a], f.e_plus[b]);
      f.w_minus[a][b] = pair_w(f.e_minus[a], f.e_minus[b]);
    }
  return f;
}

FrameSD frame_sd(const ExtensionMetric& m, const Point4& p, int order) {
  PackOptions opt;
  opt.order = order + 2;
  opt.weyl_derivatives = false;
  opt.bach = false;
  return frame_sd(curvature_pack(m.field(), p, opt));
}

std::string component_name(const std::string& prefix, const std::vector<int>& idx, int upper_from) {
  std::string s = prefix + "_";
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (static_cast<int>(k) == upper_from) s += "^";
    s += std::to_string(idx[k] + 1);
  }
  return s;
}

StructuralZerosReport structural_zeros(const ExtensionMetric& m, const Point4& p, double tol) {
  const EndoJets t = m.endo().jets(p, 1);
  const double canon[2][2] = {{0, 1}, {0, 0}};
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < 2; ++i)
      if (std::abs(t[r][i].value() - canon[r][i]) > 1e-14 || t[r][i].shifted().max_abs() > 1e-14)
        throw Error(ErrorCode::InvalidArgument, "structural_zeros requires T = d_{x^1} (x) dx^2");

  PackOptions opt;
  opt.order = 2;
  opt.weyl_derivatives = false;
  opt.bach = false;
  const CurvaturePack pk = curvature_pack(m.field(), p, opt);
  StructuralZerosReport rep;

  auto check = [&](const std::string& name, double v, bool allowed) {
    if (allowed) {
      rep.allowed.push_back({name, v});
      return;
    }
    rep.max_violation = std::max(rep.max_violation, std::abs(v));
    if (std::abs(v) > tol) {
      rep.ok = false;
      rep.violations.push_back({name, v});
    }
  };

  // 1-based allowed entries.
  const std::set<std::pair<int, int>> g_allowed{{1, 3}, {2, 4}, {3, 3}, {3, 4}, {4, 4}};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      check(component_name("g", {i, j}, 0), pk.g_inv[i][j].value(), g_allowed.count({i + 1, j + 1}) > 0);

  const std::set<std::array<int, 3>> gamma_allowed{
      {1, 1, 1}, {1, 1, 2}, {1, 1, 3}, {1, 1, 4}, {1, 2, 1}, {1, 2, 2}, {1, 2, 3}, {1, 2, 4}, {1, 3, 3}, {1, 3, 4},
      {1, 4, 3}, {1, 4, 4}, {2, 2, 1}, {2, 2, 2}, {2, 2, 3}, {2, 2, 4}, {2, 3, 3}, {2, 3, 4}, {2, 4, 3}, {2, 4, 4}};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        check(component_name("Gamma", {i, j, k}, 2), pk.gamma(i, j, k).value(),
              gamma_allowed.count({i + 1, j + 1, k + 1}) > 0);

  // Orbit of the listed curvature components under the Z2 symmetries.
  std::set<std::array<int, 4>> r_allowed;
  for (const auto& c : std::vector<std::array<int, 4>>{
           {1, 2, 1, 2}, {1, 2, 1, 3}, {1, 2, 1, 4}, {1, 2, 2, 3}, {1, 2, 2, 4}, {2, 3, 2, 3}}) {
    const std::array<int, 4> pair_swap{c[2], c[3], c[0], c[1]};
    for (const auto& d : {c, pair_swap}) {
      r_allowed.insert(d);
      r_allowed.insert({d[1], d[0], d[2], d[3]});
      r_allowed.insert({d[0], d[1], d[3], d[2]});
      r_allowed.insert({d[1], d[0], d[3], d[2]});
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = k + 1; l < 4; ++l) {
          if (k * 4 + l < i * 4 + j) continue;
          check(component_name("R", {i, j, k, l}), pk.riemann(i, j, k, l).value(),
                r_allowed.count({i + 1, j + 1, k + 1, l + 1}) > 0);
        }
  rep.r2323 = pk.riemann(1, 2, 1, 2).value();
  return rep;
}

}  // namespace rext
