// SPDX-License-Identifier: Apache-2.0
#include "rext/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "rext/error.hpp"

namespace rext {

namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 values_of(const JetMatrix4& m) {
  Mat4 v{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v[i][j] = m[i][j].value();
  return v;
}

std::vector<double> values_of(const JetTensor& t) {
  std::vector<double> v(t.size());
  for (std::size_t n = 0; n < t.size(); ++n) v[n] = t.flat(n).value();
  return v;
}

std::size_t stride(int rank, int slot) {
  std::size_t s = 1;
  for (int k = slot + 1; k < rank; ++k) s *= 4;
  return s;
}

// Raises one slot of a dense rank-r array with g^{ab}.
std::vector<double> raise(const std::vector<double>& t, int rank, int slot, const Mat4& gi) {
  const std::size_t st = stride(rank, slot);
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t n = 0; n < t.size(); ++n) {
    const int a = static_cast<int>((n / st) % 4);
    const std::size_t base = n - static_cast<std::size_t>(a) * st;
    double s = 0.0;
    for (int b = 0; b < 4; ++b) s += gi[a][b] * t[base + static_cast<std::size_t>(b) * st];
    out[n] = s;
  }
  return out;
}

double full_norm(const std::vector<double>& t, int rank, const Mat4& gi) {
  std::vector<double> up = t;
  for (int s = 0; s < rank; ++s) up = raise(up, rank, s, gi);
  double sum = 0.0;
  for (std::size_t n = 0; n < t.size(); ++n) sum += up[n] * t[n];
  return sum;
}

bool is_nilpotent_kind(JordanKind k) { return k == JordanKind::Zero || k == JordanKind::NilpotentNonzero; }

}  // namespace

QuadraticInvariants quadratic_invariants(const CurvaturePack& pack) {
  const Mat4 gi = values_of(pack.g_inv);
  QuadraticInvariants q;
  q.tau = pack.tau.value();
  q.norm_rho2 = full_norm(values_of(pack.ricci), 2, gi);
  q.norm_r2 = full_norm(values_of(pack.riemann), 4, gi);
  return q;
}

QuadraticInvariants eigen_invariants(std::complex<double> l1, std::complex<double> l2) {
  const auto a = l1, b = l2;
  QuadraticInvariants q;
  q.tau = (2.0 * (a * a + a * b + b * b)).real();
  q.norm_r2 = (4.0 * (a * a * a * a + a * a * b * b + b * b * b * b)).real();
  q.norm_rho2 = (2.0 * a * a * a * a + 2.0 * a * a * a * b + a * a * b * b + 2.0 * a * b * b * b + 2.0 * b * b * b * b).real();
  return q;
}

DerivativeInvariants derivative_level_invariants(const CurvaturePack& pack) {
  if (!pack.driemann || !pack.dweyl)
    throw Error(ErrorCode::Order, "derivative-level invariants need first covariant derivatives of R and W");
  const Mat4 gi = values_of(pack.g_inv);
  DerivativeInvariants d;
  d.norm_dr2 = full_norm(values_of(*pack.driemann), 5, gi);
  d.norm_dw2 = full_norm(values_of(*pack.dweyl), 5, gi);
  // M[(ij)][(kl)] = R_ij^kl
  std::vector<double> r = values_of(pack.riemann);
  r = raise(raise(r, 4, 2, gi), 4, 3, gi);
  double c = 0.0;
  for (int p = 0; p < 16; ++p)
    for (int q = 0; q < 16; ++q) {
      const double pq = r[p * 16 + q];
      if (pq == 0.0) continue;
      for (int s = 0; s < 16; ++s) c += pq * r[q * 16 + s] * r[s * 16 + p];
    }
  d.cubic = c;
  return d;
}

DerivativeInvariants derivative_level_invariants(const MetricField& g, const Point4& p, int order) {
  PackOptions o;
  o.order = order;
  o.bach = false;
  o.weyl_derivatives = true;
  o.riemann_derivative = true;
  return derivative_level_invariants(curvature_pack(g, p, o));
}

const char* to_string(VsiVerdict v) { return v == VsiVerdict::VsiEvidence ? "VSI-evidence" : "NotVSI"; }

namespace {

void fill_verdict(VsiReport& r, double tol) {
  r.classifier = classifier_primary(r.quadratic);
  r.classifier_secondary = classifier_secondary(r.quadratic);
  r.nilpotent_by_classifier = std::abs(r.classifier) < tol;
  std::vector<std::pair<const char*, double>> list = {
      {"tau", r.quadratic.tau}, {"normRho2", r.quadratic.norm_rho2}, {"normR2", r.quadratic.norm_r2}};
  if (r.derivative) {
    list.emplace_back("normNablaR2", r.derivative->norm_dr2);
    list.emplace_back("normNablaW2", r.derivative->norm_dw2);
    list.emplace_back("cubicR", r.derivative->cubic);
  }
  r.verdict = VsiVerdict::VsiEvidence;
  r.witness.clear();
  r.witness_value = 0.0;
  for (const auto& [name, v] : list)
    if (std::abs(v) >= tol) {
      r.verdict = VsiVerdict::NotVsi;
      r.witness = name;
      r.witness_value = v;
      break;
    }
  r.consistent = r.nilpotent_by_classifier == r.nilpotent_by_eigenvalues;
}

}  // namespace

VsiReport vsi_classify(const ExtensionMetric& m, const Point4& p, double tol, bool derivative_level) {
  PackOptions o;
  o.order = derivative_level ? 4 : 2;
  o.bach = false;
  o.weyl_derivatives = derivative_level;
  o.riemann_derivative = derivative_level;
  const CurvaturePack pk = curvature_pack(m, p, o);
  VsiReport r;
  r.quadratic = quadratic_invariants(pk);
  if (derivative_level) r.derivative = derivative_level_invariants(pk);
  r.nilpotent_by_eigenvalues = is_nilpotent_kind(classify_point(m.endo(), p).kind);
  fill_verdict(r, tol);
  return r;
}

VsiReport vsi_classify(std::complex<double> l1, std::complex<double> l2, double tol) {
  VsiReport r;
  r.quadratic = eigen_invariants(l1, l2);
  r.nilpotent_by_eigenvalues = std::abs(l1) < kClassifyTolerance && std::abs(l2) < kClassifyTolerance;
  fill_verdict(r, tol);
  return r;
}

ClassifierSweep sweep_classifier(double a, double b, double c, int n, double tol) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "classifier sweep needs n >= 2");
  ClassifierSweep out;
  auto value = [&](std::complex<double> l1, std::complex<double> l2) {
    return eigen_invariants(l1, l2).kappa(a, b, c);
  };
  out.min_nonzero = std::numeric_limits<double>::infinity();

  // Each family is a punctured plane; the normalized value depends on the
  // direction only, so a sign change among samples forces a zero.
  auto run_family = [&](const std::function<std::pair<std::complex<double>, std::complex<double>>(double, double)>& at,
                        const std::vector<std::pair<double, double>>& grid, double lo, double hi) {
    for (const auto& [r, t] : grid) {
      const auto [l1, l2] = at(r, t);
      const double scale = std::max(std::abs(l1), std::abs(l2));
      const double v = value(l1, l2);
      ++out.samples;
      if (scale < kClassifyTolerance) {
        if (std::abs(v) >= tol) ++out.false_nonzeros;
        continue;
      }
      const double nv = v / std::pow(scale, 4);
      if (std::abs(v) < tol) {
        ++out.false_zeros;
        out.witness_l1 = l1;
        out.witness_l2 = l2;
        out.witness_value = v;
      }
      out.min_nonzero = std::min(out.min_nonzero, std::abs(nv));
    }
    // Locate a zero on the unit circle of directions by bisection.
    auto on_circle = [&](double t) {
      const auto [l1, l2] = at(1.0, t);
      return value(l1, l2) / std::pow(std::max(std::abs(l1), std::abs(l2)), 4);
    };
    const int m = 4096;
    double prev_t = lo, prev_v = on_circle(lo);
    for (int k = 1; k <= m; ++k) {
      const double t = lo + (hi - lo) * k / m;
      const double v = on_circle(t);
      if ((prev_v < 0) != (v < 0)) {
        double x0 = prev_t, x1 = t, v0 = prev_v;
        for (int it = 0; it < 200; ++it) {
          const double xm = 0.5 * (x0 + x1);
          const double vm = on_circle(xm);
          if ((vm < 0) == (v0 < 0)) {
            x0 = xm;
            v0 = vm;
          } else {
            x1 = xm;
          }
        }
        const auto [l1, l2] = at(1.0, 0.5 * (x0 + x1));
        ++out.false_zeros;
        out.witness_l1 = l1;
        out.witness_l2 = l2;
        out.witness_value = value(l1, l2);
        return;
      }
      prev_t = t;
      prev_v = v;
    }
  };

  std::vector<std::pair<double, double>> grid;
  // Real pairs (l1, l2) on [-1, 1]^2, stored as polar data.
  grid.emplace_back(0.0, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double l1 = -1.0 + 2.0 * i / (n - 1);
      const double l2 = -1.0 + 2.0 * j / (n - 1);
      grid.emplace_back(std::hypot(l1, l2), std::atan2(l2, l1));
    }
  run_family(
      [](double r, double t) {
        return std::pair<std::complex<double>, std::complex<double>>{r * std::cos(t), r * std::sin(t)};
      },
      grid, -std::numbers::pi, std::numbers::pi);

  grid.clear();
  // Conjugate pairs r e^{+-i theta}, theta in (0, pi).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double r = (i + 1.0) / n;
      const double t = std::numbers::pi * (j + 0.5) / n;
      grid.emplace_back(r, t);
    }
  run_family(
      [](double r, double t) {
        return std::pair<std::complex<double>, std::complex<double>>{std::polar(r, t), std::polar(r, -t)};
      },
      grid, 1e-9, std::numbers::pi - 1e-9);

  out.ok = out.false_zeros == 0 && out.false_nonzeros == 0;
  return out;
}

const char* to_string(WalkerFlag f) {
  switch (f) {
    case WalkerFlag::Ok: return "ok";
    case WalkerFlag::DegenerateRhoH: return "DegenerateRhoH";
    case WalkerFlag::ZeroOmega: return "ZeroOmega";
  }
  return "?";
}

namespace {

// 0 for the canonical T, 1 for the mirror; throws otherwise.
int walker_orientation(const ExtensionMetric& m, const Point4& p) {
  const EndoJets t = m.endo().jets(p, 1);
  auto matches = [&](int r, int i) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double want = (a == r && b == i) ? 1.0 : 0.0;
        const auto c = t[a][b].coeffs();
        for (std::size_t n = 1; n < c.size(); ++n)
          if (std::abs(c[n]) > 1e-14) return false;
        if (std::abs(t[a][b].value() - want) > 1e-14) return false;
      }
    return true;
  };
  if (matches(0, 1)) return 0;
  if (matches(1, 0)) return 1;
  throw Error(ErrorCode::InvalidArgument, "Walker invariants need T = d_x1 (x) dx^2 or d_x2 (x) dx^1");
}

}  // namespace

WalkerInvariants walker_invariants(const ExtensionMetric& m, const Point4& p, double tol) {
  const int orient = walker_orientation(m, p);
  const int sg[4] = {orient ? 1 : 0, orient ? 0 : 1, orient ? 3 : 2, orient ? 2 : 3};
  PackOptions o;
  o.order = 3;
  o.bach = false;
  o.weyl_derivatives = false;
  o.riemann_derivative = true;
  const CurvaturePack pk = curvature_pack(m, p, o);
  const Mat4 gi = values_of(pk.g_inv);

  WalkerInvariants w;
  w.mirrored = orient == 1;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) w.rho_h[a][b] = pk.ricci(sg[a], sg[b]).value();
  auto rup = [&](int i, int j, int k, int l) { return pk.riemann_up(sg[i], sg[j], sg[k], sg[l]).value(); };
  // R_ijk^l;n = g^{lm} R_ijmk;n
  auto drup = [&](int i, int j, int k, int l, int n) {
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += gi[sg[l]][q] * (*pk.driemann)(sg[i], sg[j], q, sg[k], sg[n]).value();
    return s;
  };
  w.omega_h = rup(0, 1, 0, 0) + rup(0, 1, 1, 1);

  const auto& r = w.rho_h;
  const double det = r[0][0] * r[1][1] - r[0][1] * r[1][0];
  if (std::abs(det) <= tol) {
    w.beta1_flag = WalkerFlag::DegenerateRhoH;
    w.beta2_flag = WalkerFlag::DegenerateRhoH;
  } else {
    w.beta1 = w.omega_h * w.omega_h / det;
  }
  if (std::abs(w.omega_h) <= tol) {
    if (w.beta2_flag == WalkerFlag::Ok) w.beta2_flag = WalkerFlag::ZeroOmega;
  } else {
    std::array<double, 2> om{};
    for (int n = 0; n < 2; ++n) om[n] = (drup(0, 1, 0, 0, n) + drup(0, 1, 1, 1, n)) / w.omega_h;
    w.omega_form = om;
    if (w.beta2_flag == WalkerFlag::Ok)
      w.beta2 = (r[1][1] * om[0] * om[0] + r[0][0] * om[1] * om[1] - 2.0 * r[0][1] * om[0] * om[1]) / det;
  }
  return w;
}

double WalkerBlocksReport::max() const {
  return std::max({vertical_to_horizontal, trace_pairing, horizontal_zero, r23_block, r12_block, trace_two_form,
                   ricci_vertical, ricci_block, nabla_trace});
}

WalkerBlocksReport walker_blocks(const ExtensionMetric& m, const Point4& p) {
  if (walker_orientation(m, p) != 0)
    throw Error(ErrorCode::InvalidArgument, "the block identities are stated for T = d_x1 (x) dx^2");
  PackOptions o;
  o.order = 3;
  o.bach = false;
  o.weyl_derivatives = false;
  o.riemann_derivative = true;
  const CurvaturePack pk = curvature_pack(m, p, o);
  const Mat4 gi = values_of(pk.g_inv);
  const AffineCurvature aff = ricci_affine(m.surface(), p);
  const ChristoffelJets gam = christoffel_at(m.surface(), p, 0);
  const double g111 = gam[0][0][0].value(), g112 = gam[0][0][1].value(), g122 = gam[0][1][1].value();
  const double phi11 = m.deformation().phi11.value(p);
  const double x3 = p.y1, x4 = p.y2;
  auto rup = [&](int i, int j, int k, int l) { return pk.riemann_up(i, j, k, l).value(); };
  auto upd = [](double& acc, double v) { acc = std::max(acc, std::abs(v)); };

  WalkerBlocksReport rep;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      for (int i = 2; i < 4; ++i)
        for (int j = 0; j < 2; ++j) upd(rep.vertical_to_horizontal, rup(a, b, i, j));
      upd(rep.trace_pairing, rup(a, b, 0, 0) + rup(a, b, 2, 2));
      upd(rep.trace_pairing, rup(a, b, 1, 1) + rup(a, b, 3, 3));
      upd(rep.trace_pairing, rup(a, b, 0, 1) + rup(a, b, 3, 2));
      upd(rep.trace_pairing, rup(a, b, 1, 0) + rup(a, b, 2, 3));
      const double ra = (a < 2 && b < 2) ? aff.ricci_anti[a][b] : 0.0;
      upd(rep.trace_two_form, rup(a, b, 0, 0) + rup(a, b, 1, 1) + 2.0 * ra);
      if (a < b && !(a == 0 && b == 1) && !(a == 1 && b == 2))
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) upd(rep.horizontal_zero, rup(a, b, k, l));
    }
  // [[R_231^1, R_232^1], [R_231^2, R_232^2]] = [[0, 1], [0, 0]]
  const double corr[2][2] = {{-g112, g111 - g122}, {0.0, g112}};  // [l][k]
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      upd(rep.r23_block, rup(1, 2, k, l) - ((k == 1 && l == 0) ? 1.0 : 0.0));
      upd(rep.r12_block, rup(0, 1, k, l) - (aff.r[0][1][k][l] - x3 * corr[l][k]));
    }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i >= 2 || j >= 2) upd(rep.ricci_vertical, pk.ricci(i, j).value());
  const double expect[2][2] = {
      {2.0 * aff.ricci_sym[0][0], 2.0 * aff.ricci_sym[0][1] + 2.0 * x3 * g112},
      {2.0 * aff.ricci_sym[1][0] + 2.0 * x3 * g112,
       2.0 * aff.ricci_sym[1][1] - 4.0 * x3 * g111 - 2.0 * x4 * g112 + 2.0 * x3 * g122 + phi11}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) upd(rep.ricci_block, pk.ricci(i, j).value() - expect[i][j]);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        if (i < 2 && j < 2 && k < 2) continue;
        double s = 0.0;
        for (int l = 0; l < 2; ++l)
          for (int q = 0; q < 4; ++q) s += gi[l][q] * (*pk.driemann)(i, j, q, l, k).value();
        upd(rep.nabla_trace, s);
      }
  return rep;
}

double walker_domega(const ExtensionMetric& m, const Point4& p, double h) {
  auto omega_at = [&](double dx1, double dx2) {
    const WalkerInvariants w = walker_invariants(m, {p.x1 + dx1, p.x2 + dx2, p.y1, p.y2});
    if (!w.omega_form) throw Error(ErrorCode::Numerical, "omega is undefined near the base point (Omega = 0)");
    return *w.omega_form;
  };
  auto d = [&](int var, int comp) {
    auto f = [&](double s) { return var == 0 ? omega_at(s, 0.0)[comp] : omega_at(0.0, s)[comp]; };
    return (f(h) - f(-h)) / (2.0 * h);
  };
  return d(0, 1) - d(1, 0);
}

}  // namespace rext
