// SPDX-License-Identifier: Apache-2.0
#include "rext/extension.hpp"

#include <algorithm>
#include <cmath>

#include "rext/error.hpp"

namespace rext {

EndoField::EndoField() : EndoField({{{0.0, 0.0}, {0.0, 0.0}}}, "zero") {}

EndoField::EndoField(std::array<std::array<ScalarField, 2>, 2> t, std::string label)
    : t_(std::move(t)), label_(std::move(label)) {
  for (const auto& row : t_)
    for (const auto& e : row)
      if (!e.base_only())
        throw Error(ErrorCode::InvalidArgument, "endomorphism entry '" + e.description() +
                                                    "' must not depend on fiber coordinates");
}

EndoJets EndoField::jets(const Point4& p, int order) const {
  EndoJets j;
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < 2; ++i) j[r][i] = t_[r][i].jet(p, order);
  return j;
}

Matrix2 EndoField::values(const Point4& p) const {
  Matrix2 m{};
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < 2; ++i) m[r][i] = t_[r][i].value(p);
  return m;
}

EndoField EndoField::canonical() { return EndoField({{{0.0, 1.0}, {0.0, 0.0}}}, "canonical"); }
EndoField EndoField::mirrored() { return EndoField({{{0.0, 0.0}, {1.0, 0.0}}}, "mirrored"); }
EndoField EndoField::scalar(const ScalarField& lambda) {
  return EndoField({{{lambda, 0.0}, {0.0, lambda}}}, "scalar(" + lambda.description() + ")");
}
EndoField EndoField::constant(const Matrix2& m) {
  return EndoField({{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}}}, "constant");
}

EndoField nilpotent_endo(const ScalarField& a, const ScalarField& x, std::string label) {
  const bool base = a.base_only() && x.base_only();
  // Entries are built from the jets of alpha and xi directly so that T^2
  // vanishes as an algebraic identity of the evaluator.
  auto entry = [a, x, base](int r, int i) {
    return ScalarField(
        [a, x, r, i](const Point4& p, int order) {
          const Jet aj = a.jet(p, order);
          if (r == 0 && i == 1) return aj;
          const Jet xj = x.jet(p, order);
          if (r == 0 && i == 0) return aj * xj;
          if (r == 1 && i == 0) return -(aj * xj) * xj;
          return -(aj * xj);
        },
        "nilpotent[" + std::to_string(r + 1) + "][" + std::to_string(i + 1) + "]", false, base);
  };
  return EndoField({{{entry(0, 0), entry(0, 1)}, {entry(1, 0), entry(1, 1)}}}, std::move(label));
}

EndoField NilpotentSpec::endo() const {
  return nilpotent_endo(ScalarField(alpha), ScalarField(xi),
                        "nilpotent(alpha=" + alpha.to_string() + ", xi=" + xi.to_string() + ")");
}

ExtensionMetric::ExtensionMetric(AffineSurface surface, EndoField endo, DeformationField deformation)
    : surface_(std::move(surface)), endo_(std::move(endo)), deformation_(std::move(deformation)) {
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      if (!deformation_.entry(i, j).base_only())
        throw Error(ErrorCode::InvalidArgument, "deformation entries must not depend on fiber coordinates");
}

JetMatrix4 ExtensionMetric::metric(const Point4& p, int order) const {
  const ChristoffelJets gamma = christoffel_at(surface_, p, order);
  const EndoJets t = endo_.jets(p, order);
  const Jet y[2] = {Jet::variable(order, 2, p.y1), Jet::variable(order, 3, p.y2)};
  // w_i = y_r T^r_i, so the quadratic term is w_i w_j.
  const Jet w[2] = {y[0] * t[0][0] + y[1] * t[1][0], y[0] * t[0][1] + y[1] * t[1][1]};
  JetMatrix4 g;
  for (auto& row : g)
    for (auto& e : row) e = Jet(order);
  for (int i = 0; i < 2; ++i) {
    g[i][i + 2] = Jet(order, 1.0);
    g[i + 2][i] = Jet(order, 1.0);
    for (int j = i; j < 2; ++j) {
      Jet e = w[i] * w[j] - 2.0 * (y[0] * gamma[i][j][0] + y[1] * gamma[i][j][1]);
      const ScalarField& phi = deformation_.entry(i, j);
      if (!phi.is_zero()) e += phi.jet(p, order);
      g[i][j] = e;
      if (i != j) g[j][i] = e;
    }
  }
  return g;
}

MetricField ExtensionMetric::field() const {
  const ExtensionMetric self = *this;
  return MetricField([self](const Point4& p, int order) { return self.metric(p, order); },
                     "extension(" + surface_.label() + ", " + endo_.label() + ")");
}

ExtensionMetric build_metric(const AffineSurface& s, const EndoField& t, const DeformationField& phi) {
  return ExtensionMetric(s, t, phi);
}

const char* to_string(JordanKind k) {
  switch (k) {
    case JordanKind::Zero: return "zero";
    case JordanKind::ScalarMultiple: return "scalar_multiple";
    case JordanKind::NilpotentNonzero: return "nilpotent_nonzero";
    case JordanKind::GenericNonScalar: return "generic_non_scalar";
  }
  return "unknown";
}

JordanClass classify_matrix(const Matrix2& t, double tol) {
  JordanClass c;
  const double tr = t[0][0] + t[1][1];
  const double det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
  c.deviation = std::max({std::abs(t[0][0] - tr / 2), std::abs(t[1][1] - tr / 2), std::abs(t[0][1]),
                          std::abs(t[1][0])});
  const double disc = tr * tr / 4 - det;
  if (disc >= 0) {
    const double s = std::sqrt(disc);
    c.lambda1 = tr / 2 - s;
    c.lambda2 = tr / 2 + s;
  } else {
    const double s = std::sqrt(-disc);
    c.lambda1 = {tr / 2, -s};
    c.lambda2 = {tr / 2, s};
  }
  const double scale = std::max(1.0, std::max({std::abs(t[0][0]), std::abs(t[0][1]), std::abs(t[1][0]),
                                               std::abs(t[1][1])}));
  if (c.deviation < tol) {
    c.kind = std::abs(tr / 2) < tol ? JordanKind::Zero : JordanKind::ScalarMultiple;
    if (c.kind == JordanKind::Zero) c.lambda1 = c.lambda2 = 0.0;
    return c;
  }
  if (std::abs(tr) < tol * scale && std::abs(det) < tol * scale * scale) {
    c.kind = JordanKind::NilpotentNonzero;
    c.lambda1 = c.lambda2 = 0.0;
  } else {
    c.kind = JordanKind::GenericNonScalar;
  }
  return c;
}

JordanClass classify_point(const EndoField& t, const Point4& p, double tol) {
  return classify_matrix(t.values(p), tol);
}

std::array<double, 2> canonical_bach_relations(const AffineSurface& s, const Point4& p) {
  const ChristoffelJets g = christoffel_at(s, p, 1);
  const double g111 = g[0][0][0].value();
  const double g122 = g[0][1][1].value();
  return {g[0][0][1].value(),
          g111 * g111 - g111 * g122 + g[0][0][0].diff(0).value() - g[0][1][1].diff(0).value()};
}

namespace {

// 4th-order first derivative of samples v[0..n) with spacing h at index k;
// one-sided five-point stencils near the ends.
double fd4(const std::vector<double>& v, int k, double h) {
  const int n = static_cast<int>(v.size());
  if (n < 5) throw Error(ErrorCode::InvalidArgument, "normalization grid needs at least 5 nodes per direction");
  if (k >= 2 && k <= n - 3) return (v[k - 2] - 8 * v[k - 1] + 8 * v[k + 1] - v[k + 2]) / (12 * h);
  if (k < 2) {
    const int b = 0;
    const double s[5] = {v[b], v[b + 1], v[b + 2], v[b + 3], v[b + 4]};
    if (k == 0) return (-25 * s[0] + 48 * s[1] - 36 * s[2] + 16 * s[3] - 3 * s[4]) / (12 * h);
    return (-3 * s[0] - 10 * s[1] + 18 * s[2] - 6 * s[3] + s[4]) / (12 * h);
  }
  const int b = n - 5;
  const double s[5] = {v[b], v[b + 1], v[b + 2], v[b + 3], v[b + 4]};
  if (k == n - 1) return (25 * s[4] - 48 * s[3] + 36 * s[2] - 16 * s[1] + 3 * s[0]) / (12 * h);
  return (3 * s[4] + 10 * s[3] - 18 * s[2] + 6 * s[1] - s[0]) / (12 * h);
}

struct LineState {
  double u[2];
  double j[2];
  double big_f;  // integral of 1/f along z1
  double h;      // g / f
};

struct LineEval {
  double f;
  double du[2];
  double dj[2];
};

}  // namespace

NormalizationResult normalize_nilpotent(const EndoField& t, const Point4& p0, const NormalizeOptions& opt) {
  if (!(opt.step > 0) || !(opt.width > 0) || !(opt.height > 0))
    throw Error(ErrorCode::InvalidArgument, "normalization grid extents and step must be positive");
  const Matrix2 t0 = t.values(p0);
  const double col_norm[2] = {std::hypot(t0[0][0], t0[1][0]), std::hypot(t0[0][1], t0[1][1])};
  if (std::max(col_norm[0], col_norm[1]) == 0.0)
    throw Error(ErrorCode::InvalidArgument, "normalize_nilpotent: T vanishes at the base point");
  auto square_norm = [](const Matrix2& m) {
    double r = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) r = std::max(r, std::abs(m[a][0] * m[0][b] + m[a][1] * m[1][b]));
    return r;
  };
  if (square_norm(t0) > opt.nilpotency_tol)
    throw Error(ErrorCode::InvalidArgument, "normalize_nilpotent: T is not nilpotent at the base point");

  NormalizationResult res;
  const int c = col_norm[1] >= col_norm[0] ? 1 : 0;
  res.column = c;
  const int m1 = static_cast<int>(std::lround(opt.width / (2 * opt.step)));
  const int m2 = static_cast<int>(std::lround(opt.height / (2 * opt.step)));
  const double h = opt.step;
  res.n1 = 2 * m1 + 1;
  res.n2 = 2 * m2 + 1;
  if (res.n1 < 5 || res.n2 < 5)
    throw Error(ErrorCode::InvalidArgument, "normalization grid needs at least 5 nodes per direction");
  for (int i = 0; i < res.n1; ++i) res.z1.push_back((i - m1) * h);
  for (int j = 0; j < res.n2; ++j) res.z2.push_back((j - m2) * h);

  const std::size_t total = static_cast<std::size_t>(res.n1) * res.n2;
  res.base.resize(total);
  res.coords.resize(total);
  res.f.resize(total);
  res.g.resize(total);

  auto eval_line = [&](const LineState& s) {
    const Point4 p{s.u[0], s.u[1], 0.0, 0.0};
    const EndoJets tj = t.jets(p, 1);
    double tv[2][2];
    double dt[2][2][2];  // dt[k][a][b] = d_k T^a_b
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        tv[a][b] = tj[a][b].value();
        for (int k = 0; k < 2; ++k) dt[k][a][b] = tj[a][b].diff(k).value();
      }
    LineEval e;
    const double y[2] = {tv[0][c], tv[1][c]};
    const double yy = y[0] * y[0] + y[1] * y[1];
    if (yy == 0.0) throw Error(ErrorCode::Numerical, "normalize_nilpotent: kernel field vanishes on the grid");
    const double tjv[2] = {tv[0][0] * s.j[0] + tv[0][1] * s.j[1], tv[1][0] * s.j[0] + tv[1][1] * s.j[1]};
    e.f = (tjv[0] * y[0] + tjv[1] * y[1]) / yy;
    e.du[0] = y[0];
    e.du[1] = y[1];
    for (int a = 0; a < 2; ++a) e.dj[a] = dt[0][a][c] * s.j[0] + dt[1][a][c] * s.j[1];
    return e;
  };

  // Derivatives of every line at once; the z2 derivative of f couples lines.
  auto rhs = [&](const std::vector<LineState>& st, std::vector<LineState>& d, std::vector<double>& fvals) {
    const int n = static_cast<int>(st.size());
    std::vector<LineEval> ev(n);
    for (int j = 0; j < n; ++j) {
      ev[j] = eval_line(st[j]);
      fvals[j] = ev[j].f;
      if (std::abs(ev[j].f) < 1e-12)
        throw Error(ErrorCode::Numerical, "normalize_nilpotent: f vanishes along the integration path");
    }
    for (int j = 0; j < n; ++j) {
      d[j].u[0] = ev[j].du[0];
      d[j].u[1] = ev[j].du[1];
      d[j].j[0] = ev[j].dj[0];
      d[j].j[1] = ev[j].dj[1];
      d[j].big_f = 1.0 / ev[j].f;
      // With h = g/f the ODE for g becomes dh/dz1 = (df/dz2) / f^2.
      d[j].h = fd4(fvals, j, h) / (ev[j].f * ev[j].f);
    }
  };

  std::vector<LineState> init(res.n2);
  for (int j = 0; j < res.n2; ++j) {
    LineState& s = init[j];
    s.u[0] = p0.x1 + (c == 0 ? res.z2[j] : 0.0);
    s.u[1] = p0.x2 + (c == 1 ? res.z2[j] : 0.0);
    s.j[0] = c == 0 ? 1.0 : 0.0;
    s.j[1] = c == 1 ? 1.0 : 0.0;
    s.big_f = 0.0;
    s.h = 0.0;
  }

  auto record = [&](int i, const std::vector<LineState>& st) {
    std::vector<double> fv(st.size());
    std::vector<LineState> d(st.size());
    rhs(st, d, fv);
    for (int j = 0; j < res.n2; ++j) {
      const std::size_t n = res.node(i, j);
      res.base[n] = {st[j].u[0], st[j].u[1]};
      res.coords[n] = {p0.x1 + st[j].big_f, p0.x2 + res.z2[j]};
      res.f[n] = fv[j];
      res.g[n] = fv[j] * st[j].h;
    }
  };

  auto axpy = [](const std::vector<LineState>& a, const std::vector<LineState>& d, double s) {
    std::vector<LineState> r = a;
    for (std::size_t j = 0; j < r.size(); ++j) {
      for (int k = 0; k < 2; ++k) {
        r[j].u[k] += s * d[j].u[k];
        r[j].j[k] += s * d[j].j[k];
      }
      r[j].big_f += s * d[j].big_f;
      r[j].h += s * d[j].h;
    }
    return r;
  };

  record(m1, init);
  for (int dir : {1, -1}) {
    std::vector<LineState> st = init;
    const double hs = dir * h;
    std::vector<LineState> k1(st.size()), k2(st.size()), k3(st.size()), k4(st.size());
    std::vector<double> fv(st.size());
    for (int step = 1; step <= m1; ++step) {
      rhs(st, k1, fv);
      rhs(axpy(st, k1, hs / 2), k2, fv);
      rhs(axpy(st, k2, hs / 2), k3, fv);
      rhs(axpy(st, k3, hs), k4, fv);
      for (std::size_t j = 0; j < st.size(); ++j) {
        for (int k = 0; k < 2; ++k) {
          st[j].u[k] += hs / 6 * (k1[j].u[k] + 2 * k2[j].u[k] + 2 * k3[j].u[k] + k4[j].u[k]);
          st[j].j[k] += hs / 6 * (k1[j].j[k] + 2 * k2[j].j[k] + 2 * k3[j].j[k] + k4[j].j[k]);
        }
        st[j].big_f += hs / 6 * (k1[j].big_f + 2 * k2[j].big_f + 2 * k3[j].big_f + k4[j].big_f);
        st[j].h += hs / 6 * (k1[j].h + 2 * k2[j].h + 2 * k3[j].h + k4[j].h);
      }
      record(m1 + dir * step, st);
    }
  }

  // Pushforward of T through the sampled map, with Jacobians from
  // finite differences of the node values.
  std::vector<double> buf1(res.n1), buf2(res.n2);
  auto d_z1 = [&](int i, int j, auto get) {
    for (int a = 0; a < res.n1; ++a) buf1[a] = get(res.node(a, j));
    return fd4(buf1, i, h);
  };
  auto d_z2 = [&](int i, int j, auto get) {
    for (int b = 0; b < res.n2; ++b) buf2[b] = get(res.node(i, b));
    return fd4(buf2, j, h);
  };
  for (int i = 0; i < res.n1; ++i)
    for (int j = 0; j < res.n2; ++j) {
      const std::size_t n = res.node(i, j);
      const Matrix2 tv = t.values({res.base[n][0], res.base[n][1], 0, 0});
      res.nilpotency_residual = std::max(res.nilpotency_residual, square_norm(tv));
      double du[2][2];  // du[a][k] = d u^a / d z^k
      double dx[2][2];  // dx[a][k] = d x^a / d z^k
      for (int a = 0; a < 2; ++a) {
        du[a][0] = d_z1(i, j, [&](std::size_t m) { return res.base[m][a]; });
        du[a][1] = d_z2(i, j, [&](std::size_t m) { return res.base[m][a]; });
        dx[a][0] = d_z1(i, j, [&](std::size_t m) { return res.coords[m][a]; });
        dx[a][1] = d_z2(i, j, [&](std::size_t m) { return res.coords[m][a]; });
      }
      const double det_u = du[0][0] * du[1][1] - du[0][1] * du[1][0];
      if (std::abs(det_u) < 1e-14) throw Error(ErrorCode::Numerical, "normalize_nilpotent: degenerate flow box");
      const double iu[2][2] = {{du[1][1] / det_u, -du[0][1] / det_u}, {-du[1][0] / det_u, du[0][0] / det_u}};
      double a[2][2];  // dx/du
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) a[r][s] = dx[r][0] * iu[0][s] + dx[r][1] * iu[1][s];
      const double det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
      const double ia[2][2] = {{a[1][1] / det_a, -a[0][1] / det_a}, {-a[1][0] / det_a, a[0][0] / det_a}};
      double pushed[2][2] = {};
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) pushed[r][s] += a[r][k] * tv[k][l] * ia[l][s];
      const double target[2][2] = {{0.0, 1.0}, {0.0, 0.0}};
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) res.residual = std::max(res.residual, std::abs(pushed[r][s] - target[r][s]));
      if (i > 0 && i + 1 < res.n1 && j > 0 && j + 1 < res.n2) {
        const double dfz2 = d_z2(i, j, [&](std::size_t m) { return res.coords[m][0]; });
        res.bracket_residual = std::max(res.bracket_residual, std::abs(res.g[n] + res.f[n] * dfz2));
      }
    }
  if (res.nilpotency_residual > opt.nilpotency_tol)
    throw Error(ErrorCode::InvalidArgument, "normalize_nilpotent: T is not nilpotent on the rectangle");
  return res;
}

EndoField piecewise_endo(const Expr& alpha) {
  if (alpha.depends_on(0) || alpha.depends_on(2) || alpha.depends_on(3))
    throw Error(ErrorCode::InvalidArgument, "piecewise endomorphism: alpha must depend on x2 only");
  auto entry = [alpha](bool diag, bool upper) {
    return ScalarField(
        [alpha, diag, upper](const Point4& p, int order) {
          const bool scalar_side = p.x2 <= 0.0;
          if ((scalar_side && diag) || (!scalar_side && upper)) return alpha.eval_jet(p, order);
          return Jet(order);
        },
        "piecewise", false, true);
  };
  return EndoField({{{entry(true, false), entry(false, true)}, {entry(false, false), entry(true, false)}}},
                   "piecewise(alpha=" + alpha.to_string() + ")");
}

ExtensionMetric mixed_jordan_example(const Expr& alpha, const AffineSurface& s, const std::vector<Point4>& checks) {
  if (std::abs(alpha.eval({0, 0, 0, 0})) > 1e-14)
    throw Error(ErrorCode::InvalidArgument, "mixed Jordan example: alpha must vanish at x2 = 0");
  for (const Point4& p : checks) {
    const auto r = canonical_bach_relations(s, p);
    if (std::abs(r[0]) > 1e-10 || std::abs(r[1]) > 1e-10)
      throw Error(ErrorCode::InvalidArgument, "mixed Jordan example: surface violates the Bach-flat relations");
    if (alpha.eval(p) < 0)
      throw Error(ErrorCode::InvalidArgument, "mixed Jordan example: alpha must be non-negative");
  }
  return ExtensionMetric(s, piecewise_endo(alpha), {});
}

}  // namespace rext
