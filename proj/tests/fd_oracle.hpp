// Finite-difference curvature oracle: works only from metric values and
// Richardson-extrapolated central differences, never from jet derivatives.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "rext/metric.hpp"

namespace oracle {

using Vec = std::vector<double>;
using Fn = std::function<Vec(const rext::Point4&)>;

inline rext::Point4 shift(rext::Point4 p, int v, double s) {
  switch (v) {
    case 0: p.x1 += s; break;
    case 1: p.x2 += s; break;
    case 2: p.y1 += s; break;
    default: p.y2 += s; break;
  }
  return p;
}

// d[v][n]: derivative of component n in direction v, (4 D(h/2) - D(h)) / 3.
inline std::array<Vec, 4> gradient(const Fn& f, const rext::Point4& p, double h) {
  std::array<Vec, 4> d;
  for (int v = 0; v < 4; ++v) {
    const Vec a = f(shift(p, v, h)), b = f(shift(p, v, -h));
    const Vec c = f(shift(p, v, h / 2)), e = f(shift(p, v, -h / 2));
    d[v].resize(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
      const double dh = (a[n] - b[n]) / (2 * h);
      const double dh2 = (c[n] - e[n]) / h;
      d[v][n] = (4 * dh2 - dh) / 3;
    }
  }
  return d;
}

inline std::array<std::array<double, 4>, 4> invert(const std::array<std::array<double, 4>, 4>& m) {
  std::array<std::array<double, 8>, 4> a{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) a[i][j] = m[i][j];
    a[i][4 + i] = 1.0;
  }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    const double d = a[c][c];
    for (int k = 0; k < 8; ++k) a[c][k] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (int k = 0; k < 8; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::array<std::array<double, 4>, 4> inv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv[i][j] = a[i][4 + j];
  return inv;
}

struct Oracle {
  rext::MetricField metric;
  double h = 0.02;

  std::array<std::array<double, 4>, 4> g(const rext::Point4& p) const { return rext::metric_values(metric, p); }

  Vec g_flat(const rext::Point4& p) const {
    const auto m = g(p);
    Vec v(16);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v[i * 4 + j] = m[i][j];
    return v;
  }

  // Gamma_ij^k at index (i*4+j)*4+k.
  Vec gamma(const rext::Point4& p) const {
    const auto dg = gradient([this](const rext::Point4& q) { return g_flat(q); }, p, h);
    const auto gi = invert(g(p));
    Vec out(64, 0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          double s = 0.0;
          for (int l = 0; l < 4; ++l)
            s += 0.5 * gi[k][l] * (dg[i][j * 4 + l] + dg[j][i * 4 + l] - dg[l][i * 4 + j]);
          out[(i * 4 + j) * 4 + k] = s;
        }
    return out;
  }

  // Lowered curvature R_ijkl = g(R(d_i,d_j)d_l, d_k), Ricci, scalar, Weyl.
  struct Curv {
    Vec riemann, ricci, weyl;
    double tau = 0.0;
  };

  Curv curvature(const rext::Point4& p) const {
    const Vec gm = gamma(p);
    const auto dgm = gradient([this](const rext::Point4& q) { return gamma(q); }, p, h);
    const auto gv = g(p);
    const auto gi = invert(gv);
    auto G = [&](int i, int j, int k) { return gm[(i * 4 + j) * 4 + k]; };
    Vec up(256);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double s = dgm[i][(j * 4 + k) * 4 + l] - dgm[j][(i * 4 + k) * 4 + l];
            for (int m = 0; m < 4; ++m) s += G(j, k, m) * G(i, m, l) - G(i, k, m) * G(j, m, l);
            up[((i * 4 + j) * 4 + k) * 4 + l] = s;
          }
    Curv c;
    c.riemann.assign(256, 0.0);
    c.ricci.assign(16, 0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double s = 0.0;
            for (int m = 0; m < 4; ++m) s += up[((i * 4 + j) * 4 + l) * 4 + m] * gv[m][k];
            c.riemann[((i * 4 + j) * 4 + k) * 4 + l] = s;
          }
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i) c.ricci[j * 4 + k] += up[((i * 4 + j) * 4 + k) * 4 + i];
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c.tau += gi[j][k] * c.ricci[j * 4 + k];
    c.weyl.assign(256, 0.0);
    auto r = [&](int a, int b) { return c.ricci[a * 4 + b]; };
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l)
            c.weyl[((i * 4 + j) * 4 + k) * 4 + l] =
                c.riemann[((i * 4 + j) * 4 + k) * 4 + l] -
                0.5 * (r(j, l) * gv[i][k] - r(i, l) * gv[j][k] + gv[j][l] * r(i, k) - gv[i][l] * r(j, k)) +
                c.tau / 6 * (gv[j][l] * gv[i][k] - gv[i][l] * gv[j][k]);
    return c;
  }

  // Covariant derivative of a covariant tensor field given by values; the
  // derivative index is appended last.
  Vec nabla(const Fn& t, int rank, const rext::Point4& p) const {
    const Vec tv = t(p);
    const auto dt = gradient(t, p, h);
    const Vec gm = gamma(p);
    Vec out(tv.size() * 4);
    std::vector<std::size_t> stride(rank);
    stride[rank - 1] = 1;
    for (int k = rank - 2; k >= 0; --k) stride[k] = stride[k + 1] * 4;
    for (std::size_t n = 0; n < tv.size(); ++n)
      for (int v = 0; v < 4; ++v) {
        double s = dt[v][n];
        for (int slot = 0; slot < rank; ++slot) {
          const int a = static_cast<int>((n / stride[slot]) % 4);
          const std::size_t base = n - stride[slot] * a;
          for (int m = 0; m < 4; ++m) s -= gm[(v * 4 + a) * 4 + m] * tv[base + stride[slot] * m];
        }
        out[n * 4 + v] = s;
      }
    return out;
  }

  // Bach tensor B_ij = g^ka g^lb W_kilj;b;a + 1/2 rho^kl W_kilj.
  Vec bach(const rext::Point4& p) const {
    const Fn weyl = [this](const rext::Point4& q) { return curvature(q).weyl; };
    const Fn dweyl = [this, weyl](const rext::Point4& q) { return nabla(weyl, 4, q); };
    const Vec ddw = nabla(dweyl, 5, p);
    const Curv c = curvature(p);
    const auto gi = invert(g(p));
    Vec b(16, 0.0);
    auto W = [&](int a, int b2, int cc, int d) { return c.weyl[((a * 4 + b2) * 4 + cc) * 4 + d]; };
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            double rho_up = 0.0;
            for (int a = 0; a < 4; ++a)
              for (int bb = 0; bb < 4; ++bb) {
                rho_up += gi[k][a] * gi[l][bb] * c.ricci[a * 4 + bb];
                const std::size_t idx = ((((static_cast<std::size_t>(k) * 4 + i) * 4 + l) * 4 + j) * 4 + bb) * 4 + a;
                s += gi[k][a] * gi[l][bb] * ddw[idx];
              }
            s += 0.5 * rho_up * W(k, i, l, j);
          }
        b[i * 4 + j] = s;
      }
    return b;
  }
};

}  // namespace oracle
