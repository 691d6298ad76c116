// SPDX-License-Identifier: Apache-2.0
#include "rext/surface.hpp"

#include <algorithm>
#include <cmath>

#include "rext/error.hpp"

namespace rext {

bool BaseDomain::contains(const Point4& p) const {
  if (!p.finite()) return false;
  const bool lower = x1_min_strict ? p.x1 > x1_min : p.x1 >= x1_min;
  return lower && p.x1 <= x1_max && p.x2 >= x2_min && p.x2 <= x2_max;
}

AffineSurface::AffineSurface() : AffineSurface({0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {}, Kind::TypeA, "flat") {}

AffineSurface::AffineSurface(std::array<ScalarField, 6> symbols, BaseDomain domain, Kind kind, std::string label)
    : symbols_(std::move(symbols)), domain_(domain), kind_(kind), label_(std::move(label)) {
  for (const auto& f : symbols_)
    if (!f.base_only())
      throw Error(ErrorCode::InvalidArgument, "Christoffel symbol '" + f.description() +
                                                  "' must not depend on fiber coordinates");
}

int AffineSurface::slot(int i, int j, int k) {
  if (i > j) std::swap(i, j);
  // (0,0) -> 0, (0,1) -> 2, (1,1) -> 4
  return (i + j) * 2 + k;
}

const ScalarField& AffineSurface::symbol(int i, int j, int k) const { return symbols_[slot(i, j, k)]; }

AffineSurface AffineSurface::swapped() const {
  std::array<ScalarField, 6> s;
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const ScalarField& src = symbol(1 - i, 1 - j, 1 - k);
        s[slot(i, j, k)] = ScalarField(
            [src](const Point4& p, int order) {
              const Point4 q{p.x2, p.x1, p.y2, p.y1};
              Jet j = src.jet(q, order);
              // Re-index coefficients: variables (x1,x2,y1,y2) <- (x2,x1,y2,y1).
              Jet r(order);
              for (std::size_t n = 0; n < j.coeffs().size(); ++n) {
                const MultiIndex& mu = jet_multi_index(n);
                r.set_coeff({mu[1], mu[0], mu[3], mu[2]}, j.coeffs()[n]);
              }
              return r;
            },
            "swap(" + src.description() + ")", src.is_zero(), src.base_only());
      }
  BaseDomain d;
  d.x1_min = domain_.x2_min;
  d.x1_max = domain_.x2_max;
  d.x2_min = domain_.x1_min;
  d.x2_max = domain_.x1_max;
  AffineSurface out(std::move(s), d, kind_, label_ + "[swapped]");
  if (domain_.x1_min_strict) {
    // A strict bound on x1 becomes a strict bound on the new x2; encode by
    // nudging the inclusive bound.
    out.domain_.x2_min = std::nextafter(domain_.x1_min, std::numeric_limits<double>::infinity());
  }
  return out;
}

AffineSurface type_a_surface(const std::array<double, 6>& gamma) {
  std::array<ScalarField, 6> s;
  for (int i = 0; i < 6; ++i) s[i] = ScalarField(gamma[i]);
  return AffineSurface(std::move(s), {}, AffineSurface::Kind::TypeA, "typeA");
}

AffineSurface type_b_surface(const std::array<double, 6>& c) {
  std::array<ScalarField, 6> s;
  for (int i = 0; i < 6; ++i) s[i] = ScalarField(Expr(c[i]) / Expr::x1());
  BaseDomain d;
  d.x1_min = 0.0;
  d.x1_min_strict = true;
  return AffineSurface(std::move(s), d, AffineSurface::Kind::TypeB, "typeB");
}

AffineSurface remark12_surface(const Expr& phi, const Expr& c, const Expr& g12_1, const Expr& g22_1,
                               const Expr& g22_2) {
  if (c.depends_on(0) || c.depends_on(2) || c.depends_on(3))
    throw Error(ErrorCode::InvalidArgument, "remark12 family: c must depend on x2 only");
  ScalarField g11_1(
      [phi](const Point4& p, int order) {
        if (order + 1 > kMaxJetOrder) throw Error(ErrorCode::Order, "remark12 family needs one extra jet order");
        return -phi.eval_jet(p, order + 1).diff(0);
      },
      "-d/dx1(" + phi.to_string() + ")", false, true);
  ScalarField g12_2(
      [phi, c](const Point4& p, int order) {
        if (order + 1 > kMaxJetOrder) throw Error(ErrorCode::Order, "remark12 family needs one extra jet order");
        return -phi.eval_jet(p, order + 1).diff(0) + c.eval_jet(p, order) * exp(phi.eval_jet(p, order));
      },
      "-d/dx1(" + phi.to_string() + ") + (" + c.to_string() + ")*exp(" + phi.to_string() + ")", false, true);
  std::array<ScalarField, 6> s{g11_1, ScalarField(0.0), ScalarField(g12_1), g12_2, ScalarField(g22_1),
                               ScalarField(g22_2)};
  for (const Expr* e : {&phi, &c, &g12_1, &g22_1, &g22_2})
    if (e->depends_on(2) || e->depends_on(3))
      throw Error(ErrorCode::InvalidArgument, "remark12 family: fields must not depend on fiber coordinates");
  return AffineSurface(std::move(s), {}, AffineSurface::Kind::Remark12, "remark12");
}

AffineSurface explicit_surface(const std::array<Expr, 6>& gamma, BaseDomain domain) {
  std::array<ScalarField, 6> s;
  for (int i = 0; i < 6; ++i) s[i] = ScalarField(gamma[i]);
  return AffineSurface(std::move(s), domain, AffineSurface::Kind::Explicit, "explicit");
}

ChristoffelJets christoffel_at(const AffineSurface& s, const Point4& p, int order) {
  if (!s.domain().contains(p))
    throw Error(ErrorCode::Domain, "point (" + std::to_string(p.x1) + ", " + std::to_string(p.x2) +
                                       ") outside the surface domain");
  ChristoffelJets g;
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        g[i][j][k] = s.symbol(i, j, k).jet(p, order);
        if (i != j) g[j][i][k] = g[i][j][k];
      }
  return g;
}

AffineCurvature ricci_affine(const AffineSurface& s, const Point4& p) {
  const ChristoffelJets g = christoffel_at(s, p, 1);
  AffineCurvature out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double v = g[j][k][l].diff(i).value() - g[i][k][l].diff(j).value();
          for (int m = 0; m < 2; ++m)
            v += g[j][k][m].value() * g[i][m][l].value() - g[i][k][m].value() * g[j][m][l].value();
          out.r[i][j][k][l] = v;
        }
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      double v = 0.0;
      for (int i = 0; i < 2; ++i) v += out.r[i][j][k][i];
      out.ricci[j][k] = kAffineRicciSign * v;
    }
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      out.ricci_sym[j][k] = 0.5 * (out.ricci[j][k] + out.ricci[k][j]);
      out.ricci_anti[j][k] = 0.5 * (out.ricci[j][k] - out.ricci[k][j]);
    }
  return out;
}

FlatnessReport is_flat(const AffineSurface& s, std::span<const Point4> samples, double tol) {
  if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "is_flat needs at least one sample point");
  FlatnessReport rep;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    const AffineCurvature c = ricci_affine(s, samples[n]);
    double m = 0.0;
    for (const auto& a : c.r)
      for (const auto& b : a)
        for (const auto& cc : b)
          for (double v : cc) m = std::max(m, std::abs(v));
    if (m > rep.max_curvature) {
      rep.max_curvature = m;
      rep.worst_sample = n;
    }
  }
  rep.flat = rep.max_curvature < tol;
  return rep;
}

}  // namespace rext
