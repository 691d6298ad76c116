// SPDX-License-Identifier: Apache-2.0
#include "rext/jet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rext/error.hpp"

namespace rext {
namespace {

struct ProductTerm {
  std::uint16_t a, b, out;
};

struct DiffTerm {
  std::uint16_t from;
  double factor;
};

// Immutable index tables shared by every jet. Built once on first use.
struct Tables {
  std::vector<MultiIndex> indices;
  std::array<std::size_t, kMaxJetOrder + 2> size_upto{};
  std::vector<int> lookup;  // (kMaxJetOrder+1)^4 dense map multi-index -> position
  std::vector<ProductTerm> products;
  std::array<std::size_t, kMaxJetOrder + 1> products_upto{};
  // diffs[var][i]: coefficient i of d/dvar comes from coefficient `from`
  std::array<std::vector<DiffTerm>, kJetVars> diffs;

  static int key(const MultiIndex& mu) {
    constexpr int n = kMaxJetOrder + 1;
    return ((mu[0] * n + mu[1]) * n + mu[2]) * n + mu[3];
  }

  Tables() {
    constexpr int n = kMaxJetOrder + 1;
    lookup.assign(n * n * n * n, -1);
    for (int d = 0; d <= kMaxJetOrder; ++d) {
      size_upto[d] = indices.size();
      for (int a = d; a >= 0; --a)
        for (int b = d - a; b >= 0; --b)
          for (int c = d - a - b; c >= 0; --c) {
            MultiIndex mu{a, b, c, d - a - b - c};
            lookup[key(mu)] = static_cast<int>(indices.size());
            indices.push_back(mu);
          }
    }
    size_upto[kMaxJetOrder + 1] = indices.size();
    // size_upto[d] currently holds the count of indices with degree < d;
    // shift so that size_upto[d] counts degree <= d.
    for (int d = 0; d <= kMaxJetOrder; ++d) size_upto[d] = size_upto[d + 1];

    const auto degree = [&](std::size_t i) {
      const auto& m = indices[i];
      return m[0] + m[1] + m[2] + m[3];
    };
    for (std::size_t i = 0; i < indices.size(); ++i)
      for (std::size_t j = 0; j < indices.size(); ++j) {
        if (degree(i) + degree(j) > kMaxJetOrder) continue;
        MultiIndex s;
        for (int v = 0; v < kJetVars; ++v) s[v] = indices[i][v] + indices[j][v];
        products.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                            static_cast<std::uint16_t>(lookup[key(s)])});
      }
    std::stable_sort(products.begin(), products.end(),
                     [&](const ProductTerm& x, const ProductTerm& y) { return degree(x.out) < degree(y.out); });
    for (int d = 0; d <= kMaxJetOrder; ++d) {
      products_upto[d] = static_cast<std::size_t>(
          std::count_if(products.begin(), products.end(),
                         [&](const ProductTerm& t) { return degree(t.out) <= d; }));
    }
    for (int v = 0; v < kJetVars; ++v) {
      for (std::size_t i = 0; i < size_upto[kMaxJetOrder - 1]; ++i) {
        MultiIndex up = indices[i];
        up[v] += 1;
        diffs[v].push_back({static_cast<std::uint16_t>(lookup[key(up)]), static_cast<double>(up[v])});
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder)
    throw Error(ErrorCode::Order, "jet order " + std::to_string(order) + " outside [0, " +
                                      std::to_string(kMaxJetOrder) + "]");
}

}  // namespace

std::size_t jet_size(int order) {
  check_order(order);
  return tables().size_upto[order];
}

std::size_t jet_index(const MultiIndex& mu) {
  int deg = 0;
  for (int v : mu) {
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "negative multi-index entry");
    deg += v;
  }
  if (deg > kMaxJetOrder) throw Error(ErrorCode::Order, "multi-index degree exceeds maximum jet order");
  return static_cast<std::size_t>(tables().lookup[Tables::key(mu)]);
}

const MultiIndex& jet_multi_index(std::size_t index) { return tables().indices.at(index); }

Jet::Jet(int order, double value) : order_(order) {
  check_order(order);
  c_.assign(tables().size_upto[order], 0.0);
  c_[0] = value;
}

Jet Jet::variable(int order, int var, double at) {
  Jet j(order, at);
  if (order >= 1) {
    MultiIndex mu{0, 0, 0, 0};
    mu[var] = 1;
    j.c_[jet_index(mu)] = 1.0;
  }
  return j;
}

double Jet::coeff(const MultiIndex& mu) const {
  const std::size_t i = jet_index(mu);
  return i < c_.size() ? c_[i] : 0.0;
}

void Jet::set_coeff(const MultiIndex& mu, double v) {
  const std::size_t i = jet_index(mu);
  if (i >= c_.size()) throw Error(ErrorCode::Order, "coefficient beyond jet order");
  c_[i] = v;
}

double Jet::derivative(const MultiIndex& mu) const {
  double f = 1.0;
  for (int v : mu)
    for (int k = 2; k <= v; ++k) f *= k;
  return coeff(mu) * f;
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r(order);
  std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
  return r;
}

Jet Jet::diff(int var) const {
  if (order_ == 0) throw Error(ErrorCode::Order, "cannot differentiate an order-0 jet");
  Jet r(order_ - 1);
  const auto& d = tables().diffs[var];
  for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = d[i].factor * c_[d[i].from];
  return r;
}

Jet Jet::shifted() const {
  Jet r = *this;
  r.c_[0] = 0.0;
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) *this = truncated(o.order_);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  *this = *this / o;
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

double Jet::max_abs() const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  return m;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }

Jet operator*(const Jet& a, const Jet& b) {
  const int order = std::min(a.order(), b.order());
  Jet r(order);
  const auto& t = tables();
  const auto ac = a.coeffs();
  const auto bc = b.coeffs();
  auto rc = r.coeffs();
  const std::size_t n = t.products_upto[order];
  for (std::size_t k = 0; k < n; ++k) {
    const ProductTerm& p = t.products[k];
    rc[p.out] += ac[p.a] * bc[p.b];
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator+(Jet a, double s) { return a += s; }
Jet operator+(double s, Jet a) { return a += s; }
Jet operator-(Jet a, double s) { return a -= s; }
Jet operator-(double s, const Jet& a) { return (-a) += s; }
Jet operator*(Jet a, double s) { return a *= s; }
Jet operator*(double s, Jet a) { return a *= s; }
Jet operator/(Jet a, double s) { return a /= s; }
Jet operator/(double s, const Jet& a) { return reciprocal(a) *= s; }

Jet compose(const Jet& x, std::span<const double> derivatives) {
  const int K = x.order();
  if (static_cast<int>(derivatives.size()) < K + 1)
    throw Error(ErrorCode::Order, "compose: not enough derivatives supplied");
  // Horner on sum_n f^(n)(a)/n! h^n with nilpotent h.
  std::vector<double> taylor(K + 1);
  double fact = 1.0;
  for (int n = 0; n <= K; ++n) {
    if (n > 0) fact *= n;
    taylor[n] = derivatives[n] / fact;
  }
  const Jet h = x.shifted();
  Jet r(K, taylor[K]);
  for (int n = K - 1; n >= 0; --n) {
    r = r * h;
    r += taylor[n];
  }
  return r;
}

Jet reciprocal(const Jet& x) {
  const double a = x.value();
  if (a == 0.0 || !std::isfinite(a)) throw Error(ErrorCode::Domain, "division by a jet with zero value");
  std::vector<double> d(x.order() + 1);
  double p = 1.0 / a;
  for (int n = 0; n <= x.order(); ++n) {
    d[n] = p;
    p *= -(n + 1) / a;
  }
  return compose(x, d);
}

Jet exp(const Jet& x) {
  std::vector<double> d(x.order() + 1, std::exp(x.value()));
  return compose(x, d);
}

Jet log(const Jet& x) {
  const double a = x.value();
  if (!(a > 0.0)) throw Error(ErrorCode::Domain, "log of non-positive value " + std::to_string(a));
  std::vector<double> d(x.order() + 1);
  d[0] = std::log(a);
  double p = 1.0 / a;
  for (int n = 1; n <= x.order(); ++n) {
    d[n] = p;
    p *= -n / a;
  }
  return compose(x, d);
}

Jet sin(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  const double cyc[4] = {s, c, -s, -c};
  std::vector<double> d(x.order() + 1);
  for (int n = 0; n <= x.order(); ++n) d[n] = cyc[n % 4];
  return compose(x, d);
}

Jet cos(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  const double cyc[4] = {c, -s, -c, s};
  std::vector<double> d(x.order() + 1);
  for (int n = 0; n <= x.order(); ++n) d[n] = cyc[n % 4];
  return compose(x, d);
}

Jet pow(const Jet& x, double exponent) {
  const double a = x.value();
  if (!(a > 0.0)) throw Error(ErrorCode::Domain, "real power of non-positive value " + std::to_string(a));
  std::vector<double> d(x.order() + 1);
  double coef = 1.0;
  for (int n = 0; n <= x.order(); ++n) {
    d[n] = coef * std::pow(a, exponent - n);
    coef *= exponent - n;
  }
  return compose(x, d);
}

Jet sqrt(const Jet& x) {
  if (!(x.value() > 0.0)) {
    if (x.value() == 0.0 && x.order() == 0) return x;
    throw Error(ErrorCode::Domain, "sqrt of non-positive value " + std::to_string(x.value()));
  }
  return pow(x, 0.5);
}

Jet ipow(const Jet& x, int exponent) {
  if (exponent < 0) return reciprocal(ipow(x, -exponent));
  Jet result(x.order(), 1.0);
  Jet base = x;
  int e = exponent;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

JetMatrix4 identity_matrix(int order) {
  JetMatrix4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = Jet(order, i == j ? 1.0 : 0.0);
  return m;
}

JetMatrix4 multiply(const JetMatrix4& a, const JetMatrix4& b) {
  int order = kMaxJetOrder;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) order = std::min({order, a[i][j].order(), b[i][j].order()});
  JetMatrix4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Jet s(order);
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      r[i][j] = std::move(s);
    }
  return r;
}

JetMatrix4 inverse(const JetMatrix4& m) {
  int order = kMaxJetOrder;
  double scale = 0.0;
  for (const auto& row : m)
    for (const Jet& e : row) {
      order = std::min(order, e.order());
      scale = std::max(scale, std::abs(e.value()));
    }
  JetMatrix4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m[i][j].truncated(order);
  JetMatrix4 inv = identity_matrix(order);
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col].value()) > std::abs(a[piv][col].value())) piv = r;
    if (std::abs(a[piv][col].value()) <= 1e-14 * std::max(scale, 1e-300))
      throw Error(ErrorCode::Singular, "jet matrix has singular value part");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const Jet p = reciprocal(a[col][col]);
    for (int j = 0; j < 4; ++j) {
      a[col][j] = a[col][j] * p;
      inv[col][j] = inv[col][j] * p;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const Jet f = a[r][col];
      if (f.max_abs() == 0.0) continue;
      for (int j = 0; j < 4; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace rext
