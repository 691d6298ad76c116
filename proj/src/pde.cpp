// SPDX-License-Identifier: Apache-2.0
#include "rext/pde.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "rext/error.hpp"

namespace rext {

double StripGrid::h2() const { return 2 * std::numbers::pi / n2; }

int StripGrid::index(int i, int j) const {
  j %= n2;
  if (j < 0) j += n2;
  return i * n2 + j;
}

void StripGrid::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) throw Error(ErrorCode::InvalidArgument, "strip length must be positive");
  if (n1 < 4) throw Error(ErrorCode::InvalidArgument, "strip needs at least 4 steps in x1");
  if (n2 < 8 || n2 % 2 != 0) throw Error(ErrorCode::InvalidArgument, "periodic direction needs an even n2 >= 8");
}

const char* to_string(Stepper s) { return s == Stepper::RK2 ? "rk2" : "rk4"; }

namespace {

using Vec = std::vector<double>;

// Fourth-order periodic stencils in x2.
double d2(const double* f, int n, int j, double h) {
  auto at = [&](int k) { return f[((j + k) % n + n) % n]; };
  return (-at(2) + 8 * at(1) - 8 * at(-1) + at(-2)) / (12 * h);
}

double d22(const double* f, int n, int j, double h) {
  auto at = [&](int k) { return f[((j + k) % n + n) % n]; };
  return (-at(2) + 16 * at(1) - 30 * at(0) + 16 * at(-1) - at(-2)) / (12 * h * h);
}

std::array<BaseDerivatives, 6> gamma_at(const AffineSurface& s, double x1, double x2) {
  const ChristoffelJets g = christoffel_at(s, {x1, x2, 0.0, 0.0}, 1);
  const int idx[6][3] = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {0, 1, 1}, {1, 1, 0}, {1, 1, 1}};
  std::array<BaseDerivatives, 6> out;
  for (int n = 0; n < 6; ++n) {
    out[n] = BaseDerivatives::from_jet(g[idx[n][0]][idx[n][1]][idx[n][2]]);
    out[n].order = 1;
  }
  return out;
}

// State layout: xi (n2) [, alpha (n2), alpha_x1 (n2)].
class Marcher {
 public:
  Marcher(const AffineSurface& s, const StripGrid& g, bool with_alpha, const MarchOptions& opt)
      : s_(s), g_(g), with_alpha_(with_alpha), opt_(opt) {}

  Vec rhs(double x1, const Vec& u) const {
    const int n = g_.n2;
    const double h = g_.h2();
    Vec du(u.size());
    const double* xi = u.data();
    const double* a = with_alpha_ ? u.data() + n : nullptr;
    const double* b = with_alpha_ ? u.data() + 2 * n : nullptr;
    for (int j = 0; j < n; ++j) {
      PDEOperands ops;
      ops.gamma = gamma_at(s_, x1, g_.x2(j));
      ops.xi.v = xi[j];
      ops.xi.d01 = d2(xi, n, j, h);
      ops.xi.order = 1;
      du[j] = p1_eval(ops);  // P1 = -xi^(1,0) + rest
      if (!with_alpha_) continue;
      ops.alpha.v = a[j];
      ops.alpha.d10 = b[j];
      ops.alpha.d01 = d2(a, n, j, h);
      ops.alpha.d11 = d2(b, n, j, h);
      ops.alpha.d02 = d22(a, n, j, h);
      ops.alpha.d20 = 0.0;
      ops.alpha.order = 2;
      if (std::abs(a[j]) < opt_.alpha_floor)
        throw Error(ErrorCode::Numerical, "alpha fell below " + std::to_string(opt_.alpha_floor) + " at x1 = " +
                                              std::to_string(x1) + ", x2 = " + std::to_string(g_.x2(j)));
      du[n + j] = b[j];
      du[2 * n + j] = -p2_eval(ops) / a[j];
    }
    return du;
  }

  void check(double x1, const Vec& u) const {
    const int n = g_.n2;
    double xmax = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!std::isfinite(u[k]) || std::abs(u[k]) > opt_.cap)
        throw Error(ErrorCode::Numerical, "solution blew up before x1 = " + std::to_string(x1) + " (|value| > " +
                                              std::to_string(opt_.cap) + ")");
      if (static_cast<int>(k) < n) xmax = std::max(xmax, std::abs(u[k]));
    }
    if (xmax * g_.h1() / g_.h2() > opt_.cfl)
      throw Error(ErrorCode::Numerical, "CFL bound violated at x1 = " + std::to_string(x1) + ": |xi| h1/h2 = " +
                                            std::to_string(xmax * g_.h1() / g_.h2()));
  }

  Vec step(double x1, const Vec& u) const {
    const double h = g_.h1();
    auto axpy = [](const Vec& x, double s, const Vec& y) {
      Vec r(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) r[k] = x[k] + s * y[k];
      return r;
    };
    if (opt_.stepper == Stepper::RK2) {
      const Vec k1 = rhs(x1, u);
      const Vec k2 = rhs(x1 + h / 2, axpy(u, h / 2, k1));
      return axpy(u, h, k2);
    }
    const Vec k1 = rhs(x1, u);
    const Vec k2 = rhs(x1 + h / 2, axpy(u, h / 2, k1));
    const Vec k3 = rhs(x1 + h / 2, axpy(u, h / 2, k2));
    const Vec k4 = rhs(x1 + h, axpy(u, h, k3));
    Vec r(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) r[k] = u[k] + h / 6 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]);
    return r;
  }

 private:
  const AffineSurface& s_;
  StripGrid g_;
  bool with_alpha_;
  MarchOptions opt_;
};

Vec initial(const StripGrid& g, const Expr& e) {
  Vec v(g.n2);
  for (int j = 0; j < g.n2; ++j) v[j] = e.eval({0.0, g.x2(j), 0.0, 0.0});
  return v;
}

FieldOnGrid march(const AffineSurface& s, const CauchyData& data, const StripGrid& grid, bool with_alpha,
                  const MarchOptions& opt) {
  grid.validate();
  FieldOnGrid f;
  f.grid = grid;
  f.data = data;
  f.stepper = opt.stepper;
  const int n = grid.n2;
  f.xi.resize(grid.nodes());
  if (with_alpha) {
    f.alpha.resize(grid.nodes());
    f.alpha_x1.resize(grid.nodes());
  }
  Vec u = initial(grid, data.xi0);
  if (with_alpha) {
    const Vec a = initial(grid, data.alpha0), b = initial(grid, data.alpha1);
    u.insert(u.end(), a.begin(), a.end());
    u.insert(u.end(), b.begin(), b.end());
  }
  const Marcher m(s, grid, with_alpha, opt);
  for (int i = 0; i <= grid.n1; ++i) {
    m.check(grid.x1(i), u);
    for (int j = 0; j < n; ++j) {
      f.xi[grid.index(i, j)] = u[j];
      if (with_alpha) {
        f.alpha[grid.index(i, j)] = u[n + j];
        f.alpha_x1[grid.index(i, j)] = u[2 * n + j];
      }
    }
    if (i < grid.n1) u = m.step(grid.x1(i), u);
  }
  return f;
}

}  // namespace

FieldOnGrid solve_p1(const AffineSurface& s, const Expr& xi0, const StripGrid& grid, const MarchOptions& opt) {
  return march(s, {xi0, Expr(1.0), Expr(0.0)}, grid, false, opt);
}

FieldOnGrid solve_p2(const AffineSurface& s, const FieldOnGrid& xi, const Expr& alpha0, const Expr& alpha1,
                     const MarchOptions& opt) {
  CauchyData data = xi.data;
  data.alpha0 = alpha0;
  data.alpha1 = alpha1;
  FieldOnGrid f = march(s, data, xi.grid, true, opt);
  double diff = 0.0;
  for (std::size_t k = 0; k < f.xi.size(); ++k) diff = std::max(diff, std::abs(f.xi[k] - xi.xi[k]));
  if (xi.xi.size() != f.xi.size() || diff > 1e-12 * (1.0 + std::abs(diff)))
    throw Error(ErrorCode::InvalidArgument, "xi field does not match the first equation with its recorded Cauchy data");
  return f;
}

FieldOnGrid sample_fields(const StripGrid& grid, const Expr& xi, const Expr& alpha) {
  grid.validate();
  FieldOnGrid f;
  f.grid = grid;
  f.data = {xi, alpha, Expr(0.0)};
  f.xi.resize(grid.nodes());
  f.alpha.resize(grid.nodes());
  f.alpha_x1.resize(grid.nodes());
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j < grid.n2; ++j) {
      const Point4 p{grid.x1(i), grid.x2(j), 0.0, 0.0};
      f.xi[grid.index(i, j)] = xi.eval(p);
      const Jet a = alpha.eval_jet(p, 1);
      f.alpha[grid.index(i, j)] = a.value();
      f.alpha_x1[grid.index(i, j)] = a.derivative({1, 0, 0, 0});
    }
  return f;
}

ResidualReport grid_residuals(const AffineSurface& s, const FieldOnGrid& f) {
  const StripGrid& g = f.grid;
  const double h1 = g.h1(), h2 = g.h2();
  auto v = [&](const Vec& w, int i, int j) { return w[g.index(i, j)]; };
  auto d1 = [&](const Vec& w, int i, int j) {
    return (-v(w, i + 2, j) + 8 * v(w, i + 1, j) - 8 * v(w, i - 1, j) + v(w, i - 2, j)) / (12 * h1);
  };
  auto d11 = [&](const Vec& w, int i, int j) {
    return (-v(w, i + 2, j) + 16 * v(w, i + 1, j) - 30 * v(w, i, j) + 16 * v(w, i - 1, j) - v(w, i - 2, j)) /
           (12 * h1 * h1);
  };
  auto d2r = [&](const Vec& w, int i, int j) { return d2(w.data() + i * g.n2, g.n2, j, h2); };
  auto d22r = [&](const Vec& w, int i, int j) { return d22(w.data() + i * g.n2, g.n2, j, h2); };
  auto d12 = [&](const Vec& w, int i, int j) {
    return (-d2r(w, i + 2, j) + 8 * d2r(w, i + 1, j) - 8 * d2r(w, i - 1, j) + d2r(w, i - 2, j)) / (12 * h1);
  };
  ResidualReport r;
  for (int i = 2; i <= g.n1 - 2; ++i)
    for (int j = 0; j < g.n2; ++j) {
      PDEOperands ops;
      ops.gamma = gamma_at(s, g.x1(i), g.x2(j));
      ops.xi.v = v(f.xi, i, j);
      ops.xi.d10 = d1(f.xi, i, j);
      ops.xi.d01 = d2r(f.xi, i, j);
      ops.xi.order = 1;
      r.p1 = std::max(r.p1, std::abs(p1_eval(ops)));
      if (!f.has_alpha()) continue;
      ops.alpha.v = v(f.alpha, i, j);
      ops.alpha.d10 = d1(f.alpha, i, j);
      ops.alpha.d01 = d2r(f.alpha, i, j);
      ops.alpha.d20 = d11(f.alpha, i, j);
      ops.alpha.d11 = d12(f.alpha, i, j);
      ops.alpha.d02 = d22r(f.alpha, i, j);
      ops.alpha.order = 2;
      r.p2 = std::max(r.p2, std::abs(p2_eval(ops)));
    }
  return r;
}

namespace {

constexpr int kFitDegree = 4;

// Monomials u^a v^b with a + b <= 4, in a fixed order.
std::vector<std::array<int, 2>> fit_monomials() {
  std::vector<std::array<int, 2>> m;
  for (int d = 0; d <= kFitDegree; ++d)
    for (int a = d; a >= 0; --a) m.push_back({a, d - a});
  return m;
}

// Least-squares solution operator for the 5 x 5 stencil in unit coordinates.
const Eigen::MatrixXd& fit_operator() {
  static const Eigen::MatrixXd op = [] {
    const auto mono = fit_monomials();
    Eigen::MatrixXd a(25, mono.size());
    int row = 0;
    for (int di = -2; di <= 2; ++di)
      for (int dj = -2; dj <= 2; ++dj, ++row)
        for (std::size_t k = 0; k < mono.size(); ++k) a(row, k) = std::pow(di, mono[k][0]) * std::pow(dj, mono[k][1]);
    return Eigen::MatrixXd(a.completeOrthogonalDecomposition().pseudoInverse());
  }();
  return op;
}

}  // namespace

ScalarField local_fit(const FieldOnGrid& f, const std::vector<double>& values, int i, int j) {
  const StripGrid& g = f.grid;
  if (i < 2 || i > g.n1 - 2)
    throw Error(ErrorCode::Domain, "fit stencil at x1 index " + std::to_string(i) + " leaves the strip");
  if (values.size() != static_cast<std::size_t>(g.nodes()))
    throw Error(ErrorCode::InvalidArgument, "grid field has the wrong size");
  Eigen::VectorXd rhs(25);
  int row = 0;
  for (int di = -2; di <= 2; ++di)
    for (int dj = -2; dj <= 2; ++dj) rhs(row++) = values[g.index(i + di, j + dj)];
  const Eigen::VectorXd c = fit_operator() * rhs;
  const auto mono = fit_monomials();
  std::vector<double> coef(mono.size());
  for (std::size_t k = 0; k < mono.size(); ++k)
    coef[k] = c(k) / (std::pow(g.h1(), mono[k][0]) * std::pow(g.h2(), mono[k][1]));
  const double x10 = g.x1(i), x20 = g.x2(j);
  return ScalarField(
      [coef, mono, x10, x20](const Point4& p, int order) {
        const Jet u = Jet::variable(order, 0, p.x1) - x10;
        const Jet v = Jet::variable(order, 1, p.x2) - x20;
        Jet r(order, 0.0);
        for (std::size_t k = 0; k < mono.size(); ++k) r += coef[k] * (ipow(u, mono[k][0]) * ipow(v, mono[k][1]));
        return r;
      },
      "fit", false, true);
}

BachGridReport verify_bach_on_grid(const AffineSurface& s, const FieldOnGrid& f, const DeformationField& phi,
                                   std::span<const std::array<double, 2>> probes,
                                   std::span<const std::array<double, 2>> fibers) {
  if (!f.has_alpha()) throw Error(ErrorCode::InvalidArgument, "Bach verification needs a solved alpha field");
  const StripGrid& g = f.grid;
  BachGridReport r;
  for (const auto& q : probes) {
    const int i = std::clamp(static_cast<int>(std::lround(q[0] / g.h1())), 2, g.n1 - 2);
    const int j = static_cast<int>(std::lround(q[1] / g.h2()));
    const EndoField t = nilpotent_endo(local_fit(f, f.alpha, i, j), local_fit(f, f.xi, i, j), "fitted");
    const ExtensionMetric m(s, t, phi);
    std::vector<Point4> pts;
    for (const auto& y : fibers) pts.push_back({g.x1(i), g.x2(g.index(0, j)), y[0], y[1]});
    const BachScan b = bach_scan(m, pts);
    r.evaluations += static_cast<int>(pts.size());
    if (b.max_abs >= r.max_bach) {
      r.max_bach = b.max_abs;
      r.worst = b.worst;
    }
  }
  return r;
}

BachGridReport verify_bach_on_grid(const AffineSurface& s, const FieldOnGrid& f, const DeformationField& phi) {
  std::vector<std::array<double, 2>> probes;
  const double pi = std::numbers::pi;
  for (double a : {0.25, 0.5, 0.75})
    for (double b : {0.0, 0.5 * pi, pi, 1.5 * pi}) probes.push_back({a * f.grid.length, b});
  const std::array<std::array<double, 2>, 2> fibers{{{0.3, -0.2}, {-0.7, 0.5}}};
  return verify_bach_on_grid(s, f, phi, probes, fibers);
}

ConvergenceReport bach_convergence(const AffineSurface& s, const CauchyData& data, const StripGrid& coarse, int levels,
                                   const DeformationField& phi, const MarchOptions& opt) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "convergence study needs at least one level");
  ConvergenceReport out;
  StripGrid g = coarse;
  for (int k = 0; k < levels; ++k, g = g.refined()) {
    const FieldOnGrid xi = solve_p1(s, data.xi0, g, opt);
    const FieldOnGrid f = solve_p2(s, xi, data.alpha0, data.alpha1, opt);
    ConvergenceLevel lv{g, grid_residuals(s, f), verify_bach_on_grid(s, f, phi).max_bach};
    out.levels.push_back(lv);
  }
  for (std::size_t k = 0; k + 1 < out.levels.size(); ++k) {
    const auto& a = out.levels[k];
    const auto& b = out.levels[k + 1];
    out.bach_ratios.push_back(a.bach / b.bach);
    out.residual_ratios.push_back(std::max(a.residual.p1, a.residual.p2) / std::max(b.residual.p1, b.residual.p2));
  }
  return out;
}

UniquenessReport stepper_agreement(const AffineSurface& s, const CauchyData& data, const StripGrid& grid) {
  UniquenessReport r;
  StripGrid g = grid;
  for (int k = 0; k < 2; ++k, g = g.refined()) {
    FieldOnGrid sol[2];
    for (int m = 0; m < 2; ++m) {
      MarchOptions opt;
      opt.stepper = m == 0 ? Stepper::RK2 : Stepper::RK4;
      sol[m] = solve_p2(s, solve_p1(s, data.xi0, g, opt), data.alpha0, data.alpha1, opt);
    }
    for (std::size_t n = 0; n < sol[0].xi.size(); ++n) {
      r.xi_diff[k] = std::max(r.xi_diff[k], std::abs(sol[0].xi[n] - sol[1].xi[n]));
      r.alpha_diff[k] = std::max(r.alpha_diff[k], std::abs(sol[0].alpha[n] - sol[1].alpha[n]));
    }
  }
  r.xi_ratio = r.xi_diff[0] / r.xi_diff[1];
  r.alpha_ratio = r.alpha_diff[0] / r.alpha_diff[1];
  return r;
}

}  // namespace rext
