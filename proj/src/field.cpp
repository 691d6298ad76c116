// SPDX-License-Identifier: Apache-2.0
#include "rext/field.hpp"

namespace rext {

ScalarField::ScalarField() : ScalarField(0.0) {}

ScalarField::ScalarField(Expr e)
    : eval_([e](const Point4& p, int order) { return e.eval_jet(p, order); }),
      description_(e.to_string()),
      zero_(e.is_zero_literal()),
      base_only_(!e.depends_on(2) && !e.depends_on(3)) {}

ScalarField::ScalarField(double c)
    : eval_([c](const Point4&, int order) { return Jet(order, c); }),
      description_(Expr(c).to_string()),
      zero_(c == 0.0) {}

ScalarField::ScalarField(Evaluator f, std::string description, bool zero, bool base_only)
    : eval_(std::move(f)), description_(std::move(description)), zero_(zero), base_only_(base_only) {}

ScalarField ScalarField::taylor_polynomial(const Point4& center, Jet coefficients, std::string description) {
  auto coeffs = std::make_shared<const Jet>(std::move(coefficients));
  ScalarField f(
      [center, coeffs](const Point4& p, int order) {
        const double d[4] = {p.x1 - center.x1, p.x2 - center.x2, p.y1 - center.y1, p.y2 - center.y2};
        if (d[0] == 0.0 && d[1] == 0.0 && d[2] == 0.0 && d[3] == 0.0) {
          if (order <= coeffs->order()) return coeffs->truncated(order);
          Jet r(order);
          for (std::size_t i = 0; i < coeffs->coeffs().size(); ++i) r.coeffs()[i] = coeffs->coeffs()[i];
          return r;
        }
        // Evaluate sum c_mu (d + h)^mu with jet arithmetic.
        Jet shift[4];
        for (int v = 0; v < 4; ++v) shift[v] = Jet::variable(order, v, d[v]);
        Jet r(order);
        const auto c = coeffs->coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (c[i] == 0.0) continue;
          const MultiIndex& mu = jet_multi_index(i);
          Jet term(order, c[i]);
          for (int v = 0; v < 4; ++v)
            if (mu[v] > 0) term = term * ipow(shift[v], mu[v]);
          r += term;
        }
        return r;
      },
      std::move(description));
  return f;
}

}  // namespace rext
