// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "rext/jet.hpp"
#include "rext/point.hpp"

namespace rext {

/// Named numeric constants that may appear in expressions (e.g. C12_1).
using ConstantTable = std::map<std::string, double, std::less<>>;

/// Immutable scalar expression tree over the coordinates x1, x2, y1, y2.
///
/// Grammar accepted by `parse`:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | atom ('^' ['-'] atom)?
///   atom   := NUMBER | IDENT | '(' expr ')' | FUNC '(' expr ')'
/// with FUNC in {exp, log, sin, cos, sqrt}. A literal integer exponent is
/// stored as a single integer-power node.
class Expr {
 public:
  enum class Kind { Number, Variable, Constant, Neg, Add, Sub, Mul, Div, Pow, IntPow, Exp, Log, Sin, Cos, Sqrt };

  struct Node;

  Expr();  // the literal 0
  Expr(double value);  // NOLINT(google-explicit-constructor): literals build naturally

  static Expr variable(int index);
  static Expr named(std::string name, double value);
  static Expr x1() { return variable(0); }
  static Expr x2() { return variable(1); }
  static Expr y1() { return variable(2); }
  static Expr y2() { return variable(3); }

  Kind kind() const;
  /// Total number of nodes in the tree.
  std::size_t node_count() const;
  /// True when the expression references coordinate `index`.
  bool depends_on(int index) const;
  /// True when the tree is a numeric literal equal to zero.
  bool is_zero_literal() const;

  Jet eval_jet(const Point4& p, int order) const;
  double eval(const Point4& p) const;

  /// Minimal-parenthesis rendering that `parse` maps back to the same tree.
  std::string to_string() const;

  const Node& node() const { return *node_; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& base, const Expr& exponent);
  friend Expr ipow(const Expr& base, int exponent);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr sqrt(const Expr& a);

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr unary(Kind k, const Expr& a);
  static Expr binary(Kind k, const Expr& a, const Expr& b);

  std::shared_ptr<const Node> node_;

  friend class ExprParser;
};

struct Expr::Node {
  Kind kind;
  double value = 0.0;  // Number, Constant
  int index = 0;       // Variable coordinate, IntPow exponent
  std::string name;    // Constant
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

/// Parses `text`; identifiers other than the coordinates must be present in
/// `constants`. Throws ParseError or Error(UnknownIdentifier).
Expr parse_expr(std::string_view text, const ConstantTable& constants = {});

}  // namespace rext
