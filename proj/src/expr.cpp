// SPDX-License-Identifier: Apache-2.0
#include "rext/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

#include "rext/error.hpp"

namespace rext {
namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

constexpr const char* kCoordNames[4] = {"x1", "x2", "y1", "y2"};

NodePtr make_node(Expr::Node n) { return std::make_shared<const Expr::Node>(std::move(n)); }

Jet eval_node(const Expr::Node& n, const Point4& p, int order) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Number:
    case K::Constant: return Jet(order, n.value);
    case K::Variable: return Jet::variable(order, n.index, p[n.index]);
    case K::Neg: return -eval_node(*n.lhs, p, order);
    case K::Add: return eval_node(*n.lhs, p, order) + eval_node(*n.rhs, p, order);
    case K::Sub: return eval_node(*n.lhs, p, order) - eval_node(*n.rhs, p, order);
    case K::Mul: return eval_node(*n.lhs, p, order) * eval_node(*n.rhs, p, order);
    case K::Div: return eval_node(*n.lhs, p, order) / eval_node(*n.rhs, p, order);
    case K::IntPow: return ipow(eval_node(*n.lhs, p, order), n.index);
    case K::Pow: {
      const Jet base = eval_node(*n.lhs, p, order);
      const Jet e = eval_node(*n.rhs, p, order);
      bool constant_exponent = true;
      for (std::size_t i = 1; i < e.coeffs().size(); ++i)
        if (e.coeffs()[i] != 0.0) constant_exponent = false;
      if (constant_exponent) return pow(base, e.value());
      return exp(e * log(base));
    }
    case K::Exp: return exp(eval_node(*n.lhs, p, order));
    case K::Log: return log(eval_node(*n.lhs, p, order));
    case K::Sin: return sin(eval_node(*n.lhs, p, order));
    case K::Cos: return cos(eval_node(*n.lhs, p, order));
    case K::Sqrt: return sqrt(eval_node(*n.lhs, p, order));
  }
  throw Error(ErrorCode::InvalidArgument, "corrupt expression node");
}

std::size_t count_nodes(const Expr::Node& n) {
  std::size_t c = 1;
  if (n.lhs) c += count_nodes(*n.lhs);
  if (n.rhs) c += count_nodes(*n.rhs);
  return c;
}

bool node_depends(const Expr::Node& n, int index) {
  if (n.kind == Expr::Kind::Variable) return n.index == index;
  return (n.lhs && node_depends(*n.lhs, index)) || (n.rhs && node_depends(*n.rhs, index));
}

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

// Precedence levels: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom.
int precedence(const Expr::Node& n) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Add:
    case K::Sub: return 1;
    case K::Mul:
    case K::Div: return 2;
    case K::Neg: return 3;
    case K::Pow:
    case K::IntPow: return 4;
    case K::Number: return n.value < 0 ? 3 : 5;
    default: return 5;
  }
}

std::string render(const Expr::Node& n);

std::string wrap(const Expr::Node& n, bool parens) { return parens ? "(" + render(n) + ")" : render(n); }

std::string render(const Expr::Node& n) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Number: return format_number(n.value);
    case K::Constant: return n.name;
    case K::Variable: return kCoordNames[n.index];
    case K::Neg: return "-" + wrap(*n.lhs, precedence(*n.lhs) < 3);
    case K::Add: return render(*n.lhs) + " + " + wrap(*n.rhs, precedence(*n.rhs) <= 1);
    case K::Sub: return render(*n.lhs) + " - " + wrap(*n.rhs, precedence(*n.rhs) <= 1);
    case K::Mul: return wrap(*n.lhs, precedence(*n.lhs) < 2) + "*" + wrap(*n.rhs, precedence(*n.rhs) <= 2);
    case K::Div: return wrap(*n.lhs, precedence(*n.lhs) < 2) + "/" + wrap(*n.rhs, precedence(*n.rhs) <= 2);
    case K::IntPow: {
      std::string e = n.index < 0 ? "-" + std::to_string(-n.index) : std::to_string(n.index);
      return wrap(*n.lhs, precedence(*n.lhs) < 5) + "^" + e;
    }
    case K::Pow: {
      const auto& r = *n.rhs;
      std::string e;
      if (r.kind == K::Neg && precedence(*r.lhs) == 5)
        e = "-" + render(*r.lhs);
      else
        e = wrap(r, precedence(r) < 5);
      return wrap(*n.lhs, precedence(*n.lhs) < 5) + "^" + e;
    }
    case K::Exp: return "exp(" + render(*n.lhs) + ")";
    case K::Log: return "log(" + render(*n.lhs) + ")";
    case K::Sin: return "sin(" + render(*n.lhs) + ")";
    case K::Cos: return "cos(" + render(*n.lhs) + ")";
    case K::Sqrt: return "sqrt(" + render(*n.lhs) + ")";
  }
  return "?";
}

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) : node_(make_node(Node{Kind::Number, value, 0, {}, nullptr, nullptr})) {}

Expr Expr::variable(int index) {
  if (index < 0 || index > 3) throw Error(ErrorCode::InvalidArgument, "coordinate index out of range");
  return Expr(make_node(Node{Kind::Variable, 0.0, index, {}, nullptr, nullptr}));
}

Expr Expr::named(std::string name, double value) {
  return Expr(make_node(Node{Kind::Constant, value, 0, std::move(name), nullptr, nullptr}));
}

Expr Expr::unary(Kind k, const Expr& a) { return Expr(make_node(Node{k, 0.0, 0, {}, a.node_, nullptr})); }

Expr Expr::binary(Kind k, const Expr& a, const Expr& b) {
  return Expr(make_node(Node{k, 0.0, 0, {}, a.node_, b.node_}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
std::size_t Expr::node_count() const { return count_nodes(*node_); }
bool Expr::depends_on(int index) const { return node_depends(*node_, index); }
bool Expr::is_zero_literal() const { return node_->kind == Kind::Number && node_->value == 0.0; }

Jet Expr::eval_jet(const Point4& p, int order) const { return eval_node(*node_, p, order); }
double Expr::eval(const Point4& p) const { return eval_node(*node_, p, 0).value(); }
std::string Expr::to_string() const { return render(*node_); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Expr::Kind::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Expr::Kind::Neg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(Expr::Kind::Pow, base, exponent); }
Expr ipow(const Expr& base, int exponent) {
  return Expr(make_node(Expr::Node{Expr::Kind::IntPow, 0.0, exponent, {}, base.node_, nullptr}));
}
Expr exp(const Expr& a) { return Expr::unary(Expr::Kind::Exp, a); }
Expr log(const Expr& a) { return Expr::unary(Expr::Kind::Log, a); }
Expr sin(const Expr& a) { return Expr::unary(Expr::Kind::Sin, a); }
Expr cos(const Expr& a) { return Expr::unary(Expr::Kind::Cos, a); }
Expr sqrt(const Expr& a) { return Expr::unary(Expr::Kind::Sqrt, a); }

class ExprParser {
 public:
  ExprParser(std::string_view text, const ConstantTable& constants) : text_(text), constants_(constants) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = lhs + term();
      else if (accept('-'))
        lhs = lhs - term();
      else
        return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*'))
        lhs = lhs * factor();
      else if (accept('/'))
        lhs = lhs / factor();
      else
        return lhs;
    }
  }

  Expr factor() {
    if (accept('-')) return -factor();
    Expr base = atom();
    if (!accept('^')) return base;
    const bool negative = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    Expr e = atom();
    if (e.kind() == Expr::Kind::Number) {
      const double v = e.node().value;
      const double r = std::round(v);
      const bool literal_int = r == v && std::abs(v) <= 64 &&
                               text_.substr(start, pos_ - start).find_first_of(".eE") == std::string_view::npos;
      if (literal_int) return ipow(base, static_cast<int>(negative ? -r : r));
    }
    return pow(base, negative ? -e : e);
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return Expr(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    for (int i = 0; i < 4; ++i)
      if (name == kCoordNames[i]) return Expr::variable(i);
    static const std::pair<const char*, Expr (*)(const Expr&)> funcs[] = {
        {"exp", [](const Expr& a) { return exp(a); }},   {"log", [](const Expr& a) { return log(a); }},
        {"sin", [](const Expr& a) { return sin(a); }},   {"cos", [](const Expr& a) { return cos(a); }},
        {"sqrt", [](const Expr& a) { return sqrt(a); }},
    };
    for (const auto& [fname, fn] : funcs) {
      if (name == fname) {
        if (!accept('(')) throw ParseError("expected '(' after function " + name, pos_);
        Expr arg = expr();
        expect(')');
        return fn(arg);
      }
    }
    if (auto it = constants_.find(name); it != constants_.end()) return Expr::named(name, it->second);
    throw Error(ErrorCode::UnknownIdentifier,
                "unknown identifier '" + name + "' at position " + std::to_string(start));
  }

  std::string_view text_;
  const ConstantTable& constants_;
  std::size_t pos_ = 0;
};

Expr parse_expr(std::string_view text, const ConstantTable& constants) {
  return ExprParser(text, constants).parse();
}

}  // namespace rext
