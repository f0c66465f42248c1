// Minimal expression kernel: parse, differentiate, evaluate, compare by sampling.
//
// Expressions are immutable trees shared through reference counting. Variables
// are addressed by a slot index into a caller-owned layout (for algebroids the
// layout is x^1..x^m followed by y^1..y^p), so evaluation takes a flat point.
#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lagroid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class UndeclaredIdentifier : public ParseError {
 public:
  UndeclaredIdentifier(const std::string& name, std::size_t offset)
      : ParseError("undeclared identifier '" + name + "'", offset), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Raised when an expression is evaluated outside its domain (log of a
/// non-positive number, division by zero, non-finite intermediate).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UndecidableError : public Error {
 public:
  using Error::Error;
};

enum class Op { constant, variable, add, mul, div, pow, neg, func };
enum class Func { sin, cos, tan, exp, log, sqrt };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::tan: return "tan";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

class Expr;

namespace detail {
struct Node;
}

class Expr {
 public:
  Expr();  // the constant 0
  Expr(double c);  // NOLINT: constants convert implicitly so formulas read naturally

  static Expr variable(int slot, std::string name);

  Op op() const;
  double value() const;
  int slot() const;
  const std::string& name() const;
  Func func() const;
  // Children: lhs/rhs for binary nodes, lhs alone for unary ones.
  Expr lhs() const;
  Expr rhs() const;
  /// Exponent of a pow node.
  double exponent() const;

  bool is_constant() const { return op() == Op::constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// Evaluates at a point indexed by variable slot. Throws DomainError
  /// instead of ever returning a non-finite value.
  double eval(std::span<const double> point) const;

 private:
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::Node> node_;

  friend Expr make_node(Op, double, int, std::string, Func, Expr, Expr);
};

namespace detail {
struct Node {
  Op op = Op::constant;
  double value = 0.0;  // constant value or pow exponent
  int slot = -1;
  std::string name;
  Func func = Func::sin;
  std::shared_ptr<const Node> a, b;
};

double eval_node(const Node& n, std::span<const double> point);
}  // namespace detail

inline Expr make_node(Op op, double value, int slot, std::string name, Func f, Expr a, Expr b) {
  auto n = std::make_shared<detail::Node>();
  n->op = op;
  n->value = value;
  n->slot = slot;
  n->name = std::move(name);
  n->func = f;
  n->a = std::move(a.node_);
  n->b = std::move(b.node_);
  return Expr(std::shared_ptr<const detail::Node>(std::move(n)));
}

namespace detail {
inline const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> z = std::make_shared<const Node>();
  return z;
}
}  // namespace detail

inline Expr::Expr() : node_(detail::zero_node()) {}

inline Expr::Expr(double c) {
  if (c == 0.0) {
    node_ = detail::zero_node();
  } else {
    auto n = std::make_shared<detail::Node>();
    n->value = c;
    node_ = std::move(n);
  }
}

inline Expr Expr::variable(int slot, std::string name) {
  return make_node(Op::variable, 0.0, slot, std::move(name), Func::sin, {}, {});
}

inline Op Expr::op() const { return node_->op; }
inline double Expr::value() const { return node_->value; }
inline int Expr::slot() const { return node_->slot; }
inline const std::string& Expr::name() const { return node_->name; }
inline Func Expr::func() const { return node_->func; }
inline Expr Expr::lhs() const { return Expr(node_->a); }
inline Expr Expr::rhs() const { return Expr(node_->b); }
inline double Expr::exponent() const { return node_->value; }

// ---------------------------------------------------------------------------
// Pointwise arithmetic with domain checks, shared by folding and evaluation.

namespace detail {

inline double checked(double r, const char* what) {
  if (!std::isfinite(r)) throw DomainError(std::string("non-finite result in ") + what);
  return r;
}

inline double apply_func(Func f, double x) {
  switch (f) {
    case Func::sin: return checked(std::sin(x), "sin");
    case Func::cos: return checked(std::cos(x), "cos");
    case Func::tan: return checked(std::tan(x), "tan");
    case Func::exp: return checked(std::exp(x), "exp");
    case Func::log:
      if (!(x > 0.0)) throw DomainError("log of non-positive argument");
      return checked(std::log(x), "log");
    case Func::sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(x);
  }
  return 0.0;
}

inline bool is_integer(double k) { return std::floor(k) == k; }

inline double apply_pow(double base, double k) {
  if (base < 0.0 && !is_integer(k)) throw DomainError("non-integer power of negative base");
  if (base == 0.0 && k < 0.0) throw DomainError("division by zero in power");
  return checked(std::pow(base, k), "pow");
}

inline double apply_div(double a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return checked(a / b, "quotient");
}

// Folds only when the result is a valid finite constant; otherwise the node
// stays symbolic and the error surfaces at evaluation time.
template <class F>
bool try_fold(F&& f, double& out) {
  try {
    out = f();
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Smart constructors. Each applies local constant folding, so every Expr built
// through them is already in folded form.

inline Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.value());
  if (a.op() == Op::neg) return a.lhs();
  return make_node(Op::neg, 0.0, -1, {}, Func::sin, a, {});
}

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return make_node(Op::add, 0.0, -1, {}, Func::sin, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() * b.value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (b.is_constant()) return b * a;
  if (a.is_constant(1.0)) return b;
  if (a.is_constant(-1.0)) return -b;
  if (a.is_constant() && b.op() == Op::mul && b.lhs().is_constant())
    return Expr(a.value() * b.lhs().value()) * b.rhs();
  return make_node(Op::mul, 0.0, -1, {}, Func::sin, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant(0.0)) return make_node(Op::div, 0.0, -1, {}, Func::sin, a, b);
  if (a.is_constant() && b.is_constant()) return Expr(a.value() / b.value());
  if (a.is_constant(0.0)) return Expr(0.0);
  if (b.is_constant()) return Expr(1.0 / b.value()) * a;
  return make_node(Op::div, 0.0, -1, {}, Func::sin, a, b);
}

inline Expr pow(const Expr& a, double k) {
  if (k == 0.0) return Expr(1.0);
  if (k == 1.0) return a;
  if (a.is_constant()) {
    double r = 0.0;
    if (detail::try_fold([&] { return detail::apply_pow(a.value(), k); }, r)) return Expr(r);
  }
  return make_node(Op::pow, k, -1, {}, Func::sin, a, {});
}

inline Expr apply(Func f, const Expr& a) {
  if (a.is_constant()) {
    double r = 0.0;
    if (detail::try_fold([&] { return detail::apply_func(f, a.value()); }, r)) return Expr(r);
  }
  return make_node(Op::func, 0.0, -1, {}, f, a, {});
}

inline Expr sin(const Expr& a) { return apply(Func::sin, a); }
inline Expr cos(const Expr& a) { return apply(Func::cos, a); }
inline Expr tan(const Expr& a) { return apply(Func::tan, a); }
inline Expr exp(const Expr& a) { return apply(Func::exp, a); }
inline Expr log(const Expr& a) { return apply(Func::log, a); }
inline Expr sqrt(const Expr& a) { return apply(Func::sqrt, a); }

namespace detail {
inline double eval_node(const Node& n, std::span<const double> point) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable:
      if (n.slot < 0 || static_cast<std::size_t>(n.slot) >= point.size())
        throw Error("variable '" + n.name + "' has no value at this point");
      return point[static_cast<std::size_t>(n.slot)];
    case Op::add: return checked(eval_node(*n.a, point) + eval_node(*n.b, point), "sum");
    case Op::mul: return checked(eval_node(*n.a, point) * eval_node(*n.b, point), "product");
    case Op::div: return apply_div(eval_node(*n.a, point), eval_node(*n.b, point));
    case Op::pow: return apply_pow(eval_node(*n.a, point), n.value);
    case Op::neg: return -eval_node(*n.a, point);
    case Op::func: return apply_func(n.func, eval_node(*n.a, point));
  }
  return 0.0;
}
}  // namespace detail

inline double Expr::eval(std::span<const double> point) const { return detail::eval_node(*node_, point); }

// ---------------------------------------------------------------------------
// Structural queries and rewrites.

/// Structural equality (same tree shape, same constants bit for bit).
inline bool same(const Expr& a, const Expr& b) {
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::constant: return a.value() == b.value();
    case Op::variable: return a.slot() == b.slot();
    case Op::add:
    case Op::mul:
    case Op::div: return same(a.lhs(), b.lhs()) && same(a.rhs(), b.rhs());
    case Op::pow: return a.exponent() == b.exponent() && same(a.lhs(), b.lhs());
    case Op::neg: return same(a.lhs(), b.lhs());
    case Op::func: return a.func() == b.func() && same(a.lhs(), b.lhs());
  }
  return false;
}

inline void collect_slots(const Expr& e, std::set<int>& out) {
  switch (e.op()) {
    case Op::constant: return;
    case Op::variable: out.insert(e.slot()); return;
    case Op::add:
    case Op::mul:
    case Op::div:
      collect_slots(e.lhs(), out);
      collect_slots(e.rhs(), out);
      return;
    case Op::pow:
    case Op::neg:
    case Op::func: collect_slots(e.lhs(), out); return;
  }
}

inline std::set<int> free_slots(const Expr& e) {
  std::set<int> s;
  collect_slots(e, s);
  return s;
}

inline bool depends_on(const Expr& e, int slot) { return free_slots(e).count(slot) != 0; }

/// Rebuilds the tree through the folding constructors.
inline Expr fold(const Expr& e) {
  switch (e.op()) {
    case Op::constant:
    case Op::variable: return e;
    case Op::add: return fold(e.lhs()) + fold(e.rhs());
    case Op::mul: return fold(e.lhs()) * fold(e.rhs());
    case Op::div: return fold(e.lhs()) / fold(e.rhs());
    case Op::pow: return pow(fold(e.lhs()), e.exponent());
    case Op::neg: return -fold(e.lhs());
    case Op::func: return apply(e.func(), fold(e.lhs()));
  }
  return e;
}

namespace detail {

inline void gather_factors(const Expr& e, double& coeff, std::vector<Expr>& factors);

}  // namespace detail

/// Display normal form: products are flattened and their numeric factors
/// merged into one leading coefficient. Values agree with `e` up to rounding.
inline Expr tidy(const Expr& e) {
  switch (e.op()) {
    case Op::constant:
    case Op::variable: return e;
    case Op::add: return tidy(e.lhs()) + tidy(e.rhs());
    case Op::div: return tidy(e.lhs()) / tidy(e.rhs());
    case Op::pow: return pow(tidy(e.lhs()), e.exponent());
    case Op::func: return apply(e.func(), tidy(e.lhs()));
    case Op::neg:
    case Op::mul: {
      double coeff = 1.0;
      std::vector<Expr> factors;
      detail::gather_factors(e, coeff, factors);
      Expr prod(1.0);
      for (const auto& f : factors) prod = prod.is_constant(1.0) ? f : make_node(Op::mul, 0.0, -1, {}, Func::sin, prod, f);
      return Expr(coeff) * prod;
    }
  }
  return e;
}

namespace detail {

inline void gather_factors(const Expr& e, double& coeff, std::vector<Expr>& factors) {
  if (e.is_constant()) {
    coeff *= e.value();
  } else if (e.op() == Op::neg) {
    coeff = -coeff;
    gather_factors(e.lhs(), coeff, factors);
  } else if (e.op() == Op::mul) {
    gather_factors(e.lhs(), coeff, factors);
    gather_factors(e.rhs(), coeff, factors);
  } else {
    Expr t = tidy(e);
    if (t.op() == Op::mul || t.op() == Op::neg || t.is_constant())
      gather_factors(t, coeff, factors);
    else
      factors.push_back(t);
  }
}

}  // namespace detail

inline Expr substitute(const Expr& e, int slot, const Expr& with) {
  switch (e.op()) {
    case Op::constant: return e;
    case Op::variable: return e.slot() == slot ? with : e;
    case Op::add: return substitute(e.lhs(), slot, with) + substitute(e.rhs(), slot, with);
    case Op::mul: return substitute(e.lhs(), slot, with) * substitute(e.rhs(), slot, with);
    case Op::div: return substitute(e.lhs(), slot, with) / substitute(e.rhs(), slot, with);
    case Op::pow: return pow(substitute(e.lhs(), slot, with), e.exponent());
    case Op::neg: return -substitute(e.lhs(), slot, with);
    case Op::func: return apply(e.func(), substitute(e.lhs(), slot, with));
  }
  return e;
}

/// Exact partial derivative with respect to the variable in `slot`.
inline Expr diff(const Expr& e, int slot) {
  switch (e.op()) {
    case Op::constant: return Expr(0.0);
    case Op::variable: return Expr(e.slot() == slot ? 1.0 : 0.0);
    default: break;
  }
  if (!depends_on(e, slot)) return Expr(0.0);
  const Expr& a = e.lhs();
  switch (e.op()) {
    case Op::add: return diff(a, slot) + diff(e.rhs(), slot);
    case Op::neg: return -diff(a, slot);
    case Op::mul: return diff(a, slot) * e.rhs() + a * diff(e.rhs(), slot);
    case Op::div: {
      const Expr& b = e.rhs();
      Expr db = diff(b, slot);
      if (db.is_constant(0.0)) return diff(a, slot) / b;
      return (diff(a, slot) * b - a * db) / pow(b, 2.0);
    }
    case Op::pow: return Expr(e.exponent()) * pow(a, e.exponent() - 1.0) * diff(a, slot);
    case Op::func: {
      Expr da = diff(a, slot);
      switch (e.func()) {
        case Func::sin: return cos(a) * da;
        case Func::cos: return -(sin(a) * da);
        case Func::tan: return (Expr(1.0) + pow(tan(a), 2.0)) * da;
        case Func::exp: return e * da;
        case Func::log: return da / a;
        case Func::sqrt: return da / (Expr(2.0) * e);
      }
      break;
    }
    default: break;
  }
  return Expr(0.0);
}

// ---------------------------------------------------------------------------
// Printing. The output uses the parser's grammar, so text round-trips.

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::add: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    case Op::constant: return e.value() < 0.0 ? 3 : 5;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that still round-trips.
  for (int digits = 1; digits < 17; ++digits) {
    char shorter[40];
    std::snprintf(shorter, sizeof shorter, "%.*g", digits, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

inline void print_to(const Expr& e, std::string& out);

inline void print_child(const Expr& child, int min_prec, std::string& out) {
  if (precedence(child) < min_prec) {
    out += '(';
    print_to(child, out);
    out += ')';
  } else {
    print_to(child, out);
  }
}

inline void print_to(const Expr& e, std::string& out) {
  switch (e.op()) {
    case Op::constant: out += format_number(e.value()); return;
    case Op::variable: out += e.name(); return;
    case Op::add:
      print_child(e.lhs(), 1, out);
      if (e.rhs().op() == Op::neg) {
        out += " - ";
        print_child(e.rhs().lhs(), 2, out);
      } else if (e.rhs().is_constant() && e.rhs().value() < 0) {
        out += " - ";
        out += format_number(-e.rhs().value());
      } else if (e.rhs().op() == Op::mul && e.rhs().lhs().is_constant() && e.rhs().lhs().value() < 0) {
        out += " - ";
        out += format_number(-e.rhs().lhs().value());
        out += '*';
        print_child(e.rhs().rhs(), 3, out);
      } else {
        out += " + ";
        print_child(e.rhs(), 2, out);
      }
      return;
    case Op::mul:
      print_child(e.lhs(), 2, out);
      out += '*';
      print_child(e.rhs(), 3, out);
      return;
    case Op::div:
      print_child(e.lhs(), 2, out);
      out += '/';
      print_child(e.rhs(), 3, out);
      return;
    case Op::neg:
      out += '-';
      print_child(e.lhs(), 3, out);
      return;
    case Op::pow:
      print_child(e.lhs(), 5, out);
      out += '^';
      print_child(Expr(e.exponent()), 5, out);
      return;
    case Op::func:
      out += func_name(e.func());
      out += '(';
      print_to(e.lhs(), out);
      out += ')';
      return;
  }
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
  std::string s;
  detail::print_to(e, s);
  return s;
}

// ---------------------------------------------------------------------------
// Parsing.

/// Ordered variable names; a name's position is its evaluation slot.
class Symbols {
 public:
  Symbols() = default;
  explicit Symbols(std::vector<std::string> names) : names_(std::move(names)) {}

  int declare(const std::string& name) {
    if (index_of(name) >= 0) throw Error("duplicate variable '" + name + "'");
    names_.push_back(name);
    return static_cast<int>(names_.size()) - 1;
  }
  int index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return static_cast<int>(i);
    return -1;
  }
  Expr var(std::string_view name) const {
    int i = index_of(name);
    if (i < 0) throw Error("unknown variable '" + std::string(name) + "'");
    return Expr::variable(i, std::string(name));
  }
  Expr var(int slot) const { return Expr::variable(slot, names_.at(static_cast<std::size_t>(slot))); }
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

using Parameters = std::map<std::string, double, std::less<>>;

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const Symbols& symbols, const Parameters& params)
      : text_(text), symbols_(symbols), params_(params) {}

  Expr parse() {
    Expr e = expression();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      skip_space();
      std::size_t at = pos_;
      Expr k = unary();
      if (!k.is_constant()) throw ParseError("exponent must be a constant", at);
      return pow(base, k.value());
    }
    return base;
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("expected operand", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [end, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || end != text_.data() + pos_) throw ParseError("malformed number", start);
    return Expr(v);
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      static constexpr Func funcs[] = {Func::sin, Func::cos, Func::tan, Func::exp, Func::log, Func::sqrt};
      for (Func f : funcs) {
        if (name == func_name(f)) {
          ++pos_;
          Expr arg = expression();
          if (!accept(')')) throw ParseError("expected ')'", pos_);
          return apply(f, arg);
        }
      }
      throw ParseError("unknown function '" + std::string(name) + "'", start);
    }
    if (auto it = params_.find(name); it != params_.end()) return Expr(it->second);
    int slot = symbols_.index_of(name);
    if (slot < 0) throw UndeclaredIdentifier(std::string(name), start);
    return Expr::variable(slot, std::string(name));
  }

  std::string_view text_;
  const Symbols& symbols_;
  const Parameters& params_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses infix text. Parameters are substituted as constants before any
/// symbol lookup.
inline Expr parse(std::string_view text, const Symbols& symbols, const Parameters& params = {}) {
  return detail::Parser(text, symbols, params).parse();
}

// ---------------------------------------------------------------------------
// Sampled decisions.

struct Interval {
  double lo = -2.0;
  double hi = 2.0;
};

struct SampleDomain {
  std::vector<Interval> intervals;  // by slot; slots past the end use `fallback`
  Interval fallback{};
  int samples = 32;
  std::uint64_t seed = 0;
  double atol = 1e-9;
  double rtol = 1e-9;

  Interval interval(int slot) const {
    if (slot >= 0 && static_cast<std::size_t>(slot) < intervals.size()) return intervals[static_cast<std::size_t>(slot)];
    return fallback;
  }

  void check() const {
    if (samples < 8) throw Error("sample domain needs at least 8 samples");
    auto ok = [](const Interval& i) { return i.hi > i.lo && std::isfinite(i.lo) && std::isfinite(i.hi); };
    if (!ok(fallback)) throw Error("degenerate sample interval");
    for (const auto& i : intervals)
      if (!ok(i)) throw Error("degenerate sample interval");
  }
};

/// Deterministic stream of sample points for one domain.
class Sampler {
 public:
  Sampler(const SampleDomain& d, int nvars) : domain_(d), nvars_(nvars), rng_(d.seed) { d.check(); }

  std::vector<double> next() {
    std::vector<double> pt(static_cast<std::size_t>(nvars_));
    for (int s = 0; s < nvars_; ++s) {
      Interval iv = domain_.interval(s);
      std::uniform_real_distribution<double> u(iv.lo, iv.hi);
      pt[static_cast<std::size_t>(s)] = u(rng_);
    }
    return pt;
  }

 private:
  const SampleDomain& domain_;
  int nvars_;
  std::mt19937_64 rng_;
};

inline constexpr int kMaxResamples = 3;

/// Calls `fn(point)` at `d.samples` points. A point where `fn` raises a
/// DomainError is redrawn at most three times before the whole decision
/// is declared undecidable.
template <class Fn>
void for_each_sample(const SampleDomain& d, int nvars, Fn&& fn) {
  Sampler sampler(d, nvars);
  for (int i = 0; i < d.samples; ++i) {
    for (int attempt = 0;; ++attempt) {
      std::vector<double> pt = sampler.next();
      try {
        fn(std::span<const double>(pt));
        break;
      } catch (const DomainError& e) {
        if (attempt >= kMaxResamples) throw UndecidableError(std::string("undecidable on domain: ") + e.what());
      }
    }
  }
}

inline int slot_count(std::span<const Expr> exprs) {
  int n = 0;
  for (const auto& e : exprs) {
    auto s = free_slots(e);
    if (!s.empty()) n = std::max(n, *s.rbegin() + 1);
  }
  return n;
}

struct SampledVerdict {
  bool passed = true;
  double residual = 0.0;
  explicit operator bool() const { return passed; }
};

inline SampledVerdict equal_sampled(const Expr& a, const Expr& b, const SampleDomain& d) {
  const Expr both[] = {a, b};
  SampledVerdict v;
  for_each_sample(d, slot_count(both), [&](std::span<const double> pt) {
    double va = a.eval(pt), vb = b.eval(pt);
    double r = std::abs(va - vb);
    v.residual = std::max(v.residual, r);
    if (r > d.atol + d.rtol * std::max(std::abs(va), std::abs(vb))) v.passed = false;
  });
  return v;
}

/// Largest |e| over the domain for a family of expressions.
inline double max_abs_sampled(std::span<const Expr> exprs, const SampleDomain& d, int nvars = -1) {
  if (nvars < 0) nvars = slot_count(exprs);
  double worst = 0.0;
  for_each_sample(d, nvars, [&](std::span<const double> pt) {
    for (const auto& e : exprs) worst = std::max(worst, std::abs(e.eval(pt)));
  });
  return worst;
}

/// `exprs ≡ 0` decided against an absolute threshold.
inline SampledVerdict zero_sampled(std::span<const Expr> exprs, const SampleDomain& d, double threshold, int nvars = -1) {
  double r = max_abs_sampled(exprs, d, nvars);
  return {r <= threshold, r};
}

}  // namespace lagroid
