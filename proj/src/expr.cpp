#include "graze/expr.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace graze {

void Smooth1D::taylor(double x, int order, std::span<double> out) const {
  // Fallback: walk the derivative chain. Implementations with sharper
  // recurrences override this.
  SmoothPtr f = derivative();
  out[0] = value(x);
  double fact = 1.0;
  for (int j = 1; j <= order; ++j) {
    fact *= j;
    out[j] = f->value(x) / fact;
    if (j < order) f = f->derivative();
  }
}

using Kind = NodeKind;

namespace {

using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = v;
  return n;
}

const NodePtr& zero_node() {
  static const NodePtr z = make_const(0.0);
  return z;
}
const NodePtr& one_node() {
  static const NodePtr o = make_const(1.0);
  return o;
}

bool is_const(const NodePtr& n, double* v = nullptr) {
  if (n->kind != Kind::Const) return false;
  if (v) *v = n->value;
  return true;
}
bool is_const_value(const NodePtr& n, double v) {
  return n->kind == Kind::Const && n->value == v;
}

// True when evaluation can never raise a DomainError, so algebraic
// identities like 0*e -> 0 are safe to fold.
bool is_total(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Const:
    case Kind::Variable:
    case Kind::Param:
      return true;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
      return is_total(n->a) && is_total(n->b);
    case Kind::Neg:
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Exp:
      return is_total(n->a);
    case Kind::Pow:
      return n->int_exponent && n->value >= 0 && is_total(n->a);
    case Kind::Builtin:
      return is_total(n->a);
    default:
      return false;
  }
}

double eval_node(const Node& n, double x, double y, const Params& params);

double checked_pow(double base, double expo, bool int_expo) {
  if (int_expo) {
    if (base == 0.0 && expo < 0) throw DomainError("0 raised to a negative power");
    return std::pow(base, expo);
  }
  if (base < 0.0) throw DomainError("negative base with non-integer exponent");
  if (base == 0.0 && expo < 0) throw DomainError("0 raised to a negative power");
  return std::pow(base, expo);
}

NodePtr make_unary(Kind k, NodePtr a) {
  double av;
  if (is_const(a, &av)) {
    switch (k) {
      case Kind::Neg: return make_const(-av);
      case Kind::Sin: return make_const(std::sin(av));
      case Kind::Cos: return make_const(std::cos(av));
      case Kind::Exp: return make_const(std::exp(av));
      case Kind::Sqrt:
        if (av >= 0) return make_const(std::sqrt(av));
        break;  // keep node, error at eval time
      case Kind::Ln:
        if (av > 0) return make_const(std::log(av));
        break;
      default: break;
    }
  }
  if (k == Kind::Neg && a->kind == Kind::Neg) return a->a;
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
  double av, bv;
  if (is_const(a, &av) && is_const(b, &bv)) {
    switch (k) {
      case Kind::Add: return make_const(av + bv);
      case Kind::Sub: return make_const(av - bv);
      case Kind::Mul: return make_const(av * bv);
      case Kind::Div:
        if (bv != 0.0) return make_const(av / bv);
        break;
      default: break;
    }
  }
  switch (k) {
    case Kind::Add:
      if (is_const_value(a, 0.0)) return b;
      if (is_const_value(b, 0.0)) return a;
      break;
    case Kind::Sub:
      if (is_const_value(b, 0.0)) return a;
      if (is_const_value(a, 0.0)) return make_unary(Kind::Neg, b);
      break;
    case Kind::Mul:
      if (is_const_value(a, 0.0) && is_total(b)) return zero_node();
      if (is_const_value(b, 0.0) && is_total(a)) return zero_node();
      if (is_const_value(a, 1.0)) return b;
      if (is_const_value(b, 1.0)) return a;
      break;
    case Kind::Div:
      if (is_const_value(b, 1.0)) return a;
      if (is_const_value(a, 0.0) && is_total(b)) break;  // 0/e still errors at e=0
      break;
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_pow(NodePtr base, double expo) {
  bool int_expo = expo == std::floor(expo) && std::abs(expo) < 1e15;
  if (expo == 1.0) return base;
  if (expo == 0.0 && is_total(base)) return one_node();
  double bv;
  if (is_const(base, &bv)) {
    try {
      return make_const(checked_pow(bv, expo, int_expo));
    } catch (const DomainError&) {
      // keep the node; evaluation will raise
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->a = std::move(base);
  n->value = expo;
  n->int_exponent = int_expo;
  return n;
}

double eval_node(const Node& n, double x, double y, const Params& params) {
  switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Variable: return n.var == Var::X ? x : y;
    case Kind::Param: {
      auto it = params.find(n.param);
      if (it == params.end()) throw DomainError("unbound parameter: " + n.param);
      return it->second;
    }
    case Kind::Add: return eval_node(*n.a, x, y, params) + eval_node(*n.b, x, y, params);
    case Kind::Sub: return eval_node(*n.a, x, y, params) - eval_node(*n.b, x, y, params);
    case Kind::Mul: return eval_node(*n.a, x, y, params) * eval_node(*n.b, x, y, params);
    case Kind::Div: {
      double num = eval_node(*n.a, x, y, params);
      double den = eval_node(*n.b, x, y, params);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Kind::Neg: return -eval_node(*n.a, x, y, params);
    case Kind::Sin: return std::sin(eval_node(*n.a, x, y, params));
    case Kind::Cos: return std::cos(eval_node(*n.a, x, y, params));
    case Kind::Exp: return std::exp(eval_node(*n.a, x, y, params));
    case Kind::Sqrt: {
      double v = eval_node(*n.a, x, y, params);
      if (v < 0.0) throw DomainError("sqrt of a negative value");
      return std::sqrt(v);
    }
    case Kind::Ln: {
      double v = eval_node(*n.a, x, y, params);
      if (v <= 0.0) throw DomainError("log of a non-positive value");
      return std::log(v);
    }
    case Kind::Pow:
      return checked_pow(eval_node(*n.a, x, y, params), n.value, n.int_exponent);
    case Kind::Builtin:
      return n.fn->value(eval_node(*n.a, x, y, params));
  }
  throw std::logic_error("unreachable expr kind");
}

NodePtr diff_node(const NodePtr& n, Var var);

NodePtr diff_node(const NodePtr& n, Var var) {
  switch (n->kind) {
    case Kind::Const:
    case Kind::Param:
      return zero_node();
    case Kind::Variable:
      return n->var == var ? one_node() : zero_node();
    case Kind::Add:
      return make_binary(Kind::Add, diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Sub:
      return make_binary(Kind::Sub, diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Mul:
      return make_binary(
          Kind::Add,
          make_binary(Kind::Mul, diff_node(n->a, var), n->b),
          make_binary(Kind::Mul, n->a, diff_node(n->b, var)));
    case Kind::Div:
      // (a/b)' = a'/b - a b'/b^2
      return make_binary(
          Kind::Sub,
          make_binary(Kind::Div, diff_node(n->a, var), n->b),
          make_binary(Kind::Div,
                      make_binary(Kind::Mul, n->a, diff_node(n->b, var)),
                      make_pow(n->b, 2.0)));
    case Kind::Neg:
      return make_unary(Kind::Neg, diff_node(n->a, var));
    case Kind::Sin:
      return make_binary(Kind::Mul, make_unary(Kind::Cos, n->a), diff_node(n->a, var));
    case Kind::Cos:
      return make_unary(Kind::Neg,
                        make_binary(Kind::Mul, make_unary(Kind::Sin, n->a),
                                    diff_node(n->a, var)));
    case Kind::Exp:
      return make_binary(Kind::Mul, make_unary(Kind::Exp, n->a), diff_node(n->a, var));
    case Kind::Sqrt:
      // (sqrt a)' = a' / (2 sqrt a)
      return make_binary(Kind::Div, diff_node(n->a, var),
                         make_binary(Kind::Mul, make_const(2.0),
                                     make_unary(Kind::Sqrt, n->a)));
    case Kind::Ln:
      return make_binary(Kind::Div, diff_node(n->a, var), n->a);
    case Kind::Pow:
      // (a^c)' = c a^(c-1) a'
      return make_binary(
          Kind::Mul, make_const(n->value),
          make_binary(Kind::Mul, make_pow(n->a, n->value - 1.0), diff_node(n->a, var)));
    case Kind::Builtin: {
      auto outer = std::make_shared<Node>();
      outer->kind = Kind::Builtin;
      outer->fn = n->fn->derivative();
      outer->a = n->a;
      return make_binary(Kind::Mul, outer, diff_node(n->a, var));
    }
  }
  throw std::logic_error("unreachable expr kind");
}

NodePtr subst_node(const NodePtr& n, Var var, const NodePtr& repl) {
  switch (n->kind) {
    case Kind::Const:
    case Kind::Param:
      return n;
    case Kind::Variable:
      return n->var == var ? repl : n;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div:
      return make_binary(n->kind, subst_node(n->a, var, repl), subst_node(n->b, var, repl));
    case Kind::Neg:
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Exp:
    case Kind::Sqrt:
    case Kind::Ln:
      return make_unary(n->kind, subst_node(n->a, var, repl));
    case Kind::Pow:
      return make_pow(subst_node(n->a, var, repl), n->value);
    case Kind::Builtin: {
      auto m = std::make_shared<Node>();
      m->kind = Kind::Builtin;
      m->fn = n->fn;
      m->a = subst_node(n->a, var, repl);
      return m;
    }
  }
  throw std::logic_error("unreachable expr kind");
}

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const NodePtr& n, std::ostream& os, int parent_prec) {
  int prec = precedence(n->kind);
  bool parens = prec < parent_prec;
  if (parens) os << '(';
  switch (n->kind) {
    case Kind::Const: {
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, n->value);
      os.write(buf, res.ptr - buf);
      break;
    }
    case Kind::Variable: os << (n->var == Var::X ? 'x' : 'y'); break;
    case Kind::Param: os << n->param; break;
    case Kind::Add:
      print_node(n->a, os, prec); os << " + "; print_node(n->b, os, prec);
      break;
    case Kind::Sub:
      print_node(n->a, os, prec); os << " - "; print_node(n->b, os, prec + 1);
      break;
    case Kind::Mul:
      print_node(n->a, os, prec); os << "*"; print_node(n->b, os, prec);
      break;
    case Kind::Div:
      print_node(n->a, os, prec); os << "/"; print_node(n->b, os, prec + 1);
      break;
    case Kind::Neg:
      os << '-'; print_node(n->a, os, prec + 1);
      break;
    case Kind::Sin: os << "sin("; print_node(n->a, os, 0); os << ')'; break;
    case Kind::Cos: os << "cos("; print_node(n->a, os, 0); os << ')'; break;
    case Kind::Exp: os << "exp("; print_node(n->a, os, 0); os << ')'; break;
    case Kind::Sqrt: os << "sqrt("; print_node(n->a, os, 0); os << ')'; break;
    case Kind::Ln: os << "ln("; print_node(n->a, os, 0); os << ')'; break;
    case Kind::Pow: {
      print_node(n->a, os, prec + 1);
      os << '^';
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, n->value);
      if (n->value < 0) {
        os << '(';
        os.write(buf, res.ptr - buf);
        os << ')';
      } else {
        os.write(buf, res.ptr - buf);
      }
      break;
    }
    case Kind::Builtin:
      os << n->fn->name() << '(';
      print_node(n->a, os, 0);
      os << ')';
      break;
  }
  if (parens) os << ')';
}

// ---- truncated Taylor series (jet) arithmetic ------------------------------

using Series = std::vector<double>;

Series jet_mul(const Series& a, const Series& b) {
  std::size_t n = a.size();
  Series c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j + i < n; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

Series jet_div(const Series& a, const Series& b) {
  std::size_t n = a.size();
  if (b[0] == 0.0) throw DomainError("division by zero");
  Series c(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = a[i];
    for (std::size_t k = 0; k < i; ++k) acc -= c[k] * b[i - k];
    c[i] = acc / b[0];
  }
  return c;
}

Series jet_exp(const Series& a) {
  std::size_t n = a.size();
  Series b(n, 0.0);
  b[0] = std::exp(a[0]);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= i; ++k) acc += k * a[k] * b[i - k];
    b[i] = acc / i;
  }
  return b;
}

void jet_sincos(const Series& a, Series& s, Series& c) {
  std::size_t n = a.size();
  s.assign(n, 0.0);
  c.assign(n, 0.0);
  s[0] = std::sin(a[0]);
  c[0] = std::cos(a[0]);
  for (std::size_t i = 1; i < n; ++i) {
    double as = 0.0, ac = 0.0;
    for (std::size_t k = 1; k <= i; ++k) {
      as += k * a[k] * c[i - k];
      ac += k * a[k] * s[i - k];
    }
    s[i] = as / i;
    c[i] = -ac / i;
  }
}

Series jet_sqrt(const Series& a) {
  std::size_t n = a.size();
  if (a[0] < 0.0) throw DomainError("sqrt of a negative value");
  if (a[0] == 0.0) throw DomainError("sqrt jet at a zero base point");
  Series b(n, 0.0);
  b[0] = std::sqrt(a[0]);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = a[i];
    for (std::size_t k = 1; k < i; ++k) acc -= b[k] * b[i - k];
    b[i] = acc / (2.0 * b[0]);
  }
  return b;
}

Series jet_ln(const Series& a) {
  std::size_t n = a.size();
  if (a[0] <= 0.0) throw DomainError("log of a non-positive value");
  Series b(n, 0.0);
  b[0] = std::log(a[0]);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = a[i] * i;
    for (std::size_t k = 1; k < i; ++k) acc -= k * b[k] * a[i - k];
    b[i] = acc / (i * a[0]);
  }
  return b;
}

Series jet_pow(const Series& a, double p, bool int_expo) {
  std::size_t n = a.size();
  if (int_expo && p >= 0) {
    // repeated multiplication handles a[0] == 0
    Series r(n, 0.0);
    r[0] = 1.0;
    auto ip = static_cast<long>(p);
    Series base = a;
    while (ip > 0) {
      if (ip & 1) r = jet_mul(r, base);
      base = jet_mul(base, base);
      ip >>= 1;
    }
    return r;
  }
  if (a[0] == 0.0) throw DomainError("0 raised to a negative power");
  if (!int_expo && a[0] < 0.0) throw DomainError("negative base with non-integer exponent");
  Series b(n, 0.0);
  b[0] = checked_pow(a[0], p, int_expo);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= i; ++k)
      acc += (p * k - static_cast<double>(i - k)) * a[k] * b[i - k];
    b[i] = acc / (i * a[0]);
  }
  return b;
}

// g -> f(g) where fjet are the Taylor coefficients of f about g[0].
Series jet_compose(const Series& fjet, const Series& g) {
  std::size_t n = g.size();
  Series dg = g;  // g - g0
  dg[0] = 0.0;
  Series r(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {  // Horner
    r = jet_mul(r, dg);
    r[0] += fjet[k];
  }
  return r;
}

Series jet_node(const Node& n, Var var, double x, double y, const Params& params,
                std::size_t len) {
  switch (n.kind) {
    case Kind::Const: {
      Series s(len, 0.0);
      s[0] = n.value;
      return s;
    }
    case Kind::Param: {
      Series s(len, 0.0);
      s[0] = eval_node(n, x, y, params);
      return s;
    }
    case Kind::Variable: {
      Series s(len, 0.0);
      s[0] = n.var == Var::X ? x : y;
      if (n.var == var && len > 1) s[1] = 1.0;
      return s;
    }
    case Kind::Add: {
      Series a = jet_node(*n.a, var, x, y, params, len);
      Series b = jet_node(*n.b, var, x, y, params, len);
      for (std::size_t i = 0; i < len; ++i) a[i] += b[i];
      return a;
    }
    case Kind::Sub: {
      Series a = jet_node(*n.a, var, x, y, params, len);
      Series b = jet_node(*n.b, var, x, y, params, len);
      for (std::size_t i = 0; i < len; ++i) a[i] -= b[i];
      return a;
    }
    case Kind::Mul:
      return jet_mul(jet_node(*n.a, var, x, y, params, len),
                     jet_node(*n.b, var, x, y, params, len));
    case Kind::Div:
      return jet_div(jet_node(*n.a, var, x, y, params, len),
                     jet_node(*n.b, var, x, y, params, len));
    case Kind::Neg: {
      Series a = jet_node(*n.a, var, x, y, params, len);
      for (auto& v : a) v = -v;
      return a;
    }
    case Kind::Sin: {
      Series s, c;
      jet_sincos(jet_node(*n.a, var, x, y, params, len), s, c);
      return s;
    }
    case Kind::Cos: {
      Series s, c;
      jet_sincos(jet_node(*n.a, var, x, y, params, len), s, c);
      return c;
    }
    case Kind::Exp:
      return jet_exp(jet_node(*n.a, var, x, y, params, len));
    case Kind::Sqrt:
      return jet_sqrt(jet_node(*n.a, var, x, y, params, len));
    case Kind::Ln:
      return jet_ln(jet_node(*n.a, var, x, y, params, len));
    case Kind::Pow:
      return jet_pow(jet_node(*n.a, var, x, y, params, len), n.value, n.int_exponent);
    case Kind::Builtin: {
      Series g = jet_node(*n.a, var, x, y, params, len);
      Series fjet(len, 0.0);
      n.fn->taylor(g[0], static_cast<int>(len) - 1, fjet);
      bool inner_const = true;
      for (std::size_t i = 1; i < len; ++i) inner_const &= g[i] == 0.0;
      if (inner_const) {
        Series s(len, 0.0);
        s[0] = fjet[0];
        return s;
      }
      return jet_compose(fjet, g);
    }
  }
  throw std::logic_error("unreachable expr kind");
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(double v) { return Expr(make_const(v)); }

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var = v;
  return Expr(std::move(n));
}

Expr Expr::parameter(const std::string& name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Param;
  n->param = name;
  return Expr(std::move(n));
}

Expr Expr::builtin(SmoothPtr fn, const Expr& arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Builtin;
  n->fn = std::move(fn);
  n->a = arg.node_;
  return Expr(std::move(n));
}

Expr Expr::sin(const Expr& a) { return Expr(make_unary(Kind::Sin, a.node_)); }
Expr Expr::cos(const Expr& a) { return Expr(make_unary(Kind::Cos, a.node_)); }
Expr Expr::exp(const Expr& a) { return Expr(make_unary(Kind::Exp, a.node_)); }
Expr Expr::sqrt(const Expr& a) { return Expr(make_unary(Kind::Sqrt, a.node_)); }
Expr Expr::ln(const Expr& a) { return Expr(make_unary(Kind::Ln, a.node_)); }
Expr Expr::pow(const Expr& base, double exponent) {
  return Expr(make_pow(base.node_, exponent));
}

Expr operator+(const Expr& a, const Expr& b) {
  return Expr(make_binary(Kind::Add, a.node_, b.node_));
}
Expr operator-(const Expr& a, const Expr& b) {
  return Expr(make_binary(Kind::Sub, a.node_, b.node_));
}
Expr operator*(const Expr& a, const Expr& b) {
  return Expr(make_binary(Kind::Mul, a.node_, b.node_));
}
Expr operator/(const Expr& a, const Expr& b) {
  return Expr(make_binary(Kind::Div, a.node_, b.node_));
}
Expr operator-(const Expr& a) { return Expr(make_unary(Kind::Neg, a.node_)); }

double Expr::eval(double x, double y, const Params& params) const {
  return eval_node(*node_, x, y, params);
}

Expr Expr::differentiate(Var var) const { return Expr(diff_node(node_, var)); }

Expr Expr::substitute(Var var, const Expr& replacement) const {
  return Expr(subst_node(node_, var, replacement.node_));
}

std::string Expr::print() const {
  std::ostringstream os;
  print_node(node_, os, 0);
  return os.str();
}

void Expr::taylor(Var var, double x, double y, const Params& params,
                  std::span<double> out) const {
  Series s = jet_node(*node_, var, x, y, params, out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s[i];
}

bool Expr::is_constant(double* value) const { return is_const(node_, value); }

// ---- parser ----------------------------------------------------------------

namespace {

struct Parser {
  const std::string& text;
  const std::vector<std::string>& params;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos);
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+')) e = e + parse_term();
      else if (accept('-')) e = e - parse_term();
      else return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (accept('*')) e = e * parse_factor();
      else if (accept('/')) e = e / parse_factor();
      else return e;
    }
  }

  Expr parse_factor() {
    Expr base = parse_base();
    if (accept('^')) {
      std::size_t at = pos;
      bool negate = accept('-');
      Expr e = parse_base();
      double v;
      if (!e.is_constant(&v))
        throw ParseError("exponent must be a constant", at);
      return Expr::pow(base, negate ? -v : v);
    }
    return base;
  }

  Expr parse_base() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
    char c = text[pos];
    if (c == '-') {
      ++pos;
      return -parse_base();
    }
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  Expr parse_number() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.'))
      ++pos;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = mark;  // 'e' was an identifier start, not an exponent
      }
    }
    double v = 0.0;
    auto res = std::from_chars(text.data() + start, text.data() + pos, v);
    if (res.ec != std::errc() || res.ptr != text.data() + pos)
      throw ParseError("malformed number", start);
    return Expr::constant(v);
  }

  Expr parse_ident() {
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string name = text.substr(start, pos - start);
    if (peek('(')) {
      ++pos;
      Expr arg = parse_expr();
      expect(')');
      if (name == "sin") return Expr::sin(arg);
      if (name == "cos") return Expr::cos(arg);
      if (name == "exp") return Expr::exp(arg);
      if (name == "sqrt") return Expr::sqrt(arg);
      if (name == "ln") return Expr::ln(arg);
      throw ParseError("unknown function '" + name + "'", start);
    }
    if (name == "x") return Expr::variable(Var::X);
    if (name == "y") return Expr::variable(Var::Y);
    for (const auto& p : params)
      if (p == name) return Expr::parameter(name);
    std::string known = "{x, y";
    for (const auto& p : params) known += ", " + p;
    known += "}";
    throw ParseError("unknown identifier '" + name + "', declared: " + known, start);
  }
};

}  // namespace

Expr parse(const std::string& text, const std::vector<std::string>& param_names) {
  Parser p{text, param_names};
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("trailing input", p.pos);
  return e;
}

}  // namespace graze
