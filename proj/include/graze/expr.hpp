#pragma once

#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Scalar field expressions in the variables x, y plus named parameters.
// Trees are immutable; evaluation, differentiation and Taylor (jet)
// expansion are pure and safe to call concurrently.

namespace graze {

// Raised when evaluation leaves the real domain (sqrt of a negative,
// log of a non-positive, division by zero, 0^negative, ...).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the parser; `offset` is the byte offset into the input.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset;
};

// A C-infinity function of one real variable that expressions may embed as
// an opaque node ("builtin"). Closed under differentiation so expression
// trees containing builtins stay differentiable. The bump module provides
// the concrete implementations (cut-off blends, H, psi, nu, mu, ...).
class Smooth1D {
 public:
  virtual ~Smooth1D() = default;
  virtual double value(double x) const = 0;
  virtual std::shared_ptr<const Smooth1D> derivative() const = 0;
  virtual std::string name() const = 0;
  // out[j] = f^(j)(x) / j! for j = 0..order. The default walks the
  // derivative() chain; implementations with a stable jet recurrence
  // should override.
  virtual void taylor(double x, int order, std::span<double> out) const;
};
using SmoothPtr = std::shared_ptr<const Smooth1D>;

using Params = std::map<std::string, double>;

enum class Var { X, Y };

enum class NodeKind : unsigned char {
  Const, Variable, Param,
  Add, Sub, Mul, Div,
  Neg, Sin, Cos, Exp, Sqrt, Ln,
  Pow,      // base^exponent, exponent a stored double
  Builtin,  // fn(arg)
};

class Expr {
 public:
  Expr();  // constant 0

  static Expr constant(double v);
  static Expr variable(Var v);
  static Expr parameter(const std::string& name);
  static Expr builtin(SmoothPtr fn, const Expr& arg);

  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr exp(const Expr& a);
  static Expr sqrt(const Expr& a);
  static Expr ln(const Expr& a);
  static Expr pow(const Expr& base, double exponent);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  double eval(double x, double y, const Params& params = {}) const;
  Expr differentiate(Var var) const;
  // Replace a variable by a subexpression everywhere.
  Expr substitute(Var var, const Expr& replacement) const;
  std::string print() const;

  // Taylor coefficients of t -> expr(point + t*e_var) about t = 0:
  // out[j] = (1/j!) d^j/dt^j. Exact up to rounding (no truncation error).
  void taylor(Var var, double x, double y, const Params& params,
              std::span<double> out) const;

  bool is_constant(double* value = nullptr) const;

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  explicit Expr(NodePtr n) : node_(std::move(n)) {}
  const Node& node() const { return *node_; }

 private:
  NodePtr node_;
};

// Tree node layout; treat as read-only outside expr.cpp.
struct Expr::Node {
  NodeKind kind;
  double value = 0.0;  // Const payload or Pow exponent
  bool int_exponent = false;
  Var var = Var::X;
  std::string param;
  NodePtr a, b;
  SmoothPtr fn;
};

// Parse an expression over x, y and the given parameter names.
// Grammar:
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := base ("^" exponent)?      exponent must fold to a constant
//   base   := number | ident | "(" expr ")" | ident "(" expr ")" | "-" base
Expr parse(const std::string& text, const std::vector<std::string>& param_names = {});

}  // namespace graze
