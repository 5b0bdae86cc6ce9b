#include "graze/field.hpp"

#include <cmath>
#include <cstdint>
#include <mutex>
#include <tuple>

namespace graze {

// Flattened postorder program for fast repeated evaluation of one expression.
// Parameters are resolved to constants at build time; builtin nodes keep a
// raw pointer into the owning Expr tree, which the field keeps alive.
namespace {

enum class OpCode : std::uint8_t {
  PushConst, PushX, PushY,
  Add, Sub, Mul, Div, Neg,
  Sin, Cos, Exp, Sqrt, Ln,
  PowInt, PowReal, Builtin,
};

struct Instr {
  OpCode op;
  double a = 0.0;
  const Smooth1D* fn = nullptr;
};

struct Tape {
  std::vector<Instr> code;
  int depth = 0;
  bool ok = false;

  double eval(double x, double y) const {
    double stack[128];
    int sp = 0;
    for (const Instr& in : code) {
      switch (in.op) {
        case OpCode::PushConst: stack[sp++] = in.a; break;
        case OpCode::PushX: stack[sp++] = x; break;
        case OpCode::PushY: stack[sp++] = y; break;
        case OpCode::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case OpCode::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case OpCode::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case OpCode::Div: {
          --sp;
          if (stack[sp] == 0.0) throw DomainError("division by zero");
          stack[sp - 1] /= stack[sp];
          break;
        }
        case OpCode::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case OpCode::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case OpCode::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case OpCode::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case OpCode::Sqrt:
          if (stack[sp - 1] < 0.0) throw DomainError("sqrt of a negative value");
          stack[sp - 1] = std::sqrt(stack[sp - 1]);
          break;
        case OpCode::Ln:
          if (stack[sp - 1] <= 0.0) throw DomainError("log of a non-positive value");
          stack[sp - 1] = std::log(stack[sp - 1]);
          break;
        case OpCode::PowInt: {
          double b = stack[sp - 1];
          if (b == 0.0 && in.a < 0) throw DomainError("0 raised to a negative power");
          stack[sp - 1] = std::pow(b, in.a);
          break;
        }
        case OpCode::PowReal: {
          double b = stack[sp - 1];
          if (b < 0.0) throw DomainError("negative base with non-integer exponent");
          if (b == 0.0 && in.a < 0) throw DomainError("0 raised to a negative power");
          stack[sp - 1] = std::pow(b, in.a);
          break;
        }
        case OpCode::Builtin: stack[sp - 1] = in.fn->value(stack[sp - 1]); break;
      }
    }
    return stack[0];
  }
};

}  // namespace

struct SmoothField::Impl {
  Expr f, g;
  Params params;
  Tape tape_f, tape_g;
  mutable std::map<std::tuple<int, int, int>, std::unique_ptr<Expr>> exprs;
  mutable std::map<std::tuple<int, int, int>, std::unique_ptr<Tape>> tapes;
  mutable std::mutex mutex;

  const Expr& partial(int comp, int i, int j) const;
  const Tape* partial_tape(int comp, int i, int j) const;
};

namespace {

// Returns false when the tree is too deep or a parameter is unbound; the
// caller then falls back to Expr::eval.
bool flatten_node(const Expr::Node& n, const Params& params,
                  std::vector<Instr>& code, int& max_depth, int depth) {
  max_depth = std::max(max_depth, depth + 1);
  if (depth + 1 > 120) return false;
  switch (n.kind) {
    case NodeKind::Const:
      code.push_back({OpCode::PushConst, n.value, nullptr});
      return true;
    case NodeKind::Variable:
      code.push_back({n.var == Var::X ? OpCode::PushX : OpCode::PushY, 0, nullptr});
      return true;
    case NodeKind::Param: {
      auto it = params.find(n.param);
      if (it == params.end()) return false;
      code.push_back({OpCode::PushConst, it->second, nullptr});
      return true;
    }
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
      if (!flatten_node(*n.a, params, code, max_depth, depth)) return false;
      if (!flatten_node(*n.b, params, code, max_depth, depth + 1)) return false;
      OpCode op = n.kind == NodeKind::Add   ? OpCode::Add
                  : n.kind == NodeKind::Sub ? OpCode::Sub
                  : n.kind == NodeKind::Mul ? OpCode::Mul
                                            : OpCode::Div;
      code.push_back({op, 0, nullptr});
      return true;
    }
    case NodeKind::Neg:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Exp:
    case NodeKind::Sqrt:
    case NodeKind::Ln: {
      if (!flatten_node(*n.a, params, code, max_depth, depth)) return false;
      OpCode op;
      switch (n.kind) {
        case NodeKind::Neg: op = OpCode::Neg; break;
        case NodeKind::Sin: op = OpCode::Sin; break;
        case NodeKind::Cos: op = OpCode::Cos; break;
        case NodeKind::Exp: op = OpCode::Exp; break;
        case NodeKind::Sqrt: op = OpCode::Sqrt; break;
        default: op = OpCode::Ln; break;
      }
      code.push_back({op, 0, nullptr});
      return true;
    }
    case NodeKind::Pow:
      if (!flatten_node(*n.a, params, code, max_depth, depth)) return false;
      code.push_back({n.int_exponent ? OpCode::PowInt : OpCode::PowReal, n.value,
                      nullptr});
      return true;
    case NodeKind::Builtin:
      if (!flatten_node(*n.a, params, code, max_depth, depth)) return false;
      code.push_back({OpCode::Builtin, 0, n.fn.get()});
      return true;
  }
  return false;
}

Tape build_tape(const Expr& e, const Params& params) {
  Tape t;
  int max_depth = 0;
  t.ok = flatten_node(e.node(), params, t.code, max_depth, 0);
  t.depth = max_depth;
  if (max_depth > 120) t.ok = false;
  if (!t.ok) t.code.clear();
  return t;
}

}  // namespace

const Expr& SmoothField::Impl::partial(int comp, int i, int j) const {
  std::scoped_lock lock(mutex);
  auto ensure = [&](int ii, int jj) -> const Expr& {
    auto key = std::make_tuple(comp, ii, jj);
    auto it = exprs.find(key);
    if (it != exprs.end()) return *it->second;
    Expr result;
    if (ii == 0 && jj == 0) {
      result = comp == 0 ? f : g;
    } else if (jj > 0) {
      result = exprs.at(std::make_tuple(comp, ii, jj - 1))->differentiate(Var::Y);
    } else {
      result = exprs.at(std::make_tuple(comp, ii - 1, 0))->differentiate(Var::X);
    }
    auto [ins, inserted] =
        exprs.emplace(key, std::make_unique<Expr>(std::move(result)));
    (void)inserted;
    return *ins->second;
  };
  ensure(0, 0);
  for (int a = 1; a <= i; ++a) ensure(a, 0);
  for (int b = 1; b <= j; ++b) ensure(i, b);
  return ensure(i, j);
}

const Tape* SmoothField::Impl::partial_tape(int comp, int i, int j) const {
  const Expr& e = partial(comp, i, j);
  std::scoped_lock lock(mutex);
  auto key = std::make_tuple(comp, i, j);
  auto it = tapes.find(key);
  if (it == tapes.end()) {
    auto t = std::make_unique<Tape>(build_tape(e, params));
    it = tapes.emplace(key, std::move(t)).first;
  }
  return it->second->ok ? it->second.get() : nullptr;
}

SmoothField::SmoothField() : SmoothField(Expr::constant(0), Expr::constant(0)) {}

SmoothField::SmoothField(Expr f, Expr g, Params params) {
  auto impl = std::make_shared<Impl>();
  impl->f = std::move(f);
  impl->g = std::move(g);
  impl->params = std::move(params);
  impl->tape_f = build_tape(impl->f, impl->params);
  impl->tape_g = build_tape(impl->g, impl->params);
  impl_ = std::move(impl);
}

double SmoothField::f(double x, double y) const {
  if (impl_->tape_f.ok) return impl_->tape_f.eval(x, y);
  return impl_->f.eval(x, y, impl_->params);
}

double SmoothField::g(double x, double y) const {
  if (impl_->tape_g.ok) return impl_->tape_g.eval(x, y);
  return impl_->g.eval(x, y, impl_->params);
}

double SmoothField::divergence(double x, double y) const {
  return partial_at(0, 1, 0, x, y) + partial_at(1, 0, 1, x, y);
}

const Expr& SmoothField::partial(int comp, int i, int j) const {
  return impl_->partial(comp, i, j);
}

double SmoothField::partial_at(int comp, int i, int j, double x, double y) const {
  const Tape* t = impl_->partial_tape(comp, i, j);
  if (t) return t->eval(x, y);
  return impl_->partial(comp, i, j).eval(x, y, impl_->params);
}

const Expr& SmoothField::f_expr() const { return impl_->f; }
const Expr& SmoothField::g_expr() const { return impl_->g; }
const Params& SmoothField::params() const { return impl_->params; }

void SmoothField::g_taylor(Var var, double x, double y, std::span<double> out) const {
  impl_->g.taylor(var, x, y, impl_->params, out);
}

}  // namespace graze
