#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "graze/expr.hpp"

namespace graze {

struct Vec2 {
  double x = 0, y = 0;
};

// A planar vector field (f, g) given by two expressions. Immutable after
// construction; symbolic partials of any order are cached lazily behind a
// mutex, and both components carry a flattened evaluation tape for the
// integrator hot path.
class SmoothField {
 public:
  SmoothField();
  SmoothField(Expr f, Expr g, Params params = {});

  double f(double x, double y) const;
  double g(double x, double y) const;
  Vec2 at(double x, double y) const { return {f(x, y), g(x, y)}; }
  // d_x f + d_y g
  double divergence(double x, double y) const;

  // comp 0 = f, comp 1 = g; (i, j) = order of d^i_x d^j_y. (0,0) returns the
  // component itself. Cached; consistent with Expr::differentiate.
  const Expr& partial(int comp, int i, int j) const;
  double partial_at(int comp, int i, int j, double x, double y) const;

  const Expr& f_expr() const;
  const Expr& g_expr() const;
  const Params& params() const;

  // Taylor coefficients of t -> g(x+t, y) (var = X) or g(x, y+t) (var = Y).
  void g_taylor(Var var, double x, double y, std::span<double> out) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace graze
