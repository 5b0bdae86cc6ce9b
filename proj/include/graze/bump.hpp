#pragma once

#include <memory>
#include <vector>

#include "graze/expr.hpp"

// The paper's C-infinity compactly supported perturbation family: the two
// cut-off blends h* / h_*, the five-piece bump H, finite sums psi, the
// localization windows nu(x), mu(y), and the C1 system distance rho.
//
// All blends share the stable form 1/(1 + e^eta) with
// eta(x) = 1/(x-r1) + 1/(x-r2); the blend is clamped to exactly 0 or 1 once
// |eta| exceeds 700 (IEEE double exp range), and every derivative is clamped
// to 0 there as well, which is below machine precision of the true value.

namespace graze {

class PwsSystem;

struct BumpParams {
  double l1 = 0, l2 = 1, l3 = 0;
  double d() const { return (l2 - l1) / 4.0; }
};

using PsiParams = std::vector<BumpParams>;

struct LocalizationParams {
  double k1, k2, k3, k4;  // nu: 0 | rise | 1 | fall | 0
  double r1, r2;          // mu: 1 | fall | 0
};

// Pointwise evaluation of the cut-off functions.
double hstar(double x, double r1, double r2);
double hsub(double x, double r1, double r2);

// n-th derivative of hstar / hsub (n = 0 is the value itself).
double hstar_deriv(double x, double r1, double r2, int n);

double bump_H(double x, const BumpParams& p);
double psi(double x, const PsiParams& P);
double nu(double x, const LocalizationParams& L);
double mu(double y, const LocalizationParams& L);

// Integral of H over the real line (equals the integral over [l1,l2]),
// adaptive Simpson per analytic piece, |error| <= 1e-10.
double integral_H(const BumpParams& p);

// Smooth1D handles for embedding into expressions. Each is closed under
// derivative() (capped at order 12, the deepest the multiplicity search
// goes); taylor() uses the logistic jet recurrence and is exact to rounding.
SmoothPtr make_hstar_fn(double r1, double r2);
SmoothPtr make_hsub_fn(double r1, double r2);
SmoothPtr make_bump_fn(const BumpParams& p);
SmoothPtr make_nu_fn(const LocalizationParams& L);
SmoothPtr make_mu_fn(const LocalizationParams& L);

// psi as an expression in the given variable (sum of bump builtins).
Expr psi_expr(const PsiParams& P, Var var = Var::X);

// f restricted to the open window (lo, hi), zero outside. Used for
// constructions whose formula is only defined (or only wanted) inside a
// window where it vanishes identically toward the edges.
SmoothPtr make_windowed_expr_fn(const Expr& f_of_x, double lo, double hi,
                                const std::string& name);

// n(x)/x^m with the removable singularity at 0 patched by the Taylor series
// of the quotient (numerator jets at 0 supply the coefficients). `radius`
// selects the patch region; `terms` the series length.
SmoothPtr make_series_quotient_fn(const Expr& numerator, int m, double radius,
                                  int terms, const std::string& name);

// C1 distance of two PWS systems on their (shared) domain box: grid maximum
// of sum_i (|D_i| + |D_i,x| + |D_i,y|) over the four component pairs.
// Documented under-estimate of the true sup. grid_step <= 0 picks the
// default 1e-2 of the domain diagonal.
double distance_rho(const PwsSystem& a, const PwsSystem& b, double grid_step = 0.0);
// Serial reference implementation, kept for testing the parallel kernel.
double distance_rho_serial(const PwsSystem& a, const PwsSystem& b, double grid_step = 0.0);

}  // namespace graze
