#include "graze/bump.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "graze/pws.hpp"

namespace graze {

namespace {

constexpr double kExpClamp = 700.0;  // beyond this the blend is exactly 0/1
constexpr int kMaxBlendOrder = 12;   // deepest derivative any caller needs

// eta(x) = 1/(x-r1) + 1/(x-r2);  hstar = 1/(1+e^eta) on (r1,r2).
double blend_core(double x, double r1, double r2) {
  if (x <= r1) return 0.0;
  if (x >= r2) return 1.0;
  double eta = 1.0 / (x - r1) + 1.0 / (x - r2);
  if (eta > kExpClamp) return 0.0;
  if (eta < -kExpClamp) return 1.0;
  if (eta >= 0) return std::exp(-eta) / (1.0 + std::exp(-eta));
  return 1.0 / (1.0 + std::exp(eta));
}

// Taylor coefficients (u_j = u^(j)(x)/j!) of the blend at x, from the
// logistic ODE u' = -eta' u (1-u). Stable: every coefficient carries the
// factor u0(1-u0), which underflows to an exact 0 outside the blend core.
void blend_jet(double x, double r1, double r2, int order, std::span<double> out) {
  for (int i = 0; i <= order; ++i) out[i] = 0.0;
  if (x <= r1 || x >= r2) {
    out[0] = x <= r1 ? 0.0 : 1.0;
    return;
  }
  double eta = 1.0 / (x - r1) + 1.0 / (x - r2);
  if (std::abs(eta) > kExpClamp) {
    out[0] = eta > 0 ? 0.0 : 1.0;
    return;
  }
  out[0] = blend_core(x, r1, r2);
  if (order == 0) return;
  // p[j] = coefficient of t^j in eta'(x+t); d^j of (x-c)^-2 is
  // (-1)^j (j+1)! (x-c)^-(j+2), so the series coefficient is
  // (-1)^j (j+1) (x-c)^-(j+2), and eta' carries an overall minus.
  std::vector<double> p(order);
  double a1 = x - r1, a2 = x - r2;
  double p1 = 1.0 / (a1 * a1), p2 = 1.0 / (a2 * a2);
  double sgn = -1.0;
  for (int j = 0; j < order; ++j) {
    p[j] = sgn * (j + 1) * (p1 + p2);
    p1 /= a1;
    p2 /= a2;
    sgn = -sgn;
  }
  // w = u - u^2 (truncated); u' = -eta' w gives (i+1) u_{i+1} = -(p * w)_i.
  std::vector<double> w(order, 0.0);
  for (int i = 0; i < order; ++i) {
    double u2 = 0.0;
    for (int k = 0; k <= i; ++k) u2 += out[k] * out[i - k];
    w[i] = out[i] - u2;
    double q = 0.0;
    for (int k = 0; k <= i; ++k) q -= p[k] * w[i - k];
    out[i + 1] = q / (i + 1);
  }
}

double blend_deriv(double x, double r1, double r2, int n) {
  if (n == 0) return blend_core(x, r1, r2);
  if (x <= r1 || x >= r2) return 0.0;
  std::vector<double> jet(n + 1);
  blend_jet(x, r1, r2, n, jet);
  double fact = 1.0;
  for (int j = 2; j <= n; ++j) fact *= j;
  return jet[n] * fact;
}

// Taylor coefficients of s * u^(k) about x (plus nothing else); out[j] =
// s * u^(k+j)(x) / j! = s * jet[k+j] * (k+j)!/j!.
void shifted_jet(double x, double a, double b, int k, double s, int order,
                 std::span<double> out) {
  std::vector<double> jet(k + order + 1);
  blend_jet(x, a, b, k + order, jet);
  for (int j = 0; j <= order; ++j) {
    double factor = 1.0;
    for (int i = 1; i <= k; ++i) factor *= static_cast<double>(j + i);
    out[j] = s * jet[k + j] * factor;
  }
}

// ---- the H profile ---------------------------------------------------------
//
// H(x, l) = l3 * F(x) with F' = w, where w is the C-infinity tent
//   w =  hstar(x, l1,      l1 + d)   on [l1,       l1 + d)
//        hsub (x, l1 + d,  l1 + 2d)  on [l1 + d,   l1 + 2d)
//       -hstar(x, l1 + 2d, l1 + 3d)  on [l1 + 2d,  l1 + 3d)
//       -hsub (x, l1 + 3d, l2)       on [l1 + 3d,  l2]
// so F rises 0 -> d/2 -> d -> d/2 -> 0 across the four quarters.

struct PieceRef {
  double a, b;
  double sign;
  bool rising;
};

PieceRef piece_of(const BumpParams& p, int idx) {
  double d = p.d();
  switch (idx) {
    case 0: return {p.l1, p.l1 + d, 1.0, true};
    case 1: return {p.l1 + d, p.l1 + 2 * d, 1.0, false};
    case 2: return {p.l1 + 2 * d, p.l1 + 3 * d, -1.0, true};
    default: return {p.l1 + 3 * d, p.l2, -1.0, false};
  }
}

int piece_index(const BumpParams& p, double x) {
  return std::min(3, std::max(0, static_cast<int>((x - p.l1) / p.d())));
}

double w_profile(const BumpParams& p, double x) {
  if (x <= p.l1 || x >= p.l2) return 0.0;
  PieceRef pc = piece_of(p, piece_index(p, x));
  double u = blend_core(x, pc.a, pc.b);
  return pc.sign * (pc.rising ? u : 1.0 - u);
}

// n-th derivative of w (n >= 1)
double w_profile_deriv(const BumpParams& p, double x, int n) {
  if (n == 0) return w_profile(p, x);
  if (x <= p.l1 || x >= p.l2) return 0.0;
  PieceRef pc = piece_of(p, piece_index(p, x));
  double v = blend_deriv(x, pc.a, pc.b, n);
  return pc.sign * (pc.rising ? v : -v);
}

// Taylor coefficients of w^(k) about x; handles the complement on falling
// pieces (w = sign*(1-u) there, so only the k = 0 constant term differs).
void w_profile_jet(const BumpParams& p, double x, int k, int order,
                   std::span<double> out) {
  if (x <= p.l1 || x >= p.l2) {
    for (int j = 0; j <= order; ++j) out[j] = 0.0;
    return;
  }
  PieceRef pc = piece_of(p, piece_index(p, x));
  double s = pc.sign * (pc.rising ? 1.0 : -1.0);
  shifted_jet(x, pc.a, pc.b, k, s, order, out);
  if (!pc.rising && k == 0) out[0] += pc.sign;
}

// Antiderivative table for H/l3: quintic Hermite on a uniform grid with
// exact node data (F via Gauss-Legendre prefix sums, w and w' closed form).
// Grid count divisible by 4 so nodes align with the piece edges.
struct HTable {
  BumpParams p;
  int cells;
  double h;
  std::vector<double> F, W, W1;

  explicit HTable(const BumpParams& params, int n = 8192) : p(params), cells(n) {
    h = (p.l2 - p.l1) / n;
    F.resize(n + 1);
    W.resize(n + 1);
    W1.resize(n + 1);
    static const double gx[8] = {-0.9602898564975362, -0.7966664774136267,
                                 -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975362};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    F[0] = 0.0;
    for (int i = 0; i < n; ++i) {
      double a = p.l1 + i * h, m = a + 0.5 * h;
      double acc = 0.0;
      for (int q = 0; q < 8; ++q) acc += gw[q] * w_profile(p, m + 0.5 * h * gx[q]);
      F[i + 1] = F[i] + acc * 0.5 * h;
    }
    for (int i = 0; i <= n; ++i) {
      double x = p.l1 + i * h;
      W[i] = w_profile(p, x);
      W1[i] = w_profile_deriv(p, x, 1);
    }
  }

  double eval(double x) const {
    if (x <= p.l1 || x > p.l2) return 0.0;
    double s = (x - p.l1) / h;
    int i = std::min(cells - 1, static_cast<int>(s));
    double t = s - i;
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    double H1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    double H2 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
    double H3 = 0.5 * t3 - t4 + 0.5 * t5;
    double H4 = -4 * t3 + 7 * t4 - 3 * t5;
    double H5 = 10 * t3 - 15 * t4 + 6 * t5;
    return H0 * F[i] + H5 * F[i + 1] + h * (H1 * W[i] + H4 * W[i + 1]) +
           h * h * (H2 * W1[i] + H3 * W1[i + 1]);
  }
};

}  // namespace

double hstar(double x, double r1, double r2) { return blend_core(x, r1, r2); }
double hsub(double x, double r1, double r2) { return 1.0 - blend_core(x, r1, r2); }

double hstar_deriv(double x, double r1, double r2, int n) {
  return blend_deriv(x, r1, r2, n);
}

namespace {

struct CachedTable {
  bool valid = false;
  BumpParams p;
  std::shared_ptr<HTable> table;
};

const HTable& thread_table(const BumpParams& p) {
  thread_local CachedTable cache;
  if (!cache.valid || cache.p.l1 != p.l1 || cache.p.l2 != p.l2) {
    cache.table = std::make_shared<HTable>(p);
    cache.p = p;
    cache.valid = true;
  }
  return *cache.table;
}

}  // namespace

double bump_H(double x, const BumpParams& p) {
  if (p.l3 == 0.0) return 0.0;
  return p.l3 * thread_table(p).eval(x);
}

double psi(double x, const PsiParams& P) {
  double s = 0.0;
  for (const auto& p : P) s += bump_H(x, p);
  return s;
}

double nu(double x, const LocalizationParams& L) {
  if (x <= L.k1 || x >= L.k4) return 0.0;
  if (x < L.k2) return blend_core(x, L.k1, L.k2);
  if (x <= L.k3) return 1.0;
  return 1.0 - blend_core(x, L.k3, L.k4);
}

double mu(double y, const LocalizationParams& L) {
  if (y <= L.r1) return 1.0;
  if (y >= L.r2) return 0.0;
  return 1.0 - blend_core(y, L.r1, L.r2);
}

// ---- adaptive Simpson over the table-backed H ------------------------------

namespace {

double adapt(const HTable& t, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = t.eval(lm), frm = t.eval(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  if (depth <= 0) throw std::runtime_error("integral_H: quadrature did not converge");
  return adapt(t, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(t, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integral_H(const BumpParams& p) {
  if (p.l3 == 0.0) return 0.0;
  const HTable& table = thread_table(p);
  double total = 0.0;
  double d = p.d();
  for (int piece = 0; piece < 4; ++piece) {
    double a = p.l1 + piece * d, b = a + d;
    double m = 0.5 * (a + b);
    double fa = table.eval(a), fm = table.eval(m), fb = table.eval(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += adapt(table, a, b, fa, fm, fb, whole,
                   2.5e-11 / std::max(1.0, std::abs(p.l3)), 48);
  }
  return p.l3 * total;
}

// ---- Smooth1D implementations ----------------------------------------------

namespace {

// k-th derivative of hstar (rising) or hsub (falling); k = 0 is the value.
class BlendFn : public Smooth1D {
 public:
  BlendFn(double r1, double r2, bool rising, int order)
      : r1_(r1), r2_(r2), rising_(rising), order_(order) {}

  double value(double x) const override {
    if (order_ == 0) {
      double u = blend_core(x, r1_, r2_);
      return rising_ ? u : 1.0 - u;
    }
    double v = blend_deriv(x, r1_, r2_, order_);
    return rising_ ? v : -v;
  }

  SmoothPtr derivative() const override {
    if (order_ + 1 > kMaxBlendOrder)
      throw std::runtime_error("blend derivative order beyond cap (12)");
    return std::make_shared<BlendFn>(r1_, r2_, rising_, order_ + 1);
  }

  std::string name() const override {
    std::string base = rising_ ? "hstar" : "hsub";
    if (order_) base += "_d" + std::to_string(order_);
    return base;
  }

  void taylor(double x, int order, std::span<double> out) const override {
    shifted_jet(x, r1_, r2_, order_, rising_ ? 1.0 : -1.0, order, out);
    if (!rising_ && order_ == 0) out[0] += 1.0;
  }

 private:
  double r1_, r2_;
  bool rising_;
  int order_;
};

// n-th derivative of H for n >= 1: l3 * w^(n-1) piecewise.
class BumpDerivFn : public Smooth1D {
 public:
  BumpDerivFn(const BumpParams& p, int order) : p_(p), order_(order) {}

  double value(double x) const override {
    return p_.l3 * w_profile_deriv(p_, x, order_ - 1);
  }

  SmoothPtr derivative() const override {
    if (order_ > kMaxBlendOrder)
      throw std::runtime_error("bump derivative order beyond cap (12)");
    return std::make_shared<BumpDerivFn>(p_, order_ + 1);
  }

  std::string name() const override { return "H_d" + std::to_string(order_); }

  void taylor(double x, int order, std::span<double> out) const override {
    w_profile_jet(p_, x, order_ - 1, order, out);
    for (int j = 0; j <= order; ++j) out[j] *= p_.l3;
  }

 private:
  BumpParams p_;
  int order_;
};

class BumpFn : public Smooth1D {
 public:
  explicit BumpFn(const BumpParams& p)
      : p_(p), table_(p.l3 != 0.0 ? std::make_shared<HTable>(p) : nullptr) {}

  double value(double x) const override {
    if (!table_) return 0.0;
    return p_.l3 * table_->eval(x);
  }

  SmoothPtr derivative() const override { return std::make_shared<BumpDerivFn>(p_, 1); }

  std::string name() const override { return "H"; }

  void taylor(double x, int order, std::span<double> out) const override {
    out[0] = value(x);
    if (order == 0) return;
    // F_j = w^(j-1)(x) / j! for j >= 1
    std::vector<double> wj(order);
    w_profile_jet(p_, x, 0, order - 1, wj);  // wj[i] = w^(i)(x)/i!
    for (int j = 1; j <= order; ++j) out[j] = p_.l3 * wj[j - 1] / j;
  }

 private:
  BumpParams p_;
  std::shared_ptr<HTable> table_;
};

// k-th derivative of nu; piecewise blend derivatives.
class NuFn : public Smooth1D {
 public:
  NuFn(const LocalizationParams& L, int order) : L_(L), order_(order) {}

  double value(double x) const override {
    if (order_ == 0) return nu(x, L_);
    if (x > L_.k1 && x < L_.k2) return blend_deriv(x, L_.k1, L_.k2, order_);
    if (x > L_.k3 && x < L_.k4) return -blend_deriv(x, L_.k3, L_.k4, order_);
    return 0.0;
  }

  SmoothPtr derivative() const override {
    if (order_ + 1 > kMaxBlendOrder)
      throw std::runtime_error("nu derivative order beyond cap (12)");
    return std::make_shared<NuFn>(L_, order_ + 1);
  }

  std::string name() const override {
    return order_ ? "nu_d" + std::to_string(order_) : "nu";
  }

  void taylor(double x, int order, std::span<double> out) const override {
    if (x > L_.k1 && x < L_.k2) {
      shifted_jet(x, L_.k1, L_.k2, order_, 1.0, order, out);
      return;
    }
    if (x > L_.k3 && x < L_.k4) {
      shifted_jet(x, L_.k3, L_.k4, order_, -1.0, order, out);
      if (order_ == 0) out[0] += 1.0;
      return;
    }
    for (int j = 0; j <= order; ++j) out[j] = 0.0;
    if (order_ == 0) out[0] = nu(x, L_);
  }

 private:
  LocalizationParams L_;
  int order_;
};

// k-th derivative of mu; mu = hsub(y, r1, r2).
class MuFn : public Smooth1D {
 public:
  MuFn(const LocalizationParams& L, int order) : L_(L), order_(order) {}

  double value(double y) const override {
    if (order_ == 0) return mu(y, L_);
    if (y > L_.r1 && y < L_.r2) return -blend_deriv(y, L_.r1, L_.r2, order_);
    return 0.0;
  }

  SmoothPtr derivative() const override {
    if (order_ + 1 > kMaxBlendOrder)
      throw std::runtime_error("mu derivative order beyond cap (12)");
    return std::make_shared<MuFn>(L_, order_ + 1);
  }

  std::string name() const override {
    return order_ ? "mu_d" + std::to_string(order_) : "mu";
  }

  void taylor(double y, int order, std::span<double> out) const override {
    if (y > L_.r1 && y < L_.r2) {
      shifted_jet(y, L_.r1, L_.r2, order_, -1.0, order, out);
      if (order_ == 0) out[0] += 1.0;
      return;
    }
    for (int j = 0; j <= order; ++j) out[j] = 0.0;
    if (order_ == 0) out[0] = mu(y, L_);
  }

 private:
  LocalizationParams L_;
  int order_;
};

class WindowedExprFn : public Smooth1D {
 public:
  WindowedExprFn(Expr f, double lo, double hi, std::string name)
      : f_(std::move(f)), lo_(lo), hi_(hi), name_(std::move(name)) {}

  double value(double x) const override {
    if (x <= lo_ || x >= hi_) return 0.0;
    return f_.eval(x, 0.0);
  }

  SmoothPtr derivative() const override {
    return std::make_shared<WindowedExprFn>(f_.differentiate(Var::X), lo_, hi_,
                                            name_ + "'");
  }

  std::string name() const override { return name_; }

  void taylor(double x, int order, std::span<double> out) const override {
    if (x <= lo_ || x >= hi_) {
      for (int j = 0; j <= order; ++j) out[j] = 0.0;
      return;
    }
    f_.taylor(Var::X, x, 0.0, {}, out);
  }

 private:
  Expr f_;
  double lo_, hi_;
  std::string name_;
};

class SeriesQuotientFn : public Smooth1D {
 public:
  SeriesQuotientFn(Expr numerator, int m, double radius, std::vector<double> coeff,
                   std::string name)
      : n_(std::move(numerator)), m_(m), radius_(radius), coeff_(std::move(coeff)),
        name_(std::move(name)) {}

  double value(double x) const override {
    if (std::abs(x) > radius_) return n_.eval(x, 0.0) / std::pow(x, m_);
    double acc = 0.0;
    for (std::size_t k = coeff_.size(); k-- > 0;) acc = acc * x + coeff_[k];
    return acc;
  }

  SmoothPtr derivative() const override {
    // d/dx (n/x^m) = (x n' - m n) / x^(m+1)
    Expr xv = Expr::variable(Var::X);
    Expr nn = xv * n_.differentiate(Var::X) - Expr::constant(m_) * n_;
    std::vector<double> dc(std::max<std::size_t>(coeff_.size(), 2) - 1, 0.0);
    for (std::size_t k = 1; k < coeff_.size(); ++k) dc[k - 1] = coeff_[k] * k;
    return std::make_shared<SeriesQuotientFn>(std::move(nn), m_ + 1, radius_,
                                              std::move(dc), name_ + "'");
  }

  std::string name() const override { return name_; }

  void taylor(double x, int order, std::span<double> out) const override {
    if (std::abs(x) > radius_) {
      // series division: n(x+t) / (x+t)^m
      std::vector<double> njet(order + 1), xm(order + 1, 0.0);
      n_.taylor(Var::X, x, 0.0, {}, njet);
      double binom = 1.0, pw = std::pow(x, m_);
      for (int j = 0; j <= order; ++j) {
        if (j > m_) break;
        xm[j] = binom * pw;
        binom *= static_cast<double>(m_ - j) / (j + 1);
        pw /= x;
      }
      for (int i = 0; i <= order; ++i) {
        double acc = njet[i];
        for (int k = 0; k < i; ++k) acc -= out[k] * xm[i - k];
        out[i] = acc / xm[0];
      }
      return;
    }
    // Taylor of the patch polynomial about x: out[j] = sum_k C(k,j) c_k x^(k-j)
    for (int j = 0; j <= order; ++j) {
      double acc = 0.0;
      for (std::size_t k = coeff_.size(); k-- > static_cast<std::size_t>(j);) {
        double binom = 1.0;
        for (int i = 0; i < j; ++i) binom *= static_cast<double>(k - i) / (j - i);
        acc += binom * coeff_[k] * std::pow(x, static_cast<double>(k - j));
      }
      out[j] = acc;
    }
  }

 private:
  Expr n_;
  int m_;
  double radius_;
  std::vector<double> coeff_;
  std::string name_;
};

}  // namespace

SmoothPtr make_hstar_fn(double r1, double r2) {
  return std::make_shared<BlendFn>(r1, r2, true, 0);
}
SmoothPtr make_hsub_fn(double r1, double r2) {
  return std::make_shared<BlendFn>(r1, r2, false, 0);
}
SmoothPtr make_bump_fn(const BumpParams& p) { return std::make_shared<BumpFn>(p); }
SmoothPtr make_nu_fn(const LocalizationParams& L) { return std::make_shared<NuFn>(L, 0); }
SmoothPtr make_mu_fn(const LocalizationParams& L) { return std::make_shared<MuFn>(L, 0); }

Expr psi_expr(const PsiParams& P, Var var) {
  Expr sum = Expr::constant(0.0);
  Expr v = Expr::variable(var);
  for (const auto& p : P) sum = sum + Expr::builtin(make_bump_fn(p), v);
  return sum;
}

SmoothPtr make_windowed_expr_fn(const Expr& f_of_x, double lo, double hi,
                                const std::string& name) {
  return std::make_shared<WindowedExprFn>(f_of_x, lo, hi, name);
}

SmoothPtr make_series_quotient_fn(const Expr& numerator, int m, double radius,
                                  int terms, const std::string& name) {
  std::vector<double> jet(m + terms);
  numerator.taylor(Var::X, 0.0, 0.0, {}, jet);
  double scale = 0.0;
  for (double c : jet) scale = std::max(scale, std::abs(c));
  for (int k = 0; k < m; ++k) {
    if (std::abs(jet[k]) > 1e-9 * std::max(1.0, scale))
      throw std::invalid_argument(
          "series quotient: numerator does not vanish to order " + std::to_string(m));
  }
  std::vector<double> coeff(jet.begin() + m, jet.end());
  return std::make_shared<SeriesQuotientFn>(numerator, m, radius, std::move(coeff),
                                            name);
}

// ---- distance rho -----------------------------------------------------------

namespace {

double rho_at(const PwsSystem& a, const PwsSystem& b, double x, double y) {
  double total = 0.0;
  const SmoothField* fa[2] = {&a.upper(), &a.lower()};
  const SmoothField* fb[2] = {&b.upper(), &b.lower()};
  for (int s = 0; s < 2; ++s) {
    for (int comp = 0; comp < 2; ++comp) {
      double dv =
          fa[s]->partial_at(comp, 0, 0, x, y) - fb[s]->partial_at(comp, 0, 0, x, y);
      double dx =
          fa[s]->partial_at(comp, 1, 0, x, y) - fb[s]->partial_at(comp, 1, 0, x, y);
      double dy =
          fa[s]->partial_at(comp, 0, 1, x, y) - fb[s]->partial_at(comp, 0, 1, x, y);
      total += std::abs(dv) + std::abs(dx) + std::abs(dy);
    }
  }
  return total;
}

void rho_grid(const DomainBox& box, double grid_step, int& nx, int& ny, double& hx,
              double& hy) {
  if (grid_step <= 0.0) grid_step = 1e-2 * box.diagonal();
  nx = std::max(2, static_cast<int>(std::ceil((box.xmax - box.xmin) / grid_step)) + 1);
  ny = std::max(2, static_cast<int>(std::ceil((box.ymax - box.ymin) / grid_step)) + 1);
  hx = (box.xmax - box.xmin) / (nx - 1);
  hy = (box.ymax - box.ymin) / (ny - 1);
}

}  // namespace

double distance_rho_serial(const PwsSystem& a, const PwsSystem& b, double grid_step) {
  int nx, ny;
  double hx, hy;
  rho_grid(a.domain(), grid_step, nx, ny, hx, hy);
  double best = 0.0;
  for (int i = 0; i < nx; ++i) {
    double x = a.domain().xmin + i * hx;
    for (int j = 0; j < ny; ++j)
      best = std::max(best, rho_at(a, b, x, a.domain().ymin + j * hy));
  }
  return best;
}

double distance_rho(const PwsSystem& a, const PwsSystem& b, double grid_step) {
  int nx, ny;
  double hx, hy;
  rho_grid(a.domain(), grid_step, nx, ny, hx, hy);
  double best = 0.0;
#pragma omp parallel for reduction(max : best) schedule(static)
  for (int i = 0; i < nx; ++i) {
    double x = a.domain().xmin + i * hx;
    for (int j = 0; j < ny; ++j) {
      double v = rho_at(a, b, x, a.domain().ymin + j * hy);
      if (v > best) best = v;
    }
  }
  return best;
}

}  // namespace graze
