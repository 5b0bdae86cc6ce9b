#include "graze/pws.hpp"

#include <algorithm>
#include <cmath>

namespace graze {

double DomainBox::diagonal() const {
  return std::hypot(xmax - xmin, ymax - ymin);
}

PwsSystem::PwsSystem(SmoothField upper, SmoothField lower, DomainBox domain)
    : upper_(std::move(upper)), lower_(std::move(lower)), domain_(domain) {
  if (domain_.xmax <= domain_.xmin || domain_.ymax <= domain_.ymin)
    throw std::invalid_argument("domain box must have positive area");
  if (!domain_.contains(0.0, 0.0))
    throw std::invalid_argument("domain box must contain the origin");
}

const SmoothField& side_field(const PwsSystem& sys, SideId side) {
  return side == SideId::Upper ? sys.upper() : sys.lower();
}

std::string to_string(Visibility v) {
  switch (v) {
    case Visibility::Visible: return "visible";
    case Visibility::Invisible: return "invisible";
    case Visibility::Left: return "left";
    case Visibility::Right: return "right";
  }
  return "?";
}

RegionClass h_indicator(const PwsSystem& sys, double x, const PwsTolerances& tol) {
  double h = sys.upper().g(x, 0.0) * sys.lower().g(x, 0.0);
  if (h > tol.tol_h) return {RegionTag::Crossing, h};
  if (h < -tol.tol_h) return {RegionTag::Sliding, h};
  return {RegionTag::Tangency, h};
}

Visibility classify_visibility(SideId side, int m, double leading, double f_at) {
  if (m % 2 == 1) {
    // local orbit graph y ~ leading (x-x0)^(m+1) / ((m+1) f): nonnegative of
    // sign(leading/f). Upper side sees it iff that sign is positive.
    bool stays_own = side == SideId::Upper ? leading / f_at > 0 : leading / f_at < 0;
    return stays_own ? Visibility::Visible : Visibility::Invisible;
  }
  return f_at > 0 ? Visibility::Right : Visibility::Left;
}

std::optional<TangentPoint> classify_tangent_point(const PwsSystem& sys, SideId side,
                                                   double x0,
                                                   const PwsTolerances& tol) {
  const SmoothField& field = side_field(sys, side);
  std::vector<double> jet(tol.max_order + 1);
  field.g_taylor(Var::X, x0, 0.0, jet);
  // derivative magnitudes g^(j) = jet[j] * j!
  std::vector<double> deriv(tol.max_order + 1, 0.0);
  double fact = 1.0;
  double biggest = 0.0;
  for (int j = 1; j <= tol.max_order; ++j) {
    fact *= j;
    deriv[j] = jet[j] * fact;
    biggest = std::max(biggest, std::abs(deriv[j]));
  }
  if (biggest < 1e-300) return std::nullopt;
  int m = 0;
  for (int j = 1; j <= tol.max_order; ++j) {
    if (std::abs(deriv[j]) > tol.mult_tol * biggest) {
      m = j;
      break;
    }
  }
  if (m == 0) return std::nullopt;
  double f_at = field.f(x0, 0.0);
  if (f_at == 0.0) return std::nullopt;  // equilibrium on Sigma, out of scope
  TangentPoint tp;
  tp.x0 = x0;
  tp.side = side;
  tp.multiplicity = m;
  tp.leading_coefficient = jet[m];
  tp.visibility = classify_visibility(side, m, jet[m], f_at);
  return tp;
}

namespace {

// bisection + secant refinement of a bracketed sign change
double polish_root(const std::function<double(double)>& fn, double a, double b,
                   double fa, double fb, double tol_root) {
  for (int iter = 0; iter < 200; ++iter) {
    double mid;
    // secant proposal, clipped into the bracket
    if (fb != fa) {
      mid = b - fb * (b - a) / (fb - fa);
      if (!(mid > std::min(a, b) && mid < std::max(a, b))) mid = 0.5 * (a + b);
    } else {
      mid = 0.5 * (a + b);
    }
    double fm = fn(mid);
    if (std::abs(fm) < tol_root || std::abs(b - a) < 1e-15 * (1 + std::abs(mid))) {
      return mid;
    }
    if ((fa < 0) != (fm < 0)) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TangentScan find_tangent_points(const PwsSystem& sys, SideId side, double a, double b,
                                const PwsTolerances& tol) {
  if (!(a < b)) throw std::invalid_argument("find_tangent_points: need a < b");
  const SmoothField& field = side_field(sys, side);
  auto g = [&](double x) { return field.g(x, 0.0); };
  auto gp = [&](double x) { return field.partial_at(1, 1, 0, x, 0.0); };

  int n = tol.scan_cells;
  double h = (b - a) / n;
  std::vector<double> roots;

  std::vector<double> gv(n + 1), gpv(n + 1);
  for (int i = 0; i <= n; ++i) {
    double x = a + i * h;
    gv[i] = g(x);
    gpv[i] = gp(x);
  }
  std::function<double(double)> gfn = g, gpfn = gp;
  for (int i = 0; i < n; ++i) {
    double x0 = a + i * h, x1 = x0 + h;
    if (gv[i] == 0.0) {
      roots.push_back(x0);
      continue;
    }
    if ((gv[i] < 0) != (gv[i + 1] < 0)) {
      roots.push_back(polish_root(gfn, x0, x1, gv[i], gv[i + 1], tol.tol_root));
      continue;
    }
    // even-order touch: a root of g' where |g| is tiny
    if ((gpv[i] < 0) != (gpv[i + 1] < 0)) {
      double xc = polish_root(gpfn, x0, x1, gpv[i], gpv[i + 1], tol.tol_root);
      if (std::abs(g(xc)) < tol.tol_root) roots.push_back(xc);
    }
  }
  if (gv[n] == 0.0) roots.push_back(b);

  std::sort(roots.begin(), roots.end());
  std::vector<double> unique_roots;
  for (double r : roots) {
    if (unique_roots.empty() || r - unique_roots.back() > 0.5 * h)
      unique_roots.push_back(r);
  }

  TangentScan scan;
  for (double r : unique_roots) {
    if (std::abs(g(r)) > tol.tol_root) continue;
    auto tp = classify_tangent_point(sys, side, r, tol);
    if (tp) {
      scan.points.push_back(*tp);
    } else {
      scan.unresolved.push_back(
          {r, side, "derivatives up to order " + std::to_string(tol.max_order) +
                        " below tolerance (or equilibrium)"});
    }
  }
  return scan;
}

double filippov_coefficient(const PwsSystem& sys, double x) {
  double gu = sys.upper().g(x, 0.0);
  double gl = sys.lower().g(x, 0.0);
  double den = gl - gu;
  if (den == 0.0) throw DomainError("filippov coefficient: g- - g+ vanishes");
  return gl / den;
}

double sliding_field(const PwsSystem& sys, double x, const PwsTolerances& tol) {
  double gu = sys.upper().g(x, 0.0);
  double gl = sys.lower().g(x, 0.0);
  if (gu * gl >= -tol.tol_h)
    throw std::invalid_argument("sliding_field: (x,0) not strictly in the sliding region");
  double den = gl - gu;
  if (std::abs(den) < 1e-14)
    throw DomainError("sliding_field: degenerate denominator g- - g+");
  double fu = sys.upper().f(x, 0.0);
  double fl = sys.lower().f(x, 0.0);
  return (fu * gl - fl * gu) / den;
}

}  // namespace graze
