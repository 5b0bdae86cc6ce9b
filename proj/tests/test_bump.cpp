#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "graze/bump.hpp"
#include "test_util.hpp"

using namespace graze;

TEST_CASE("cut-off blend endpoint and midpoint values") {
  double r1 = -0.3, r2 = 0.9;
  CHECK(hstar(r1, r1, r2) == 0.0);
  CHECK(hstar(r2, r1, r2) == 1.0);
  CHECK(hstar(0.5 * (r1 + r2), r1, r2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(hsub(0.25, 0, 1) + hstar(0.25, 0, 1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hstar + hsub is identically 1 on the blend interval") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    double r1 = -2 + 3 * u(rng);
    double r2 = r1 + 1e-3 + 2 * u(rng);
    double x = r1 + (r2 - r1) * u(rng);
    CHECK(std::abs(hstar(x, r1, r2) + hsub(x, r1, r2) - 1.0) < 1e-12);
  }
}

TEST_CASE("blend derivatives match finite differences") {
  double r1 = 0.0, r2 = 1.0;
  auto f = [&](double x) { return hstar(x, r1, r2); };
  for (double x : {0.2, 0.35, 0.5, 0.62, 0.8}) {
    double h = 1e-5;
    double fd1 = (f(x + h) - f(x - h)) / (2 * h);
    CHECK(hstar_deriv(x, r1, r2, 1) == doctest::Approx(fd1).epsilon(1e-7));
    double fd2 = (f(x + h) - 2 * f(x) + f(x - h)) / (h * h);
    CHECK(hstar_deriv(x, r1, r2, 2) == doctest::Approx(fd2).epsilon(1e-5));
  }
  // clamped tails: derivatives exactly zero
  CHECK(hstar_deriv(1e-9, r1, r2, 3) == 0.0);
  CHECK(hstar_deriv(1.0 - 1e-9, r1, r2, 3) == 0.0);
}

TEST_CASE("H values at the analytic anchors") {
  BumpParams p{-1.0, 3.0, 2.0};  // d = 1
  double d = p.d();
  CHECK(d == doctest::Approx(1.0));
  // continuity anchor from the smoothness proof: H(l1+d) = l3 d / 2
  CHECK(bump_H(p.l1 + d, p) == doctest::Approx(p.l3 * d / 2).epsilon(1e-10));
  // peak at the midpoint, zero outside
  CHECK(bump_H(p.l1 + 2 * d, p) == doctest::Approx(p.l3 * d).epsilon(1e-10));
  CHECK(bump_H(p.l1 - 0.5, p) == 0.0);
  CHECK(bump_H(p.l2 + 0.5, p) == 0.0);
  BumpParams zero{0, 4, 0};
  CHECK(bump_H(1.7, zero) == 0.0);
}

TEST_CASE("|H| <= |l3| d for random parameters") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    BumpParams p;
    p.l1 = -2 + 3 * u(rng);
    p.l2 = p.l1 + 0.01 + 3 * u(rng);
    p.l3 = -3 + 6 * u(rng);
    double bound = std::abs(p.l3) * p.d() * (1 + 1e-12);
    for (int k = 0; k < 20; ++k) {
      double x = p.l1 - 0.1 + (p.l2 - p.l1 + 0.2) * u(rng);
      CHECK(std::abs(bump_H(x, p)) <= bound);
    }
  }
}

TEST_CASE("integral of H: bracket and independent oracle") {
  BumpParams p{0, 4, 1};  // d = 1
  double val = integral_H(p);
  CHECK(val > 1.0);  // |l3| d^2
  CHECK(val < 4.0);  // 4 |l3| d^2
  CHECK(integral_H({0, 4, 0}) == 0.0);

  // brute-force trapezoid oracle on 1e6 points
  const int n = 1000000;
  double h = (p.l2 - p.l1) / n;
  double acc = 0.5 * (bump_H(p.l1, p) + bump_H(p.l2, p));
  for (int i = 1; i < n; ++i) acc += bump_H(p.l1 + i * h, p);
  acc *= h;
  CHECK(val == doctest::Approx(acc).epsilon(1e-7));
}

TEST_CASE("table-backed H agrees with direct quadrature of the profile") {
  // independent spot check of the antiderivative table: integrate the
  // closed-form H' by adaptive Simpson and compare prefix values
  BumpParams p{-0.2, 0.1, 1.5};
  SmoothPtr dH = make_bump_fn(p)->derivative();
  std::function<double(double, double, double, double, double, int)> simp =
      [&](double a, double b, double fa, double fm, double fb, int depth) -> double {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = dH->value(lm), frm = dH->value(rm);
    double left = (m - a) / 3 * (fa + 4 * flm + fm) * 0.5;
    double right = (b - m) / 3 * (fm + 4 * frm + fb) * 0.5;
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-14) return left + right;
    return simp(a, m, fa, flm, fm, depth - 1) + simp(m, b, fm, frm, fb, depth - 1);
  };
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    double x = p.l1 + (p.l2 - p.l1) * u(rng);
    double direct =
        simp(p.l1, x, dH->value(p.l1), dH->value(0.5 * (p.l1 + x)), dH->value(x), 36);
    CHECK(bump_H(x, p) == doctest::Approx(direct).epsilon(1e-8));
  }
}

TEST_CASE("junction smoothness: one-sided derivatives agree (orders 1-4)") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 6; ++trial) {
    BumpParams p;
    p.l1 = -1 + 2 * u(rng);
    p.l2 = p.l1 + 0.5 + 2 * u(rng);
    p.l3 = 0.5 + 2 * u(rng);
    double d = p.d();
    auto f = [&](double x) { return bump_H(x, p); };
    double h = 1e-2 * d;
    for (int j = 1; j <= 3; ++j) {  // interior junctions l1 + j d
      double xj = p.l1 + j * d;
      for (int m = 1; m <= 4; ++m) {
        double right = testutil::one_sided_derivative(f, xj, h, m, +1);
        double left = testutil::one_sided_derivative(f, xj, h, m, -1);
        // scale of the m-th derivative over the support
        double scale = std::abs(p.l3) * std::pow(8.0 / d, m - 1);
        CHECK(std::abs(right - left) <=
              1e-4 * std::max({std::abs(right), std::abs(left), scale}));
      }
    }
  }
}

TEST_CASE("psi: finite sums of bumps") {
  CHECK(psi(0.3, {}) == 0.0);
  // disjoint supports: psi equals the active bump alone
  PsiParams P = {{0.0, 1.0, 2.0}, {2.0, 3.0, -1.0}};
  CHECK(psi(0.5, P) == doctest::Approx(bump_H(0.5, P[0])));
  CHECK(psi(2.5, P) == doctest::Approx(bump_H(2.5, P[1])));
  // the paper's figure shape: s = 2 with l_{1,3} < 0 then l_{2,3} > 0 gives
  // a negative lobe followed by a positive lobe
  PsiParams fig = {{-1.0, 0.0, -0.7}, {0.0, 1.0, 0.9}};
  CHECK(psi(-0.5, fig) < 0.0);
  CHECK(psi(0.5, fig) > 0.0);
}

TEST_CASE("psi and its derivative sup-norms vanish with the amplitudes") {
  double prev_sup = 1e300, prev_dsup = 1e300;
  for (int k = 0; k < 8; ++k) {
    double amp = std::pow(0.5, k);
    PsiParams Q = {{-1.0, 0.0, amp}, {0.0, 1.0, -0.5 * amp}};
    SmoothPtr q0 = make_bump_fn(Q[0])->derivative();
    SmoothPtr q1 = make_bump_fn(Q[1])->derivative();
    double sup = 0, dsup = 0;
    for (int i = 0; i <= 400; ++i) {
      double x = -1.2 + 2.4 * i / 400.0;
      sup = std::max(sup, std::abs(psi(x, Q)));
      dsup = std::max(dsup, std::abs(q0->value(x) + q1->value(x)));
    }
    CHECK(sup < prev_sup);
    CHECK(dsup <= prev_dsup);
    prev_sup = sup;
    prev_dsup = dsup;
  }
  CHECK(prev_sup < 1e-2);
}

TEST_CASE("nu and mu windows") {
  LocalizationParams L{-3, -2, 2, 3, 1, 1.5};
  CHECK(nu(-2.0, L) == 1.0);
  CHECK(nu(0.0, L) == 1.0);
  CHECK(nu(2.0, L) == 1.0);
  CHECK(nu(-3.0, L) == 0.0);
  CHECK(nu(3.2, L) == 0.0);
  CHECK(nu(-2.5, L) == doctest::Approx(0.5).epsilon(1e-14));  // midpoint of rise
  CHECK(mu(0.5, L) == 1.0);
  CHECK(mu(1.0, L) == 1.0);
  CHECK(mu(1.25, L) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mu(2.0, L) == 0.0);
}

TEST_CASE("builtin derivative chain matches finite differences") {
  BumpParams p{-0.5, 0.7, 1.3};
  SmoothPtr H = make_bump_fn(p);
  SmoothPtr H1 = H->derivative();
  SmoothPtr H2 = H1->derivative();
  double h = 1e-6;
  for (double x : {-0.45, -0.2, 0.05, 0.2, 0.5, 0.65}) {
    double fd1 = (H->value(x + h) - H->value(x - h)) / (2 * h);
    CHECK(H1->value(x) == doctest::Approx(fd1).epsilon(1e-6));
    double fd2 = (H1->value(x + h) - H1->value(x - h)) / (2 * h);
    CHECK(H2->value(x) == doctest::Approx(fd2).epsilon(1e-5));
  }

  LocalizationParams L{-3, -2, 2, 3, 1, 1.5};
  SmoothPtr nfn = make_nu_fn(L);
  SmoothPtr n1 = nfn->derivative();
  for (double x : {-2.7, -2.3, 0.0, 2.4}) {
    double fd = (nfn->value(x + h) - nfn->value(x - h)) / (2 * h);
    CHECK(n1->value(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
  SmoothPtr mfn = make_mu_fn(L);
  SmoothPtr m1 = mfn->derivative();
  for (double y : {1.1, 1.3, 1.45}) {
    double fd = (mfn->value(y + h) - mfn->value(y - h)) / (2 * h);
    CHECK(m1->value(y) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("builtin taylor jets match derivative-chain values") {
  BumpParams p{-0.5, 0.7, 0.8};
  SmoothPtr H = make_bump_fn(p);
  for (double x : {-0.3, 0.1, 0.42}) {
    std::vector<double> jet(6);
    H->taylor(x, 5, jet);
    SmoothPtr d = H;
    double fact = 1.0;
    for (int j = 0; j <= 5; ++j) {
      if (j > 0) {
        d = d->derivative();
        fact *= j;
      }
      CHECK(jet[j] == doctest::Approx(d->value(x) / fact).epsilon(1e-8));
    }
  }
  LocalizationParams L{-3, -2, 2, 3, 1, 1.5};
  SmoothPtr nfn = make_nu_fn(L);
  for (double x : {-2.6, 2.5}) {
    std::vector<double> jet(5);
    nfn->taylor(x, 4, jet);
    SmoothPtr d = nfn;
    double fact = 1.0;
    for (int j = 0; j <= 4; ++j) {
      if (j > 0) {
        d = d->derivative();
        fact *= j;
      }
      CHECK(jet[j] == doctest::Approx(d->value(x) / fact).epsilon(1e-8));
    }
  }
}

TEST_CASE("psi expression differentiates through the bump builtin") {
  PsiParams P = {{-0.4, 0.4, 1.1}};
  Expr e = psi_expr(P);
  Expr de = e.differentiate(Var::X);
  double h = 1e-6;
  for (double x : {-0.3, 0.0, 0.3}) {
    double fd = (e.eval(x + h, 0) - e.eval(x - h, 0)) / (2 * h);
    CHECK(de.eval(x, 0) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("windowed expression vanishes outside and differentiates inside") {
  Expr f = parse("1 - sqrt(1 - x^2)");
  SmoothPtr w = make_windowed_expr_fn(f, -0.5, 0.5, "c");
  CHECK(w->value(0.7) == 0.0);
  CHECK(w->value(-3.0) == 0.0);  // sqrt would be invalid here; window guards it
  CHECK(w->value(0.3) == doctest::Approx(1 - std::sqrt(1 - 0.09)));
  SmoothPtr dw = w->derivative();
  double h = 1e-6;
  double fd = (w->value(0.2 + h) - w->value(0.2 - h)) / (2 * h);
  CHECK(dw->value(0.2) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("series-patched quotient handles the removable singularity") {
  // n(x) = sin(x)^3 has a zero of order 3; n/x^3 -> 1 at 0
  Expr n = parse("sin(x)^3");
  SmoothPtr q = make_series_quotient_fn(n, 3, 0.05, 12, "phi");
  CHECK(q->value(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q->value(0.01) ==
        doctest::Approx(std::pow(std::sin(0.01) / 0.01, 3)).epsilon(1e-10));
  CHECK(q->value(0.3) ==
        doctest::Approx(std::pow(std::sin(0.3) / 0.3, 3)).epsilon(1e-12));
  // derivative continuous across the patch boundary
  SmoothPtr dq = q->derivative();
  CHECK(dq->value(0.0499) == doctest::Approx(dq->value(0.0501)).epsilon(1e-6));
  // jets on both branches agree with the derivative chain
  for (double x : {0.02, 0.2}) {
    std::vector<double> jet(4);
    q->taylor(x, 3, jet);
    SmoothPtr d = q;
    double fact = 1.0;
    for (int j = 0; j <= 3; ++j) {
      if (j > 0) {
        d = d->derivative();
        fact *= j;
      }
      CHECK(jet[j] == doctest::Approx(d->value(x) / fact).epsilon(1e-7));
    }
  }
  // rejects numerators that do not vanish
  CHECK_THROWS(make_series_quotient_fn(parse("1 + x"), 2, 0.1, 8, "bad"));
}
