#pragma once

// Reference computations that share no code with the library: adaptive
// Simpson quadrature and fixed-step classical RK4.

#include <array>
#include <cmath>
#include <functional>
#include <utility>

namespace oracle {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction to absolute tolerance `tol`.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth = 40) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// First zero of y'' + (N-1)/x y' + c * y^p = 0, y(0) = alpha, y'(0) = 0
/// by classical RK4 with fixed step h from a three-term series start, the
/// crossing located by bisection on the step length.
inline double emden_first_zero(int N, double c, double p, double alpha, double h, double x_limit = 50.0) {
  using S = std::array<double, 2>;
  auto g = [p](double y) { return y >= 0.0 ? std::pow(y, p) : -std::pow(-y, p); };
  auto F = [&](double x, const S& s) -> S { return {s[1], -c * g(s[0]) - (N - 1) * s[1] / x}; };
  auto rk4 = [&](double x, const S& s, double dx) {
    const S k1 = F(x, s);
    const S k2 = F(x + dx / 2, {s[0] + dx / 2 * k1[0], s[1] + dx / 2 * k1[1]});
    const S k3 = F(x + dx / 2, {s[0] + dx / 2 * k2[0], s[1] + dx / 2 * k2[1]});
    const S k4 = F(x + dx, {s[0] + dx * k3[0], s[1] + dx * k3[1]});
    return S{s[0] + dx / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
             s[1] + dx / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  };
  // y = alpha - A x^2 + B x^4 with A = c g / (2N), B = p c g A / (4 (N+2)) ... expressed via g'(alpha).
  const double ga = g(alpha);
  const double A = c * ga / (2.0 * N);
  const double gp = p * std::pow(alpha, p - 1.0);
  const double B = c * gp * A / (4.0 * (N + 2));
  const double x0 = 1e-3;
  double x = x0;
  S s{alpha - A * x0 * x0 + B * std::pow(x0, 4), -2 * A * x0 + 4 * B * std::pow(x0, 3)};
  while (x < x_limit) {
    const S next = rk4(x, s, h);
    if (next[0] <= 0.0) {
      double lo = 0.0, hi = h;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * (x + h); ++it) {
        const double mid = 0.5 * (lo + hi);
        (rk4(x, s, mid)[0] > 0.0 ? lo : hi) = mid;
      }
      return x + 0.5 * (lo + hi);
    }
    s = next;
    x += h;
  }
  return NAN;
}

/// Classical first zero of the index-3 Lane-Emden function.
inline double lane_emden3_first_zero() { return emden_first_zero(3, 1.0, 3.0, 1.0, 2e-4); }

}  // namespace oracle
