#pragma once

// Dormand-Prince 5(4) explicit Runge-Kutta integrator with the classical
// fourth-order continuous extension, shared by every ODE in the project.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <tuple>
#include <utility>
#include <vector>

#include "collapsar/errors.hpp"

namespace collapsar::ode {

template <std::size_t Dim>
using State = std::array<double, Dim>;

struct Tolerances {
  double rel = 1e-10;
  double abs = 1e-12;
};

struct StepControl {
  Tolerances tol;
  double h_initial = 0.0;  // 0 selects the starting step automatically
  double h_max = 0.0;      // 0 means unbounded
  std::size_t max_steps = 1'000'000;
};

struct IntegratorStats {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  std::size_t rhs_evaluations = 0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  double smallest_step = std::numeric_limits<double>::infinity();
  double largest_step = 0.0;
};

/// Interpolating polynomial over one accepted step, plus the step's end
/// states and their exact slopes.
template <std::size_t Dim>
class DenseSegment {
 public:
  DenseSegment() = default;
  DenseSegment(double x0, double x1, const State<Dim>& y0, const State<Dim>& y1, const State<Dim>& k0,
               const State<Dim>& k1, const State<Dim>& r3, const State<Dim>& r4, const State<Dim>& r5)
      : x0_(x0), x1_(x1), h_(x1 - x0), y0_(y0), y1_(y1), k0_(k0), k1_(k1), r3_(r3), r4_(r4), r5_(r5) {
    for (std::size_t i = 0; i < Dim; ++i) r2_[i] = y1[i] - y0[i];
  }

  double x_begin() const noexcept { return x0_; }
  double x_end() const noexcept { return x1_; }
  double step() const noexcept { return h_; }
  const State<Dim>& start_state() const noexcept { return y0_; }
  const State<Dim>& end_state() const noexcept { return y1_; }
  const State<Dim>& start_slope() const noexcept { return k0_; }
  const State<Dim>& end_slope() const noexcept { return k1_; }

  State<Dim> value(double x) const noexcept {
    const double s = (x - x0_) / h_;
    const double s1 = 1.0 - s;
    State<Dim> y{};
    for (std::size_t i = 0; i < Dim; ++i) y[i] = y0_[i] + s * (r2_[i] + s1 * (r3_[i] + s * (r4_[i] + s1 * r5_[i])));
    return y;
  }

  /// d/dx of value(x); the polynomial is differentiated exactly.
  State<Dim> derivative(double x) const noexcept {
    const double s = (x - x0_) / h_;
    const double s1 = 1.0 - s;
    State<Dim> dy{};
    for (std::size_t i = 0; i < Dim; ++i) {
      const double g = r4_[i] + s1 * r5_[i];
      const double dg = -r5_[i];
      const double p = r3_[i] + s * g;
      const double dp = g + s * dg;
      const double q = r2_[i] + s1 * p;
      const double dq = -p + s1 * dp;
      dy[i] = (q + s * dq) / h_;
    }
    return dy;
  }

 private:
  double x0_ = 0.0;
  double x1_ = 0.0;
  double h_ = 0.0;
  State<Dim> y0_{};
  State<Dim> y1_{};
  State<Dim> k0_{};
  State<Dim> k1_{};
  State<Dim> r2_{};
  State<Dim> r3_{};
  State<Dim> r4_{};
  State<Dim> r5_{};
};

namespace detail {

/// Quintic Hermite through three nodes with values and slopes, evaluated
/// with its derivative (Newton form on doubled nodes).
inline std::pair<double, double> hermite3(const std::array<double, 3>& xs, const std::array<double, 3>& ys,
                                          const std::array<double, 3>& ds, double x) noexcept {
  std::array<double, 6> t{xs[0], xs[0], xs[1], xs[1], xs[2], xs[2]};
  std::array<double, 6> c{ys[0], ys[0], ys[1], ys[1], ys[2], ys[2]};
  // First-order differences: slopes on doubled nodes.
  for (int j = 5; j >= 1; --j) c[j] = (j % 2 == 1) ? ds[j / 2] : (c[j] - c[j - 1]) / (t[j] - t[j - 1]);
  for (int k = 2; k <= 5; ++k)
    for (int j = 5; j >= k; --j) c[j] = (c[j] - c[j - 1]) / (t[j] - t[j - k]);
  double v = c[5];
  double dv = 0.0;
  for (int j = 4; j >= 0; --j) {
    dv = dv * (x - t[j]) + v;
    v = v * (x - t[j]) + c[j];
  }
  return {v, dv};
}

/// Cubic Hermite on one interval, for trajectories with a single step.
inline std::pair<double, double> hermite2(double x0, double x1, double y0, double y1, double d0, double d1,
                                          double x) noexcept {
  const double h = x1 - x0;
  const double s = (x - x0) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const double dh00 = 6 * s * (s - 1), dh10 = (1 - s) * (1 - 3 * s);
  const double dh01 = 6 * s * (1 - s), dh11 = s * (3 * s - 2);
  return {h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1,
          (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1};
}

}  // namespace detail

/// Piecewise dense output over consecutive accepted steps, optionally cut
/// short inside the final step (e.g. at a located root).
///
/// Two interpolants are available. value()/derivative() use the integrator's
/// own fourth-order continuous extension. smooth() is a C1 quintic Hermite
/// through the step end points of the interval and its nearer neighbour,
/// using the exact slopes there; its derivative is one order more accurate,
/// which matters wherever the interpolated derivative is itself the quantity
/// being checked.
template <std::size_t Dim>
class DenseTrajectory {
 public:
  void append(const DenseSegment<Dim>& seg) {
    segments_.push_back(seg);
    end_ = seg.x_end();
  }

  void truncate(double x_end) {
    while (!segments_.empty() && segments_.back().x_begin() >= x_end) segments_.pop_back();
    end_ = x_end;
  }

  bool empty() const noexcept { return segments_.empty(); }
  std::size_t size() const noexcept { return segments_.size(); }
  double x_begin() const noexcept { return segments_.empty() ? 0.0 : segments_.front().x_begin(); }
  double x_end() const noexcept { return end_; }
  const std::vector<DenseSegment<Dim>>& segments() const noexcept { return segments_; }

  bool contains(double x) const noexcept { return !segments_.empty() && x >= x_begin() && x <= end_; }

  const DenseSegment<Dim>& segment_at(double x) const {
    if (!contains(x)) throw InvalidArgument("dense output evaluated outside its interval");
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const DenseSegment<Dim>& s) { return v < s.x_begin(); });
    if (it != segments_.begin()) --it;
    return *it;
  }

  State<Dim> value(double x) const { return segment_at(x).value(x); }
  State<Dim> derivative(double x) const { return segment_at(x).derivative(x); }

  /// (value, derivative) of the quintic Hermite interpolant at x.
  std::pair<State<Dim>, State<Dim>> smooth(double x) const {
    const auto& seg = segment_at(x);
    const std::size_t i = static_cast<std::size_t>(&seg - segments_.data());
    State<Dim> v{}, dv{};
    if (segments_.size() == 1) {
      for (std::size_t d = 0; d < Dim; ++d)
        std::tie(v[d], dv[d]) = detail::hermite2(seg.x_begin(), seg.x_end(), seg.start_state()[d],
                                                 seg.end_state()[d], seg.start_slope()[d], seg.end_slope()[d], x);
      return {v, dv};
    }
    // Third node: the closer of the previous step's start and the next step's end.
    const bool has_left = i > 0;
    const bool has_right = i + 1 < segments_.size();
    const bool use_left =
        has_left && (!has_right || segments_[i - 1].step() <= segments_[i + 1].step());
    const DenseSegment<Dim>& a = use_left ? segments_[i - 1] : seg;
    const DenseSegment<Dim>& b = use_left ? seg : segments_[i + 1];
    const std::array<double, 3> xs{a.x_begin(), b.x_begin(), b.x_end()};
    for (std::size_t d = 0; d < Dim; ++d) {
      const std::array<double, 3> ys{a.start_state()[d], b.start_state()[d], b.end_state()[d]};
      const std::array<double, 3> ds{a.start_slope()[d], b.start_slope()[d], b.end_slope()[d]};
      std::tie(v[d], dv[d]) = detail::hermite3(xs, ys, ds, x);
    }
    return {v, dv};
  }

 private:
  std::vector<DenseSegment<Dim>> segments_;
  double end_ = 0.0;
};

enum class StepAction { Continue, Stop };

namespace detail {

template <std::size_t Dim>
double error_norm(const State<Dim>& err, const State<Dim>& y0, const State<Dim>& y1, const Tolerances& tol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < Dim; ++i) {
    const double sk = tol.abs + tol.rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sk;
    sum += q * q;
  }
  return std::sqrt(sum / Dim);
}

template <std::size_t Dim>
State<Dim> axpy(const State<Dim>& y, double h, std::initializer_list<std::pair<double, const State<Dim>*>> terms) {
  State<Dim> out = y;
  for (const auto& [c, k] : terms) {
    if (c == 0.0) continue;
    for (std::size_t i = 0; i < Dim; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

}  // namespace detail

/// Integrates y' = rhs(x, y) from x0 toward x_end (x_end > x0).
///
/// After every accepted step `on_step(segment, y1, dy1)` is called with the
/// step's dense output and end state; returning StepAction::Stop ends the
/// run. Throws StiffnessFailure when the step size underflows or the step
/// budget is exhausted. Exceptions thrown by `rhs` propagate unchanged.
template <std::size_t Dim, class Rhs, class Observer>
IntegratorStats integrate_dopri5(Rhs&& rhs, double x0, State<Dim> y0, double x_end, const StepControl& control,
                                 Observer&& on_step) {
  constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                   a65 = -5103.0 / 18656.0;
  constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                   a76 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                   e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  if (!(x_end > x0)) throw InvalidArgument("integrate_dopri5: x_end must exceed x0");

  IntegratorStats stats;
  stats.rel_tol = control.tol.rel;
  stats.abs_tol = control.tol.abs;
  const double span = x_end - x0;
  const double h_max = control.h_max > 0.0 ? std::min(control.h_max, span) : span;

  auto eval = [&](double x, const State<Dim>& y) {
    ++stats.rhs_evaluations;
    return rhs(x, y);
  };
  auto underflow = [](double x, const State<Dim>& y) {
    return StiffnessFailure(x, std::vector<double>(y.begin(), y.end()));
  };

  double x = x0;
  State<Dim> y = y0;
  State<Dim> k1 = eval(x, y);

  double h = control.h_initial;
  if (!(h > 0.0)) {
    // Starting step from the local derivative scale (Hairer, Norsett, Wanner).
    auto scaled_norm = [&](const State<Dim>& v) {
      double s = 0.0;
      for (std::size_t i = 0; i < Dim; ++i) {
        const double q = v[i] / (control.tol.abs + control.tol.rel * std::abs(y[i]));
        s += q * q;
      }
      return std::sqrt(s / Dim);
    };
    const double dn0 = scaled_norm(y);
    const double dn1 = scaled_norm(k1);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 * span : 0.01 * dn0 / dn1;
    h0 = std::min(h0, h_max);
    const State<Dim> y_probe = detail::axpy<Dim>(y, h0, {{1.0, &k1}});
    const State<Dim> k_probe = eval(x + h0, y_probe);
    State<Dim> diff{};
    for (std::size_t i = 0; i < Dim; ++i) diff[i] = k_probe[i] - k1[i];
    const double dn2 = scaled_norm(diff) / h0;
    const double dmax = std::max(dn1, dn2);
    const double h1 = (!(dmax > 1e-15)) ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, h_max});
    if (!(h > 0.0) || !std::isfinite(h)) h = 1e-6 * span;
  }

  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (x < x_end) {
    if (++steps > control.max_steps) throw underflow(x, y);
    const bool final_step = x + h >= x_end;
    if (final_step) h = x_end - x;
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) throw underflow(x, y);

    const State<Dim> k2 = eval(x + c2 * h, detail::axpy<Dim>(y, h, {{a21, &k1}}));
    const State<Dim> k3 = eval(x + c3 * h, detail::axpy<Dim>(y, h, {{a31, &k1}, {a32, &k2}}));
    const State<Dim> k4 = eval(x + c4 * h, detail::axpy<Dim>(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State<Dim> k5 =
        eval(x + c5 * h, detail::axpy<Dim>(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State<Dim> k6 =
        eval(x + h, detail::axpy<Dim>(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State<Dim> y1 = detail::axpy<Dim>(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const double x1 = final_step ? x_end : x + h;
    const State<Dim> k7 = eval(x1, y1);

    State<Dim> err{};
    for (std::size_t i = 0; i < Dim; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double en = detail::error_norm<Dim>(err, y, y1, control.tol);
    bool finite = std::isfinite(en);
    for (double v : y1) finite = finite && std::isfinite(v);
    for (double v : k7) finite = finite && std::isfinite(v);
    if (!finite) en = std::numeric_limits<double>::infinity();

    if (en <= 1.0) {
      State<Dim> r3{}, r4{}, r5{};
      for (std::size_t i = 0; i < Dim; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        r3[i] = bspl;
        r4[i] = ydiff - h * k7[i] - bspl;
        r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      const DenseSegment<Dim> seg(x, x1, y, y1, k1, k7, r3, r4, r5);
      ++stats.accepted_steps;
      stats.smallest_step = std::min(stats.smallest_step, seg.step());
      stats.largest_step = std::max(stats.largest_step, seg.step());

      x = x1;
      y = y1;
      k1 = k7;
      const StepAction action = on_step(seg, std::as_const(y), std::as_const(k1));
      if (action == StepAction::Stop) break;

      // PI step size control.
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.17) * std::pow(err_old, 0.04);
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      err_old = std::max(en, 1e-4);
      last_rejected = false;
      h = std::min(h * fac, h_max);
    } else {
      ++stats.rejected_steps;
      last_rejected = true;
      const double fac = std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
      h *= fac;
    }
  }
  return stats;
}

}  // namespace collapsar::ode
