#include "collapsar/scaling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "collapsar/errors.hpp"
#include "collapsar/profile.hpp"

namespace collapsar {

namespace {

constexpr double kCollapseFloor = 1e-8;
constexpr double kTinyScale = 1e-300;

double emden_potential(double a, double lambda, int N) {
  if (N == 2) return lambda * std::log(a);
  return lambda * std::pow(a, 2 - N) / (2.0 - N);
}

}  // namespace

ScalingFunction ScalingFunction::closed_form(const PhysicalParams& p, SolutionCase c) {
  if (c != SolutionCase::Case1a && c != SolutionCase::Case1b && c != SolutionCase::Case2)
    throw InvalidArgument(fmt::format("closed-form scaling is not defined for {}", to_string(c)));
  ScalingFunction s;
  s.case_ = c;
  s.params_ = p;
  if (c == SolutionCase::Case2) {
    if (!(p.delta * p.Lambda > 0.0)) throw ValidationError({"delta·Lambda must be positive"});
    s.rate_sq_ = p.delta * alpha_const(p.N) * p.Lambda / p.N;
    s.rate_ = std::sqrt(s.rate_sq_);
  } else if (p.m < 0.0) {
    s.blowup_time_ = -p.n / p.m;
  }
  return s;
}

ScalingValue ScalingFunction::evaluate(double t) const {
  const PhysicalParams& p = params_;
  switch (case_) {
    case SolutionCase::Case1a: {
      if (blowup_time_ && t >= *blowup_time_) throw BlowupReached(t, *blowup_time_);
      const double a = p.m * t + p.n;
      if (!(a > 0.0)) throw DomainError(fmt::format("a(t) = {} <= 0 at t = {}", a, t));
      return {a, p.m, 0.0};
    }
    case SolutionCase::Case1b: {
      if (blowup_time_ && t >= *blowup_time_) throw BlowupReached(t, *blowup_time_);
      const double base = p.m * t + p.n;
      if (!(base > 0.0)) throw DomainError(fmt::format("m t + n = {} <= 0 at t = {}", base, t));
      const double e = 2.0 / p.N;
      const double a = std::pow(base, e);
      if (a < kTinyScale) throw BlowupReached(t, blowup_time_.value_or(t));
      return {a, e * p.m * std::pow(base, e - 1.0), e * (e - 1.0) * p.m * p.m * std::pow(base, e - 2.0)};
    }
    case SolutionCase::Case2: {
      const double a = std::exp(rate_ * t);
      return {a, rate_ * a, rate_sq_ * a};
    }
    case SolutionCase::LegacyGW:
    case SolutionCase::Legacy2D: {
      if (t < trajectory_.x_begin())
        throw InvalidArgument(fmt::format("t = {} precedes the integrated trajectory", t));
      if (t > trajectory_.x_end()) {
        if (collapse_detected_) throw BlowupReached(t, trajectory_.x_end());
        throw InvalidArgument(fmt::format("t = {} beyond the integrated trajectory end {}", t, trajectory_.x_end()));
      }
      const auto y = trajectory_.value(t);
      if (!(y[0] > 0.0)) throw DomainError(fmt::format("a(t) = {} <= 0 at t = {}", y[0], t));
      return {y[0], y[1], -p.lambda_legacy / std::pow(y[0], p.N - 1)};
    }
  }
  return {};
}

ScalingValue a_eval(const ScalingFunction& s, double t) { return s.evaluate(t); }

std::optional<double> blowup_time(const ScalingFunction& s) { return s.blowup_time(); }

double emden_scaling_energy(double a, double a_dot, double lambda, int N) {
  return 0.5 * a_dot * a_dot + emden_potential(a, lambda, N);
}

ScalingFunction emden_scaling_integrate(double lambda, double a0, double a1, int N, double t_max, double rel_tol) {
  if (!(a0 > 0.0)) throw InvalidArgument("emden_scaling_integrate: a0 must be positive");
  if (N < 2) throw InvalidArgument("emden_scaling_integrate: N >= 2 required");
  if (!(t_max > 0.0)) throw InvalidArgument("emden_scaling_integrate: t_max must be positive");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("emden_scaling_integrate: rel_tol must lie in (0, 1)");

  ScalingFunction s;
  s.case_ = N == 2 ? SolutionCase::Legacy2D : SolutionCase::LegacyGW;
  s.params_.N = N;
  s.params_.lambda_legacy = lambda;
  s.params_.gamma = N == 2 ? 1.0 : (2.0 * N - 2.0) / N;
  s.params_.theta = 0.0;
  s.params_.kappa = 0.0;

  const double floor = kCollapseFloor * a0;
  auto rhs = [lambda, N](double, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], -lambda / std::pow(y[0], N - 1)};
  };

  const double e0 = emden_scaling_energy(a0, a1, lambda, N);
  s.energy_.initial = e0;
  auto record = [&s, e0, lambda, N](double t, double a, double adot) {
    const double e = emden_scaling_energy(a, adot, lambda, N);
    const double drift = std::abs(e - e0);
    const double kinetic = 0.5 * adot * adot;
    const double potential = std::abs(emden_potential(a, lambda, N));
    const double scale = std::max({std::abs(e0), kinetic, potential});
    s.energy_.max_abs_drift = std::max(s.energy_.max_abs_drift, drift);
    if (e0 != 0.0) s.energy_.max_relative_drift = std::max(s.energy_.max_relative_drift, drift / std::abs(e0));
    if (scale > 0.0) s.energy_.max_component_drift = std::max(s.energy_.max_component_drift, drift / scale);
    s.samples_.t.push_back(t);
    s.samples_.a.push_back(a);
    s.samples_.a_dot.push_back(adot);
    s.samples_.energy.push_back(e);
  };
  record(0.0, a0, a1);

  auto on_step = [&](const ode::DenseSegment<2>& seg, const ode::State<2>& y1, const ode::State<2>&) {
    s.trajectory_.append(seg);
    if (y1[0] <= floor) {
      // The step's own interpolant: a three-node fit straddling the
      // singular approach to a = 0 is less reliable here.
      const double tc =
          refine_root([&seg, floor](double t) { return seg.value(t)[0] - floor; }, seg.x_begin(), seg.x_end(), 0.0);
      s.trajectory_.truncate(tc);
      const auto yc = seg.value(tc);
      record(tc, yc[0], yc[1]);
      s.collapse_detected_ = true;
      s.blowup_time_ = tc;
      return ode::StepAction::Stop;
    }
    record(seg.x_end(), y1[0], y1[1]);
    return ode::StepAction::Continue;
  };

  ode::StepControl control;
  control.tol = {rel_tol, rel_tol * floor};
  s.stats_ = ode::integrate_dopri5<2>(rhs, 0.0, ode::State<2>{a0, a1}, t_max, control, on_step);
  return s;
}

}  // namespace collapsar
