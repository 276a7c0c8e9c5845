#include "collapsar/profile.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "collapsar/errors.hpp"

namespace collapsar {

std::string_view to_string(SupportKind k) noexcept {
  switch (k) {
    case SupportKind::ZeroCrossing: return "ZeroCrossing";
    case SupportKind::AsymptoticDecay: return "AsymptoticDecay";
    case SupportKind::Truncated: return "Truncated";
  }
  return "unknown";
}

double ProfileOdeForm::denominator(double f) const noexcept {
  const double a = std::abs(f);
  double d = pressure_coeff * std::pow(a, pressure_exponent);
  if (viscous_coeff != 0.0) d -= viscous_coeff * std::pow(a, viscous_exponent);
  return d;
}

ProfileOdeForm make_profile_form(const PhysicalParams& p, SolutionCase c) {
  ProfileOdeForm form;
  form.N = p.N;
  form.gamma = p.gamma;
  form.pressure_coeff = p.gamma * p.K;
  form.pressure_exponent = p.gamma - 2.0;
  form.viscous_exponent = p.theta - 2.0;
  form.gravity_coeff = p.delta * alpha_const(p.N);
  switch (c) {
    case SolutionCase::Case1a:
      form.viscous_coeff = p.m * p.kappa * p.theta * p.N;
      break;
    case SolutionCase::Case1b:
      form.viscous_coeff = 2.0 * p.m * p.kappa * p.theta;
      form.forcing_slope = 2.0 * (p.N - 2) * p.m * p.m / (static_cast<double>(p.N) * p.N);
      break;
    case SolutionCase::Case2:
      form.pressure_coeff = case2_denominator_coeff(p);
      break;
    case SolutionCase::LegacyGW:
    case SolutionCase::Legacy2D:
      throw InvalidArgument(fmt::format("{} profiles are integrated by integrate_emden", to_string(c)));
  }
  form.denominator_floor = 1e-12 * std::max(1.0, p.gamma * p.K * std::pow(p.alpha_ic, p.gamma - 2.0));
  return form;
}

ProfileDerivative ode_rhs(double z, double f, double M, const ProfileOdeForm& form) {
  if (!(z > 0.0)) throw InvalidArgument(fmt::format("ode_rhs: z must be positive (got {})", z));
  const double zpow = std::pow(z, form.N - 1);
  if (f == 0.0) return {0.0, 0.0};
  const double d = form.denominator(f);
  if (!(std::abs(d) >= form.denominator_floor)) throw DegenerateDenominator(z, f);
  return {(form.forcing(z) - form.gravity_coeff * M / zpow) / d, f * zpow};
}

SeriesStart series_start(const ProfileOdeForm& form, double alpha_ic, double z0) {
  const double d = form.denominator(alpha_ic);
  if (!(std::abs(d) >= form.denominator_floor)) throw DegenerateDenominator(0.0, alpha_ic);
  const int N = form.N;
  const double f2 = (form.forcing_slope - form.gravity_coeff * alpha_ic / N) / d;
  const double zN = std::pow(z0, N);
  return {alpha_ic + 0.5 * f2 * z0 * z0, alpha_ic * zN / N + f2 * zN * z0 * z0 / (2.0 * (N + 2)), f2 * z0, f2};
}

double refine_root(const std::function<double(double)>& fn, double lo, double hi, double rel_tol) {
  double flo = fn(lo);
  const double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) throw InvalidArgument("refine_root: no sign change in bracket");
  for (int it = 0; it < 400; ++it) {
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ProfileState ProfileSolution::from_internal(double z, const ode::State<2>& w, const ode::State<2>& dw) const noexcept {
  const double alpha = params_.alpha_ic;
  const double M = w[1] * std::pow(z, form_.N);
  switch (variable_) {
    case Variable::Density:
      return {w[0], dw[0], M};
    case Variable::Enthalpy: {
      const double p = 1.0 / (form_.gamma - 1.0);
      const double a = std::abs(w[0]);
      const double f = alpha * std::copysign(std::pow(a, p), w[0]);
      return {f, alpha * p * std::pow(a, p - 1.0) * dw[0], M};
    }
    case Variable::LogDensity: {
      const double f = alpha * std::exp(w[0]);
      return {f, f * dw[0], M};
    }
  }
  return {};
}

ProfileState ProfileSolution::at(double z) const {
  if (!(z >= 0.0 && z <= support_end()))
    throw InvalidArgument(fmt::format("profile evaluated at z={} outside [0, {}]", z, support_end()));
  if (z <= options_.z0) {
    const int N = form_.N;
    const double zN = std::pow(z, N);
    const double f2 = series_.f2;
    return {params_.alpha_ic + 0.5 * f2 * z * z, f2 * z, params_.alpha_ic * zN / N + f2 * zN * z * z / (2.0 * (N + 2))};
  }
  const auto [w, dw] = trajectory_.smooth(z);
  return from_internal(z, w, dw);
}

ProfileSolution integrate_profile(const PhysicalParams& p, SolutionCase c, const ProfileOptions& options) {
  require_valid(p, c);
  if (!(options.z0 > 0.0 && options.z_max > options.z0))
    throw InvalidArgument("integrate_profile: require 0 < z0 < z_max");
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0 && options.abs_tol > 0.0 && options.abs_tol < 1.0))
    throw InvalidArgument("integrate_profile: tolerances must lie in (0, 1)");
  if (!(options.eps_cut > 0.0)) throw InvalidArgument("integrate_profile: eps_cut must be positive");

  ProfileSolution sol;
  sol.case_ = c;
  sol.params_ = p;
  sol.options_ = options;
  sol.form_ = make_profile_form(p, c);
  const ProfileOdeForm& form = sol.form_;
  const double alpha = p.alpha_ic;
  const int N = p.N;

  if (form.viscous_coeff != 0.0) {
    sol.variable_ = ProfileSolution::Variable::Density;
  } else if (form.gamma == 1.0) {
    sol.variable_ = ProfileSolution::Variable::LogDensity;
  } else {
    sol.variable_ = ProfileSolution::Variable::Enthalpy;
  }
  const auto variable = sol.variable_;

  sol.series_ = series_start(form, alpha, options.z0);
  const SeriesStart& s0 = sol.series_;

  // Internal state: (w, q) with w the density variable and q = M / z^N the
  // mean enclosed density, which stays O(alpha) near the origin.
  const double q0 = s0.M / std::pow(options.z0, N);
  ode::State<2> w0{};
  switch (variable) {
    case ProfileSolution::Variable::Density: w0 = {s0.f, q0}; break;
    case ProfileSolution::Variable::Enthalpy: w0 = {std::pow(s0.f / alpha, form.gamma - 1.0), q0}; break;
    case ProfileSolution::Variable::LogDensity: w0 = {std::log(s0.f / alpha), q0}; break;
  }

  const double enthalpy_scale = (form.gamma - 1.0) * std::pow(alpha, 1.0 - form.gamma);
  auto rhs = [&](double z, const ode::State<2>& w) -> ode::State<2> {
    const double q = w[1];
    double f = 0.0;
    double dw = 0.0;
    switch (variable) {
      case ProfileSolution::Variable::Density: {
        f = w[0];
        if (f != 0.0) {
          const double d = form.denominator(f);
          if (!(std::abs(d) >= form.denominator_floor)) throw DegenerateDenominator(z, f);
          dw = (form.forcing(z) - form.gravity_coeff * q * z) / d;
        }
        break;
      }
      case ProfileSolution::Variable::Enthalpy: {
        f = alpha * std::copysign(std::pow(std::abs(w[0]), 1.0 / (form.gamma - 1.0)), w[0]);
        if (f != 0.0 && !(std::abs(form.denominator(f)) >= form.denominator_floor)) throw DegenerateDenominator(z, f);
        dw = enthalpy_scale * (form.forcing(z) - form.gravity_coeff * q * z) / form.pressure_coeff;
        break;
      }
      case ProfileSolution::Variable::LogDensity: {
        f = alpha * std::exp(w[0]);
        if (!(std::abs(form.denominator(f)) >= form.denominator_floor)) throw DegenerateDenominator(z, f);
        dw = (form.forcing(z) - form.gravity_coeff * q * z) / form.pressure_coeff;
        break;
      }
    }
    return {dw, (f - N * q) / z};
  };

  auto push_node = [&sol](double z, const ProfileState& st) {
    sol.z_nodes_.push_back(z);
    sol.f_values_.push_back(st.f);
    sol.fprime_values_.push_back(st.fprime);
    sol.M_values_.push_back(st.M);
  };
  push_node(0.0, {alpha, 0.0, 0.0});
  push_node(options.z0, {s0.f, s0.fprime, s0.M});

  sol.support_kind_ = SupportKind::Truncated;
  auto on_step = [&](const ode::DenseSegment<2>& seg, const ode::State<2>& w1,
                     const ode::State<2>& dw1) -> ode::StepAction {
    sol.trajectory_.append(seg);
    const double z1 = seg.x_end();
    const double w_start = seg.start_state()[0];
    if (variable != ProfileSolution::Variable::LogDensity && w_start > 0.0 && w1[0] <= 0.0) {
      const auto& traj = sol.trajectory_;
      const double Z = refine_root([&traj](double z) { return traj.smooth(z).first[0]; }, seg.x_begin(), z1);
      sol.trajectory_.truncate(Z);
      sol.Z_mu_ = Z;
      sol.support_kind_ = SupportKind::ZeroCrossing;
      const auto [wz, dwz] = traj.smooth(Z);
      push_node(Z, sol.from_internal(Z, wz, dwz));
      return ode::StepAction::Stop;
    }
    const ProfileState st = sol.from_internal(z1, w1, dw1);
    push_node(z1, st);
    // Decay is judged on the integrated variable: an enthalpy that is still
    // falling at a finite rate is heading for a crossing, however small f is.
    const bool decayed = variable == ProfileSolution::Variable::Enthalpy
                             ? std::abs(w1[0]) < options.eps_cut && std::abs(dw1[0]) < options.eps_cut
                             : std::abs(st.f) < options.eps_cut * alpha && std::abs(st.fprime) < options.eps_cut * alpha;
    if (decayed) {
      sol.support_kind_ = SupportKind::AsymptoticDecay;
      return ode::StepAction::Stop;
    }
    return ode::StepAction::Continue;
  };

  ode::StepControl control;
  control.tol = {options.rel_tol, options.abs_tol};
  control.max_steps = options.max_steps;
  sol.stats_ = ode::integrate_dopri5<2>(rhs, options.z0, w0, options.z_max, control, on_step);
  return sol;
}

ProfileSolution integrate_profile(const PhysicalParams& p, SolutionCase c, double z_max, double rel_tol,
                                  double abs_tol) {
  ProfileOptions o;
  o.z_max = z_max;
  o.rel_tol = rel_tol;
  o.abs_tol = abs_tol;
  return integrate_profile(p, c, o);
}

std::optional<double> first_zero(const ProfileSolution& profile) {
  if (profile.Z_mu()) return profile.Z_mu();
  const auto& z = profile.z_nodes();
  const auto& f = profile.f_values();
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    if (f[i] > 0.0 && f[i + 1] <= 0.0) {
      return refine_root([&profile](double x) { return profile.at(x).f; }, z[i], z[i + 1]);
    }
  }
  return std::nullopt;
}

Residual profile_equation_residual(const ProfileOdeForm& form, double z, const ProfileState& s) {
  const double t_pressure = form.denominator(s.f) * s.fprime;
  const double t_gravity = form.gravity_coeff * s.M / std::pow(z, form.N - 1);
  const double t_forcing = form.forcing(z);
  return {t_pressure + t_gravity - t_forcing,
          std::max({std::abs(t_pressure), std::abs(t_gravity), std::abs(t_forcing)})};
}

Residual profile_residual(const ProfileSolution& profile, double z) {
  if (!(z > 0.0 && z < profile.support_end()))
    throw InvalidArgument(fmt::format("profile_residual: z={} outside (0, {})", z, profile.support_end()));
  const ProfileState s = profile.at(z);
  if (!(s.f > 0.0)) throw InvalidArgument("profile_residual: f(z) must be positive");
  return profile_equation_residual(profile.form(), z, s);
}

}  // namespace collapsar
