#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "collapsar/dopri5.hpp"
#include "collapsar/model.hpp"

namespace collapsar {

/// How the integrated profile ended.
enum class SupportKind {
  ZeroCrossing,     // f reached zero at a finite Z_mu (free boundary)
  AsymptoticDecay,  // f and f' fell below eps_cut * alpha without crossing
  Truncated,        // z_max reached with f still resolved
};

std::string_view to_string(SupportKind k) noexcept;

/// Coefficients of the reduced momentum equation
///
///   D(f) f'(z) + gravity_coeff * M(z) / z^(N-1) = forcing_slope * z,
///   D(f) = pressure_coeff f^(gamma-2) - viscous_coeff f^(theta-2),
///   M(z) = int_0^z f(s) s^(N-1) ds.
///
/// Case1a: viscous_coeff = m kappa theta N, no forcing.
/// Case1b: viscous_coeff = 2 m kappa theta, forcing_slope = 2 (N-2) m^2 / N^2.
/// Case2: pressure_coeff = gamma K - kappa theta sqrt(N delta alpha(N) Lambda)
///        absorbs the viscous term (theta = gamma), no forcing.
struct ProfileOdeForm {
  int N = 3;
  double gamma = 4.0 / 3.0;
  double pressure_coeff = 0.0;
  double pressure_exponent = 0.0;
  double viscous_coeff = 0.0;
  double viscous_exponent = 0.0;
  double forcing_slope = 0.0;
  double gravity_coeff = 0.0;
  double denominator_floor = 1e-12;

  /// D(|f|); the magnitude lets the integrator step across a sign change.
  double denominator(double f) const noexcept;
  double forcing(double z) const noexcept { return forcing_slope * z; }
};

ProfileOdeForm make_profile_form(const PhysicalParams& p, SolutionCase c);

struct ProfileDerivative {
  double df_dz;
  double dM_dz;
};

/// Right-hand side of the (f, M) system. Throws DegenerateDenominator when
/// |D(f)| falls below form.denominator_floor, InvalidArgument for z <= 0.
ProfileDerivative ode_rhs(double z, double f, double M, const ProfileOdeForm& form);

struct SeriesStart {
  double f;
  double M;
  double fprime;
  double f2;  // f''(0)
};

/// Regular expansion f = alpha + f2 z^2 / 2, M = alpha z^N / N + f2 z^(N+2) / (2 (N+2)),
/// with f2 = (forcing'(0) - gravity_coeff alpha / N) / D(alpha).
SeriesStart series_start(const ProfileOdeForm& form, double alpha_ic, double z0);

struct ProfileOptions {
  double z_max = 10.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double z0 = 1e-6;
  double eps_cut = 1e-8;
  std::size_t max_steps = 2'000'000;
};

struct ProfileState {
  double f;
  double fprime;
  double M;
};

/// Interpolable radial profile f(z) with its cumulative mass M(z).
///
/// Immutable once built by integrate_profile().
class ProfileSolution {
 public:
  /// Internal state variable carried by the integrator. Pure pressure forms
  /// (no separate viscous term) are integrated in f^(gamma-1), or ln f when
  /// gamma = 1, which crosses zero linearly and keeps the free boundary
  /// well conditioned.
  enum class Variable { Density, Enthalpy, LogDensity };

  SolutionCase solution_case() const noexcept { return case_; }
  const PhysicalParams& params() const noexcept { return params_; }
  const ProfileOdeForm& form() const noexcept { return form_; }
  Variable variable() const noexcept { return variable_; }

  const std::vector<double>& z_nodes() const noexcept { return z_nodes_; }
  const std::vector<double>& f_values() const noexcept { return f_values_; }
  const std::vector<double>& fprime_values() const noexcept { return fprime_values_; }
  const std::vector<double>& M_values() const noexcept { return M_values_; }

  std::optional<double> Z_mu() const noexcept { return Z_mu_; }
  SupportKind support_kind() const noexcept { return support_kind_; }
  const ode::IntegratorStats& integrator_stats() const noexcept { return stats_; }
  const ProfileOptions& options() const noexcept { return options_; }

  /// Right end of the profile: Z_mu for a crossing, otherwise the last node.
  double support_end() const noexcept { return z_nodes_.back(); }
  /// M at support_end().
  double total_moment() const noexcept { return M_values_.back(); }

  /// f, f' and M at 0 <= z <= support_end() from the dense output; f' is the
  /// exact derivative of the interpolant, independent of the ODE relation.
  ProfileState at(double z) const;

 private:
  friend ProfileSolution integrate_profile(const PhysicalParams&, SolutionCase, const ProfileOptions&);

  ProfileState from_internal(double z, const ode::State<2>& w, const ode::State<2>& dw) const noexcept;

  SolutionCase case_ = SolutionCase::Case1a;
  PhysicalParams params_;
  ProfileOdeForm form_;
  ProfileOptions options_;
  Variable variable_ = Variable::Density;
  SeriesStart series_{};
  std::vector<double> z_nodes_;
  std::vector<double> f_values_;
  std::vector<double> fprime_values_;
  std::vector<double> M_values_;
  std::optional<double> Z_mu_;
  SupportKind support_kind_ = SupportKind::Truncated;
  ode::IntegratorStats stats_;
  ode::DenseTrajectory<2> trajectory_;
};

/// Integrates the profile equation of case `c` outward from the series start
/// at options.z0 until z_max, the first zero of f, or asymptotic decay.
/// Throws ValidationError before integrating when validate(p, c) fails.
ProfileSolution integrate_profile(const PhysicalParams& p, SolutionCase c, const ProfileOptions& options);
ProfileSolution integrate_profile(const PhysicalParams& p, SolutionCase c, double z_max, double rel_tol,
                                  double abs_tol);

/// Bisection for a sign change of `fn` on [lo, hi]; requires fn(lo) and
/// fn(hi) of opposite sign (or fn(hi) == 0).
double refine_root(const std::function<double(double)>& fn, double lo, double hi, double rel_tol = 1e-12);

/// Smallest zero of f: Z_mu when the integrator stopped at a crossing,
/// otherwise the first bracketed sign change between nodes, if any.
std::optional<double> first_zero(const ProfileSolution& profile);

struct Residual {
  double value = 0.0;  // signed left-minus-right side
  double scale = 0.0;  // largest magnitude among the terms

  double scaled() const noexcept { return scale > 0.0 ? value / scale : value; }
};

/// Plug-back of an arbitrary (f, f', M) state into the profile equation.
Residual profile_equation_residual(const ProfileOdeForm& form, double z, const ProfileState& s);

/// Plug-back of the interpolated profile at 0 < z < support_end().
Residual profile_residual(const ProfileSolution& profile, double z);

}  // namespace collapsar
