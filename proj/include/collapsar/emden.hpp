#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "collapsar/dopri5.hpp"
#include "collapsar/profile.hpp"

namespace collapsar {

/// Earlier Emden-type profile equations
///
///   y'' + (N-1)/z y' + coeff g(y) = mu,  y(0) = alpha, y'(0) = 0,
///
/// PowerLaw (N >= 3): g(y) = y^(N/(N-2)), coeff = alpha(N) / ((2N-2) K).
/// Exponential2D (N = 2): g(y) = e^y, coeff = 2 pi / K.
enum class EmdenKind { PowerLaw, Exponential2D };

std::string_view to_string(EmdenKind k) noexcept;
std::optional<EmdenKind> parse_emden_kind(std::string_view tag) noexcept;

struct EmdenState {
  double y;
  double yprime;
  double ysecond;  // derivative of the y' interpolant
};

class EmdenProfile {
 public:
  EmdenKind kind() const noexcept { return kind_; }
  int N() const noexcept { return N_; }
  double K() const noexcept { return K_; }
  double mu() const noexcept { return mu_; }
  double coeff() const noexcept { return coeff_; }
  double alpha_ic() const noexcept { return alpha_ic_; }
  double exponent() const noexcept { return exponent_; }

  const std::vector<double>& y_nodes() const noexcept { return y_nodes_; }
  const std::vector<double>& y_values() const noexcept { return y_values_; }
  const std::vector<double>& yprime_values() const noexcept { return yprime_values_; }
  std::optional<double> Z_mu() const noexcept { return Z_mu_; }
  const ode::IntegratorStats& integrator_stats() const noexcept { return stats_; }
  double support_end() const noexcept { return y_nodes_.back(); }

  /// Nonlinearity g(y); PowerLaw clips negative y to zero.
  double nonlinearity(double y) const noexcept;

  EmdenState at(double z) const;

 private:
  friend EmdenProfile integrate_emden(EmdenKind, int, double, double, double, double, double);

  EmdenKind kind_ = EmdenKind::PowerLaw;
  int N_ = 3;
  double K_ = 1.0;
  double mu_ = 0.0;
  double coeff_ = 0.0;
  double alpha_ic_ = 1.0;
  double exponent_ = 3.0;
  double z0_ = 1e-6;
  double series_c_ = 0.0;
  std::vector<double> y_nodes_;
  std::vector<double> y_values_;
  std::vector<double> yprime_values_;
  std::optional<double> Z_mu_;
  ode::IntegratorStats stats_;
  ode::DenseTrajectory<2> trajectory_;
};

/// Integrates from the series start y = alpha + (mu - coeff g(alpha)) z^2 / (2N)
/// to z_max or, for PowerLaw, the first zero of y.
EmdenProfile integrate_emden(EmdenKind kind, int N, double K, double mu, double alpha_ic, double z_max,
                             double rel_tol = 1e-10);

/// Plug-back of an arbitrary state into the Emden equation.
Residual emden_equation_residual(const EmdenProfile& profile, double z, const EmdenState& s);

/// Plug-back of the interpolated profile at 0 < z < support_end().
Residual emden_residual(const EmdenProfile& profile, double z);

}  // namespace collapsar
