#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "collapsar/model.hpp"
#include "collapsar/profile.hpp"
#include "collapsar/scaling.hpp"

namespace collapsar {

/// Space-time fields of the self-similar ansatz
///
///   rho(t, r) = f(r / a(t)) / a(t)^N   for r < a(t) Z,  0 beyond,
///   V(t, r)   = a'(t) / a(t) * r,
///
/// where Z is the profile's support end (the first zero of f when one was
/// found, otherwise the last integrated node).
class RadialSolution {
 public:
  RadialSolution(ProfileSolution profile, ScalingFunction scaling, PhysicalParams params);

  const ProfileSolution& profile() const noexcept { return profile_; }
  const ScalingFunction& scaling() const noexcept { return scaling_; }
  const PhysicalParams& params() const noexcept { return params_; }

  /// a(t) times the profile support end.
  double support_radius(double t) const;

 private:
  ProfileSolution profile_;
  ScalingFunction scaling_;
  PhysicalParams params_;
};

/// Integrates the profile and builds the closed-form scaling for `c`.
RadialSolution make_radial_solution(const PhysicalParams& p, SolutionCase c, const ProfileOptions& options);

enum class DerivativeMode { Analytic, FiniteDifference };

struct ResidualOptions {
  /// Analytic chain-rule derivatives from the dense output, or central
  /// differences of the assembled fields as an independent cross-check.
  DerivativeMode derivatives = DerivativeMode::Analytic;
  /// Multiplies the velocity field; values other than 1 break the ansatz
  /// and exist for sensitivity checks.
  double velocity_scale = 1.0;
};

double density(const RadialSolution& sol, double t, double r);
double velocity(const RadialSolution& sol, double t, double r, double velocity_scale = 1.0);

/// Radial gravitational field alpha(N) / r^(N-1) * int_0^r (rho - Lambda) s^(N-1) ds,
/// using M(z) inside the support and the frozen total beyond it. 0 at r = 0.
double phi_r(const RadialSolution& sol, double t, double r);

/// rho_t + V rho_r + rho V_r + (N-1)/r rho V at 0 < r < a(t) Z.
Residual mass_residual(const RadialSolution& sol, double t, double r, const ResidualOptions& options = {});

/// rho (V_t + V V_r) + P_r + delta rho Phi_r
///   - mu_r ((N-1)/r V + V_r) - mu [-(N-1)/r^2 V + (N-1)/r V_r + V_rr]
/// with P = K rho^gamma and mu = kappa rho^theta, at 0 < r < a(t) Z.
Residual momentum_residual(const RadialSolution& sol, double t, double r, const ResidualOptions& options = {});

/// N Vol(N) int_0^{a Z} rho(t, r) r^(N-1) dr by adaptive Gauss-Kronrod
/// quadrature on each dense-output interval.
double total_mass(const RadialSolution& sol, double t);

struct ResidualPoint {
  double t = 0.0;
  double r = 0.0;
  double mass_raw = 0.0;
  double mass_scale = 0.0;
  double mass_scaled = 0.0;
  double momentum_raw = 0.0;
  double momentum_scale = 0.0;
  double momentum_scaled = 0.0;
};

struct ResidualReport {
  SolutionCase solution_case = SolutionCase::Case1a;
  std::vector<double> t_grid;
  std::size_t r_samples_per_t = 0;
  std::vector<ResidualPoint> points;  // row-major over (t, r)

  // Norms of the scaled residuals (raw / largest term magnitude).
  double mass_residual_max = 0.0;
  double mass_residual_l2 = 0.0;
  double momentum_residual_max = 0.0;
  double momentum_residual_l2 = 0.0;
  double mass_raw_max = 0.0;
  double momentum_raw_max = 0.0;

  std::vector<ResidualPoint> worst_mass;
  std::vector<ResidualPoint> worst_momentum;

  SupportKind support_kind = SupportKind::Truncated;
  std::optional<double> Z_mu;
  double support_end = 0.0;
  std::optional<double> blowup_time;
};

/// Evaluates both residual fields at r_j = (j + 1/2) / n_r * a(t) Z for
/// every t, rows computed concurrently.
ResidualReport evaluate_residuals(const RadialSolution& sol, std::span<const double> t_samples,
                                  std::size_t r_samples_per_t, const ResidualOptions& options = {},
                                  std::size_t worst_count = 5);

/// n evenly spaced times on [0, 0.9 T] when the scaling blows up at T,
/// otherwise on [0, 1].
std::vector<double> default_time_samples(const ScalingFunction& scaling, std::size_t n);

struct VerifyOptions {
  ProfileOptions profile;
  std::vector<double> t_samples;  // empty selects default_time_samples(5)
  std::size_t r_samples_per_t = 50;
  ResidualOptions residual;
  std::size_t worst_count = 5;
};

/// Validates, integrates the profile, builds the scaling and evaluates the
/// residual grid. Validation failures throw ValidationError before any
/// integration.
ResidualReport verify_solution(const PhysicalParams& p, SolutionCase c, const VerifyOptions& options);
ResidualReport verify_solution(const PhysicalParams& p, SolutionCase c, std::span<const double> t_samples,
                               std::size_t r_samples_per_t, double rel_tol);

}  // namespace collapsar
