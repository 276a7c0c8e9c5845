#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "collapsar/errors.hpp"

namespace collapsar {

/// Which self-similar family a parameter set belongs to.
///
/// Case1a, Case1b and Case2 are the viscous families with pressure; LegacyGW
/// (N >= 3, gamma = (2N-2)/N) and Legacy2D (N = 2, gamma = 1) are the earlier
/// inviscid Euler-Poisson collapse solutions they generalize.
enum class SolutionCase { Case1a, Case1b, Case2, LegacyGW, Legacy2D };

std::string_view to_string(SolutionCase c) noexcept;
std::optional<SolutionCase> parse_solution_case(std::string_view tag) noexcept;

/// Scalar parameters of the radially symmetric Navier-Stokes-Poisson system.
///
/// Pressure is P = K rho^gamma, viscosity mu = kappa rho^theta, the Poisson
/// source is alpha(N) rho - Lambda and delta selects attractive (+1),
/// absent (0) or repulsive (-1) forcing. m, n parametrize the temporal
/// scaling, alpha_ic is the central value f(0) of the density profile and
/// lambda_legacy drives the legacy scaling ODE a'' = -lambda / a^(N-1).
struct PhysicalParams {
  int N = 3;
  double K = 1.0;
  double kappa = 0.0;
  double gamma = 4.0 / 3.0;
  double theta = 1.0;
  int delta = 1;
  double Lambda = 0.0;
  double m = -1.0;
  double n = 1.0;
  double alpha_ic = 1.0;
  double lambda_legacy = 0.0;

  friend bool operator==(const PhysicalParams&, const PhysicalParams&) = default;
};

struct Exponents {
  double gamma;
  double theta;

  friend bool operator==(const Exponents&, const Exponents&) = default;
};

/// Volume of the unit ball in R^N, with Gamma(N/2 + 1) evaluated in closed
/// form (factorials and half-integer products).
double unit_ball_volume(int N);

/// Surface measure of the unit sphere, N * Vol(N).
double unit_sphere_area(int N);

/// Poisson coupling constant alpha(N): 2 for N = 1, 2 pi for N = 2 and
/// N (N - 2) Vol(N) otherwise. Throws InvalidArgument for N <= 0.
double alpha_const(int N);

/// Exact (gamma, theta) pair required by the given family in dimension N.
/// The legacy families are inviscid and report theta = 0.
Exponents exponents_for(SolutionCase c, int N);

/// Copy of `p` with gamma and theta replaced by exponents_for(c, p.N).
PhysicalParams with_case_exponents(PhysicalParams p, SolutionCase c);

/// Exponential rate sqrt(delta alpha(N) Lambda / N) of the Case2 scaling.
double case2_rate(const PhysicalParams& p);

/// Combined coefficient gamma K - kappa theta sqrt(N delta alpha(N) Lambda)
/// multiplying f^(gamma-2) f' in the Case2 profile equation.
double case2_denominator_coeff(const PhysicalParams& p);

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const PhysicalParams& p, SolutionCase c);

/// Throws ValidationError listing every violation when validate() fails.
void require_valid(const PhysicalParams& p, SolutionCase c);

}  // namespace collapsar
