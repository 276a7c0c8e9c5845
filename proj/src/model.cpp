#include "collapsar/model.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "collapsar/errors.hpp"

namespace collapsar {

namespace {

// Exponents are compared after recomputation from the same rational
// expression, so any mismatch beyond one rounding is a caller error.
bool same_exponent(double given, double expected) {
  return std::abs(given - expected) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(expected));
}

}  // namespace

std::string_view to_string(SolutionCase c) noexcept {
  switch (c) {
    case SolutionCase::Case1a: return "Case1a";
    case SolutionCase::Case1b: return "Case1b";
    case SolutionCase::Case2: return "Case2";
    case SolutionCase::LegacyGW: return "LegacyGW";
    case SolutionCase::Legacy2D: return "Legacy2D";
  }
  return "unknown";
}

std::optional<SolutionCase> parse_solution_case(std::string_view tag) noexcept {
  for (auto c : {SolutionCase::Case1a, SolutionCase::Case1b, SolutionCase::Case2, SolutionCase::LegacyGW,
                 SolutionCase::Legacy2D}) {
    if (to_string(c) == tag) return c;
  }
  return std::nullopt;
}

double unit_ball_volume(int N) {
  if (N <= 0) throw InvalidArgument(fmt::format("unit_ball_volume: dimension must be positive, got {}", N));
  // Gamma(N/2 + 1) by upward recursion from Gamma(1) = 1 or Gamma(1/2) = sqrt(pi).
  const bool even = N % 2 == 0;
  double gamma_value = even ? 1.0 : std::sqrt(std::numbers::pi);
  double x = even ? 1.0 : 0.5;
  const double target = 0.5 * N + 1.0;
  while (x < target) {
    gamma_value *= x;
    x += 1.0;
  }
  return std::pow(std::numbers::pi, 0.5 * N) / gamma_value;
}

double unit_sphere_area(int N) { return N * unit_ball_volume(N); }

double alpha_const(int N) {
  if (N <= 0) throw InvalidArgument(fmt::format("alpha_const: dimension must be positive, got {}", N));
  if (N == 1) return 2.0;
  if (N == 2) return 2.0 * std::numbers::pi;
  return N * (N - 2) * unit_ball_volume(N);
}

Exponents exponents_for(SolutionCase c, int N) {
  const double dim = N;
  switch (c) {
    case SolutionCase::Case1a:
      if (N < 2) break;
      return {(2.0 * dim - 2.0) / dim, (2.0 * dim - 3.0) / dim};
    case SolutionCase::Case1b:
      if (N < 2) break;
      return {(2.0 * dim - 2.0) / dim, (3.0 * dim - 4.0) / (2.0 * dim)};
    case SolutionCase::Case2: {
      if (N < 2) break;
      const double g = (2.0 * dim - 2.0) / dim;
      return {g, g};
    }
    case SolutionCase::LegacyGW:
      if (N < 3) break;
      return {(2.0 * dim - 2.0) / dim, 0.0};
    case SolutionCase::Legacy2D:
      if (N != 2) break;
      return {1.0, 0.0};
  }
  throw InvalidArgument(fmt::format("exponents_for: {} is not defined for N={}", to_string(c), N));
}

PhysicalParams with_case_exponents(PhysicalParams p, SolutionCase c) {
  const auto e = exponents_for(c, p.N);
  p.gamma = e.gamma;
  p.theta = e.theta;
  return p;
}

double case2_rate(const PhysicalParams& p) { return std::sqrt(p.delta * alpha_const(p.N) * p.Lambda / p.N); }

double case2_denominator_coeff(const PhysicalParams& p) {
  return p.gamma * p.K - p.kappa * p.theta * std::sqrt(p.N * p.delta * alpha_const(p.N) * p.Lambda);
}

ValidationReport validate(const PhysicalParams& p, SolutionCase c) {
  ValidationReport r;
  auto fail = [&r](std::string msg) { r.violations.push_back(std::move(msg)); };

  if (p.N < 2) fail(fmt::format("N>=2 required (got {})", p.N));
  if (!(p.n > 0.0)) fail("n>0 required");
  if (!(p.alpha_ic > 0.0)) fail("alpha>0 required");
  if (!(p.K > 0.0)) fail("K>0 required");
  if (!(p.kappa >= 0.0)) fail("kappa>=0 required");
  if (!(p.theta >= 0.0)) fail("theta>=0 required");
  if (!(p.Lambda >= 0.0)) fail("Lambda>=0 required");
  if (p.delta < -1 || p.delta > 1) fail(fmt::format("delta must be -1, 0 or 1 (got {})", p.delta));
  for (double v : {p.K, p.kappa, p.gamma, p.theta, p.Lambda, p.m, p.n, p.alpha_ic, p.lambda_legacy}) {
    if (!std::isfinite(v)) {
      fail("all parameters must be finite");
      break;
    }
  }

  if (c == SolutionCase::LegacyGW && p.N < 3) fail("LegacyGW requires N>=3");
  if (c == SolutionCase::Legacy2D && p.N != 2) fail("Legacy2D requires N=2");

  if (p.N >= 2 && !(c == SolutionCase::LegacyGW && p.N < 3) && !(c == SolutionCase::Legacy2D && p.N != 2)) {
    const auto e = exponents_for(c, p.N);
    if (!same_exponent(p.gamma, e.gamma))
      fail(fmt::format("gamma must equal {:.17g} for {} with N={}", e.gamma, to_string(c), p.N));
    const bool inviscid_legacy = c == SolutionCase::LegacyGW || c == SolutionCase::Legacy2D;
    if (!inviscid_legacy && !same_exponent(p.theta, e.theta))
      fail(fmt::format("theta must equal {:.17g} for {} with N={}", e.theta, to_string(c), p.N));
  }

  switch (c) {
    case SolutionCase::Case1a:
    case SolutionCase::Case1b:
      if (p.Lambda != 0.0) fail("Lambda must be 0 for the polynomial scaling cases");
      break;
    case SolutionCase::Case2:
      if (!(p.delta * p.Lambda > 0.0)) {
        fail("delta·Lambda must be positive");
      } else if (p.N >= 2 && case2_denominator_coeff(p) == 0.0) {
        fail("gamma·K - kappa·theta·sqrt(N·delta·alpha(N)·Lambda) must be nonzero");
      }
      break;
    case SolutionCase::LegacyGW:
    case SolutionCase::Legacy2D:
      break;
  }
  return r;
}

void require_valid(const PhysicalParams& p, SolutionCase c) {
  auto report = validate(p, c);
  if (!report.ok()) throw ValidationError(std::move(report.violations));
}

}  // namespace collapsar
