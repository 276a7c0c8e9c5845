#include <doctest.h>

#include <cmath>
#include <iomanip>
#include <numbers>

#include "collapsar/profile.hpp"
#include "oracles.hpp"

using namespace collapsar;

namespace {

PhysicalParams base(SolutionCase c, int N = 3) {
  PhysicalParams p;
  p.N = N;
  p.K = 1.0;
  p.kappa = 1.0;
  p.delta = 1;
  p.m = -1.0;
  p.n = 1.0;
  p.alpha_ic = 1.0;
  if (c == SolutionCase::Case2) p.Lambda = 0.01 * N / alpha_const(N);
  return with_case_exponents(p, c);
}

PhysicalParams inviscid() {
  auto p = base(SolutionCase::Case1a);
  p.kappa = 0.0;
  return p;
}

ProfileOptions opts(double rel_tol = 1e-10, double z_max = 10.0) {
  ProfileOptions o;
  o.rel_tol = rel_tol;
  o.abs_tol = 1e-2 * rel_tol;
  o.z_max = z_max;
  return o;
}

// First zero of the inviscid N = 3, K = 1 profile: the enthalpy f^(1/3)
// obeys the index-3 Lane-Emden equation in x = sqrt(pi) z.
double inviscid_zero_oracle() { return oracle::lane_emden3_first_zero() / std::sqrt(std::numbers::pi); }

double max_scaled_residual(const ProfileSolution& prof, int samples = 400) {
  double worst = 0.0;
  const double end = prof.support_end();
  for (int j = 0; j < samples; ++j) {
    const double z = (j + 0.5) / samples * end;
    worst = std::max(worst, std::abs(profile_residual(prof, z).scaled()));
  }
  return worst;
}

}  // namespace

TEST_CASE("ode_rhs examples") {
  SUBCASE("no forcing, no gravity: flat") {
    auto p = base(SolutionCase::Case1a);
    p.delta = 0;
    const auto form = make_profile_form(p, SolutionCase::Case1a);
    const auto d = ode_rhs(0.7, 0.3, 0.05, form);
    CHECK(d.df_dz == 0.0);
    CHECK(d.dM_dz == doctest::Approx(0.3 * 0.49).epsilon(1e-15));
  }
  SUBCASE("inviscid small-z slope is -pi z") {
    const auto form = make_profile_form(inviscid(), SolutionCase::Case1a);
    const double z = 1e-4;
    // Independent M of the leading profile f = 1 - pi z^2 / 2.
    const double M = oracle::simpson([](double s) { return (1.0 - std::numbers::pi * s * s / 2) * s * s; }, 0.0, z,
                                     1e-30);
    const double f = 1.0 - std::numbers::pi * z * z / 2;
    const auto d = ode_rhs(z, f, M, form);
    CHECK(d.df_dz == doctest::Approx(-std::numbers::pi * z).epsilon(1e-7));
  }
  SUBCASE("Case1a and Case1b coincide at N = 2") {
    const auto pa = base(SolutionCase::Case1a, 2);
    const auto pb = base(SolutionCase::Case1b, 2);
    const auto fa = make_profile_form(pa, SolutionCase::Case1a);
    const auto fb = make_profile_form(pb, SolutionCase::Case1b);
    CHECK(fb.forcing_slope == 0.0);
    for (double z : {0.1, 0.5, 2.0}) {
      const auto a = ode_rhs(z, 0.8, 0.2, fa);
      const auto b = ode_rhs(z, 0.8, 0.2, fb);
      CHECK(a.df_dz == doctest::Approx(b.df_dz).epsilon(1e-15));
      CHECK(a.dM_dz == b.dM_dz);
    }
  }
  SUBCASE("form coefficients") {
    const auto f1a = make_profile_form(base(SolutionCase::Case1a), SolutionCase::Case1a);
    CHECK(f1a.viscous_coeff == doctest::Approx(-3.0).epsilon(1e-15));  // m kappa theta N
    CHECK(f1a.gravity_coeff == doctest::Approx(4 * std::numbers::pi).epsilon(1e-15));
    const auto f1b = make_profile_form(base(SolutionCase::Case1b), SolutionCase::Case1b);
    CHECK(f1b.viscous_coeff == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));  // 2 m kappa theta
    CHECK(f1b.forcing_slope == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
    const auto p2 = base(SolutionCase::Case2);
    const auto f2 = make_profile_form(p2, SolutionCase::Case2);
    CHECK(f2.viscous_coeff == 0.0);
    CHECK(f2.pressure_coeff == doctest::Approx(case2_denominator_coeff(p2)).epsilon(1e-15));
  }
  SUBCASE("degenerate denominator and bad z") {
    auto p = base(SolutionCase::Case1a);
    p.m = 1.0;
    p.K = 2.25;  // gamma K = m kappa theta N = 3 at f = 1
    const auto form = make_profile_form(p, SolutionCase::Case1a);
    CHECK_THROWS_AS(ode_rhs(0.5, 1.0, 0.1, form), DegenerateDenominator);
    try {
      ode_rhs(0.5, 1.0, 0.1, form);
    } catch (const DegenerateDenominator& e) {
      CHECK(e.z() == 0.5);
      CHECK(e.f() == 1.0);
    }
    CHECK_THROWS_AS(ode_rhs(0.0, 1.0, 0.0, make_profile_form(inviscid(), SolutionCase::Case1a)), InvalidArgument);
  }
  SUBCASE("legacy cases have no profile form") {
    PhysicalParams p = base(SolutionCase::Case1a);
    CHECK_THROWS_AS(make_profile_form(with_case_exponents(p, SolutionCase::LegacyGW), SolutionCase::LegacyGW),
                    InvalidArgument);
  }
}

TEST_CASE("series start") {
  SUBCASE("flat") {
    auto p = base(SolutionCase::Case1a);
    p.delta = 0;
    const auto s = series_start(make_profile_form(p, SolutionCase::Case1a), 1.0, 1e-6);
    CHECK(s.f == 1.0);
    CHECK(s.fprime == 0.0);
    CHECK(s.f2 == 0.0);
    CHECK(s.M == doctest::Approx(1e-18 / 3).epsilon(1e-15));
  }
  SUBCASE("inviscid N = 3: f2 = -pi") {
    const auto s = series_start(make_profile_form(inviscid(), SolutionCase::Case1a), 1.0, 1e-6);
    CHECK(s.f2 == doctest::Approx(-std::numbers::pi).epsilon(1e-15));
    CHECK(s.fprime == doctest::Approx(-std::numbers::pi * 1e-6).epsilon(1e-15));
  }
  SUBCASE("Case1b forcing enters f2") {
    auto p = base(SolutionCase::Case1b);
    p.delta = 0;
    const auto s = series_start(make_profile_form(p, SolutionCase::Case1b), 1.0, 1e-6);
    // forcing'(0) = 2/9, D(1) = gamma K - 2 m kappa theta = 4/3 + 5/3.
    CHECK(s.f2 == doctest::Approx(2.0 / 27.0).epsilon(1e-14));
  }
  SUBCASE("degenerate at the origin") {
    auto p = base(SolutionCase::Case1a);
    p.m = 1.0;
    p.K = 2.25;
    CHECK_THROWS_AS(series_start(make_profile_form(p, SolutionCase::Case1a), 1.0, 1e-6), DegenerateDenominator);
  }
}

TEST_CASE("f2 by Richardson extrapolation of the integrated profile") {
  const auto prof = integrate_profile(inviscid(), SolutionCase::Case1a, opts(1e-13, 1.0));
  auto g = [&](double z) { return 2.0 * (prof.at(z).f - 1.0) / (z * z); };
  const double z = 0.02;
  const double f2 = (4.0 * g(z / 2) - g(z)) / 3.0;
  CHECK(f2 == doctest::Approx(-std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("flat profile is exact") {
  for (auto c : {SolutionCase::Case1a, SolutionCase::Case1b}) {
    auto p = base(c);
    p.delta = 0;
    p.alpha_ic = 0.75;
    if (c == SolutionCase::Case1b) p.m = 0.0;  // no forcing
    const auto prof = integrate_profile(p, c, opts());
    CAPTURE(to_string(c));
    CHECK(prof.support_kind() == SupportKind::Truncated);
    CHECK_FALSE(prof.Z_mu().has_value());
    CHECK_FALSE(first_zero(prof).has_value());
    CHECK(prof.support_end() == 10.0);
    for (double f : prof.f_values()) CHECK(f == 0.75);
    for (double fp : prof.fprime_values()) CHECK(fp == 0.0);
    for (double z : {0.3, 1.7, 9.9}) CHECK(profile_residual(prof, z).value == 0.0);
    CHECK(prof.total_moment() == doctest::Approx(0.75 * 1000.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("basic node invariants") {
  for (auto c : {SolutionCase::Case1a, SolutionCase::Case1b, SolutionCase::Case2}) {
    const auto prof = integrate_profile(base(c), c, opts());
    CAPTURE(to_string(c));
    REQUIRE(prof.z_nodes().size() > 3);
    CHECK(prof.z_nodes()[0] == 0.0);
    CHECK(prof.f_values()[0] == 1.0);
    CHECK(prof.fprime_values()[0] == 0.0);
    CHECK(prof.M_values()[0] == 0.0);
    for (std::size_t i = 1; i < prof.z_nodes().size(); ++i) {
      CHECK(prof.z_nodes()[i] > prof.z_nodes()[i - 1]);
      if (prof.f_values()[i - 1] >= 0.0) CHECK(prof.M_values()[i] >= prof.M_values()[i - 1]);
    }
    CHECK(prof.integrator_stats().accepted_steps > 0);
    CHECK(prof.integrator_stats().rel_tol == 1e-10);
  }
}

TEST_CASE("N = 2: Case1a and Case1b profiles agree pointwise") {
  const auto a = integrate_profile(base(SolutionCase::Case1a, 2), SolutionCase::Case1a, opts());
  const auto b = integrate_profile(base(SolutionCase::Case1b, 2), SolutionCase::Case1b, opts());
  REQUIRE(a.z_nodes().size() == b.z_nodes().size());
  for (std::size_t i = 0; i < a.z_nodes().size(); ++i) {
    CHECK(std::abs(a.z_nodes()[i] - b.z_nodes()[i]) <= 1e-10 * std::max(1.0, a.z_nodes()[i]));
    CHECK(std::abs(a.f_values()[i] - b.f_values()[i]) <= 1e-10);
  }
  const double end = std::min(a.support_end(), b.support_end());
  for (int j = 1; j < 200; ++j) {
    const double z = end * j / 200.0;
    CHECK(std::abs(a.at(z).f - b.at(z).f) <= 1e-10);
    CHECK(std::abs(a.at(z).M - b.at(z).M) <= 1e-10 * std::max(1.0, a.at(z).M));
  }
}

TEST_CASE("inviscid N = 3 profile has a finite first zero") {
  const double oracle_Z = inviscid_zero_oracle();
  MESSAGE("oracle first zero " << std::setprecision(15) << oracle_Z);
  const auto prof = integrate_profile(inviscid(), SolutionCase::Case1a, opts());
  REQUIRE(prof.support_kind() == SupportKind::ZeroCrossing);
  REQUIRE(prof.Z_mu().has_value());
  CHECK(std::abs(*prof.Z_mu() - oracle_Z) <= 1e-8);
  CHECK(first_zero(prof) == prof.Z_mu());

  // Tight-tolerance reference run agrees too.
  const auto ref = integrate_profile(inviscid(), SolutionCase::Case1a, opts(1e-12));
  CHECK(std::abs(*prof.Z_mu() - *ref.Z_mu()) <= 1e-8);

  // f decreasing and positive before the zero, zero at Z.
  const auto& f = prof.f_values();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    CHECK(f[i] > 0.0);
    CHECK(f[i] < f[i - 1]);
  }
  CHECK(std::abs(prof.at(*prof.Z_mu()).f) <= 10 * 1e-10);
}

TEST_CASE("M agrees with independent quadrature of f z^(N-1)") {
  for (auto [p, c] : {std::pair{inviscid(), SolutionCase::Case1a}, std::pair{base(SolutionCase::Case1b), SolutionCase::Case1b},
                      std::pair{base(SolutionCase::Case2), SolutionCase::Case2}}) {
    const auto prof = integrate_profile(p, c, opts());
    const auto& z = prof.z_nodes();
    double worst = 0.0;
    double prev_z = 0.0, prev_I = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) {
      const double I =
          prev_I + oracle::simpson([&](double s) { return prof.at(s).f * s * s; }, prev_z, z[i], 1e-15 * std::max(1e-30, prof.M_values()[i]));
      prev_z = z[i];
      prev_I = I;
      worst = std::max(worst, std::abs(I - prof.M_values()[i]) / std::abs(prof.M_values()[i]));
    }
    CAPTURE(to_string(c));
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("profile residual is bounded by the tolerance") {
  for (auto [p, c] : {std::pair{inviscid(), SolutionCase::Case1a}, std::pair{base(SolutionCase::Case1a), SolutionCase::Case1a},
                      std::pair{base(SolutionCase::Case1b), SolutionCase::Case1b},
                      std::pair{base(SolutionCase::Case2), SolutionCase::Case2}}) {
    const auto prof = integrate_profile(p, c, opts());
    CAPTURE(to_string(c));
    CHECK(max_scaled_residual(prof) <= 100 * 1e-10);
  }
}

TEST_CASE("profile residual converges with the step size") {
  // Dividing rel_tol by 2^5 halves the steps of a fifth-order pair.
  for (auto [p, c] : {std::pair{inviscid(), SolutionCase::Case1a}, std::pair{base(SolutionCase::Case1b), SolutionCase::Case1b},
                      std::pair{base(SolutionCase::Case2), SolutionCase::Case2}}) {
    const double coarse = max_scaled_residual(integrate_profile(p, c, opts(1e-8)));
    const double fine = max_scaled_residual(integrate_profile(p, c, opts(1e-8 / 32)));
    CAPTURE(to_string(c));
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(coarse / fine >= 8.0);
  }
}

TEST_CASE("profile residual detects a corrupted profile") {
  const auto prof = integrate_profile(base(SolutionCase::Case1a), SolutionCase::Case1a, opts());
  for (double frac : {0.1, 0.4, 0.8}) {
    const double z = frac * prof.support_end();
    auto s = prof.at(z);
    s.f *= 1.01;
    CHECK(std::abs(profile_equation_residual(prof.form(), z, s).scaled()) >= 1e-3);
  }
}

TEST_CASE("profile residual domain") {
  const auto prof = integrate_profile(inviscid(), SolutionCase::Case1a, opts());
  CHECK_THROWS_AS(profile_residual(prof, 0.0), InvalidArgument);
  CHECK_THROWS_AS(profile_residual(prof, prof.support_end() + 0.1), InvalidArgument);
  CHECK_THROWS_AS(prof.at(-1.0), InvalidArgument);
}

TEST_CASE("validation runs before integration") {
  auto p = base(SolutionCase::Case2);
  p.Lambda = 0.0;
  CHECK_THROWS_AS(integrate_profile(p, SolutionCase::Case2, opts()), ValidationError);
}

TEST_CASE("refine_root contract") {
  const double r = refine_root([](double x) { return x * x - 2.0; }, 1.0, 2.0);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r >= 1.0);
  CHECK(r <= 2.0);
  CHECK(refine_root([](double x) { return x - 1.5; }, 1.0, 1.5) == 1.5);
  CHECK_THROWS_AS(refine_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), InvalidArgument);
}
