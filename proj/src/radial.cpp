#include "collapsar/radial.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "collapsar/errors.hpp"

namespace collapsar {

namespace {

struct Fields {
  double a;
  double a_dot;
  double a_ddot;
  double z;
  ProfileState f;
};

Fields interior_fields(const RadialSolution& sol, double t, double r) {
  const ScalingValue s = a_eval(sol.scaling(), t);
  const double z = r / s.a;
  if (!(r > 0.0 && z < sol.profile().support_end()))
    throw InvalidArgument(fmt::format("residual requested at r={} outside the open support (0, {})", r,
                                      s.a * sol.profile().support_end()));
  const ProfileState st = sol.profile().at(z);
  if (!(st.f > 0.0)) throw InvalidArgument(fmt::format("profile not positive at z={}", z));
  return {s.a, s.a_dot, s.a_ddot, z, st};
}

double max_abs(std::initializer_list<double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Central-difference steps that keep every probe inside the support and
// before any blowup time.
struct FdSteps {
  double ht;
  double hr;
  double hr2;
};

FdSteps fd_steps(const RadialSolution& sol, double t, double r) {
  const double eps = std::numeric_limits<double>::epsilon();
  double ht = std::cbrt(eps) * std::max(1.0, std::abs(t));
  if (auto T = sol.scaling().blowup_time()) ht = std::min(ht, 0.25 * (*T - t));
  const double R = sol.support_radius(t);
  const double room = 0.25 * std::min(r, R - r);
  const double hr = std::min(std::cbrt(eps) * std::max(r, 1e-3 * R), room);
  const double hr2 = std::min(std::pow(eps, 0.25) * std::max(r, 1e-3 * R), room);
  return {ht, hr, hr2};
}

}  // namespace

RadialSolution::RadialSolution(ProfileSolution profile, ScalingFunction scaling, PhysicalParams params)
    : profile_(std::move(profile)), scaling_(std::move(scaling)), params_(params) {}

double RadialSolution::support_radius(double t) const { return a_eval(scaling_, t).a * profile_.support_end(); }

RadialSolution make_radial_solution(const PhysicalParams& p, SolutionCase c, const ProfileOptions& options) {
  ProfileSolution profile = integrate_profile(p, c, options);
  return RadialSolution(std::move(profile), ScalingFunction::closed_form(p, c), p);
}

double density(const RadialSolution& sol, double t, double r) {
  if (!(r >= 0.0)) throw InvalidArgument(fmt::format("density: r must be non-negative (got {})", r));
  const double a = a_eval(sol.scaling(), t).a;
  const double z = r / a;
  if (z >= sol.profile().support_end()) return 0.0;
  return sol.profile().at(z).f / std::pow(a, sol.params().N);
}

double velocity(const RadialSolution& sol, double t, double r, double velocity_scale) {
  const ScalingValue s = a_eval(sol.scaling(), t);
  return velocity_scale * (s.a_dot / s.a) * r;
}

double phi_r(const RadialSolution& sol, double t, double r) {
  if (!(r >= 0.0)) throw InvalidArgument(fmt::format("phi_r: r must be non-negative (got {})", r));
  const double a = a_eval(sol.scaling(), t).a;
  if (r == 0.0) return 0.0;
  const int N = sol.params().N;
  const double z = r / a;
  const ProfileSolution& prof = sol.profile();
  // int_0^r rho s^(N-1) ds = M(r / a): the a^N factors cancel.
  const double enclosed = z >= prof.support_end() ? prof.total_moment() : prof.at(z).M;
  return alpha_const(N) / std::pow(r, N - 1) * (enclosed - sol.params().Lambda * std::pow(r, N) / N);
}

Residual mass_residual(const RadialSolution& sol, double t, double r, const ResidualOptions& options) {
  const int N = sol.params().N;
  const double s = options.velocity_scale;
  const Fields fl = interior_fields(sol, t, r);
  if (options.derivatives == DerivativeMode::Analytic) {
    // Every term is (a'/a) / a^N times a profile expression; sharing the factor
    // keeps exact cancellations exact (flat profiles give 0, not rounding).
    const double c = fl.a_dot / fl.a / std::pow(fl.a, N);
    const double t1 = -c * (N * fl.f.f + fl.z * fl.f.fprime);
    const double t2 = s * c * (fl.z * fl.f.fprime);
    const double t3 = s * c * fl.f.f;
    const double t4 = s * c * ((N - 1) * fl.f.f);
    const double divergence = s * c * (N * fl.f.f);  // t3 + t4
    return {t1 + t2 + divergence, max_abs({t1, t2, t3, t4})};
  }
  const FdSteps h = fd_steps(sol, t, r);
  const double rho = density(sol, t, r);
  const double rho_t = (density(sol, t + h.ht, r) - density(sol, t - h.ht, r)) / (2.0 * h.ht);
  const double rho_r = (density(sol, t, r + h.hr) - density(sol, t, r - h.hr)) / (2.0 * h.hr);
  const double V = velocity(sol, t, r, s);
  const double V_r = (velocity(sol, t, r + h.hr, s) - velocity(sol, t, r - h.hr, s)) / (2.0 * h.hr);
  const double t1 = rho_t;
  const double t2 = V * rho_r;
  const double t3 = rho * V_r;
  const double t4 = (N - 1) / r * rho * V;
  return {t1 + t2 + t3 + t4, max_abs({t1, t2, t3, t4})};
}

Residual momentum_residual(const RadialSolution& sol, double t, double r, const ResidualOptions& options) {
  const PhysicalParams& p = sol.params();
  const int N = p.N;
  const double s = options.velocity_scale;
  const Fields fl = interior_fields(sol, t, r);

  double rho = 0.0, V = 0.0, V_r = 0.0, V_rr = 0.0, P_r = 0.0, mu_r = 0.0;
  double convective = 0.0;  // V_t + V V_r
  double shear = 0.0;       // V_r - V/r, identically zero for V linear in r
  if (options.derivatives == DerivativeMode::Analytic) {
    const double aN1 = std::pow(fl.a, N + 1);
    rho = fl.f.f / std::pow(fl.a, N);
    const double rho_r = fl.f.fprime / aN1;
    const double h = fl.a_dot / fl.a;
    V = s * h * r;
    V_r = s * h;
    V_rr = 0.0;
    // (a''/a) r exactly when s = 1; the h^2 terms cancel algebraically.
    convective = s * (fl.a_ddot / fl.a) * r + (s * s - s) * h * h * r;
    P_r = p.K * p.gamma * std::pow(rho, p.gamma - 1.0) * rho_r;
    mu_r = p.kappa * p.theta * std::pow(rho, p.theta - 1.0) * rho_r;
  } else {
    const FdSteps h = fd_steps(sol, t, r);
    rho = density(sol, t, r);
    V = velocity(sol, t, r, s);
    const double V_t = (velocity(sol, t + h.ht, r, s) - velocity(sol, t - h.ht, r, s)) / (2.0 * h.ht);
    V_r = (velocity(sol, t, r + h.hr, s) - velocity(sol, t, r - h.hr, s)) / (2.0 * h.hr);
    V_rr = (velocity(sol, t, r + h.hr2, s) - 2.0 * V + velocity(sol, t, r - h.hr2, s)) / (h.hr2 * h.hr2);
    const double rp = density(sol, t, r + h.hr);
    const double rm = density(sol, t, r - h.hr);
    P_r = p.K * (std::pow(rp, p.gamma) - std::pow(rm, p.gamma)) / (2.0 * h.hr);
    mu_r = p.kappa * (std::pow(rp, p.theta) - std::pow(rm, p.theta)) / (2.0 * h.hr);
    convective = V_t + V * V_r;
    shear = V_r - V / r;
  }
  const double mu = p.kappa * std::pow(rho, p.theta);

  const double accel = rho * convective;
  const double pressure = P_r;
  const double gravity = p.delta * rho * phi_r(sol, t, r);
  const double visc_grad = mu_r * ((N - 1) / r * V + V_r);
  const double visc_lap = mu * ((N - 1) / r * shear + V_rr);
  return {accel + pressure + gravity - visc_grad - visc_lap, max_abs({accel, pressure, gravity, visc_grad, visc_lap})};
}

double total_mass(const RadialSolution& sol, double t) {
  const double a = a_eval(sol.scaling(), t).a;
  const int N = sol.params().N;
  const auto& z = sol.profile().z_nodes();
  auto integrand = [&](double r) { return density(sol, t, r) * std::pow(r, N - 1); };
  using boost::math::quadrature::gauss_kronrod;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < z.size(); ++i) {
    const double lo = a * z[i];
    const double hi = std::min(a * z[i + 1], std::nextafter(a * sol.profile().support_end(), 0.0));
    if (!(hi > lo)) continue;
    sum += gauss_kronrod<double, 15>::integrate(integrand, lo, hi, 6, 1e-14);
  }
  return unit_sphere_area(N) * sum;
}

std::vector<double> default_time_samples(const ScalingFunction& scaling, std::size_t n) {
  const double t_end = scaling.blowup_time() ? 0.9 * *scaling.blowup_time() : 1.0;
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = n > 1 ? t_end * static_cast<double>(i) / (n - 1) : 0.0;
  return t;
}

ResidualReport evaluate_residuals(const RadialSolution& sol, std::span<const double> t_samples,
                                  std::size_t r_samples_per_t, const ResidualOptions& options,
                                  std::size_t worst_count) {
  if (r_samples_per_t == 0) throw InvalidArgument("evaluate_residuals: r_samples_per_t must be positive");
  ResidualReport rep;
  rep.t_grid.assign(t_samples.begin(), t_samples.end());
  rep.r_samples_per_t = r_samples_per_t;
  rep.points.resize(t_samples.size() * r_samples_per_t);
  rep.support_kind = sol.profile().support_kind();
  rep.Z_mu = sol.profile().Z_mu();
  rep.support_end = sol.profile().support_end();
  rep.blowup_time = sol.scaling().blowup_time();
  rep.solution_case = sol.profile().solution_case();

  // Each row writes only its own slice, so completion order does not matter.
  std::vector<std::future<void>> rows;
  for (std::size_t i = 0; i < t_samples.size(); ++i) {
    rows.push_back(std::async(std::launch::async, [&, i] {
      const double t = t_samples[i];
      const double R = sol.support_radius(t);
      for (std::size_t j = 0; j < r_samples_per_t; ++j) {
        const double r = R * (static_cast<double>(j) + 0.5) / static_cast<double>(r_samples_per_t);
        const Residual m = mass_residual(sol, t, r, options);
        const Residual q = momentum_residual(sol, t, r, options);
        rep.points[i * r_samples_per_t + j] = {t, r, m.value, m.scale, m.scaled(), q.value, q.scale, q.scaled()};
      }
    }));
  }
  for (auto& row : rows) row.get();

  double mass_sq = 0.0, mom_sq = 0.0;
  for (const auto& pt : rep.points) {
    rep.mass_residual_max = std::max(rep.mass_residual_max, std::abs(pt.mass_scaled));
    rep.momentum_residual_max = std::max(rep.momentum_residual_max, std::abs(pt.momentum_scaled));
    rep.mass_raw_max = std::max(rep.mass_raw_max, std::abs(pt.mass_raw));
    rep.momentum_raw_max = std::max(rep.momentum_raw_max, std::abs(pt.momentum_raw));
    mass_sq += pt.mass_scaled * pt.mass_scaled;
    mom_sq += pt.momentum_scaled * pt.momentum_scaled;
  }
  if (!rep.points.empty()) {
    rep.mass_residual_l2 = std::sqrt(mass_sq / rep.points.size());
    rep.momentum_residual_l2 = std::sqrt(mom_sq / rep.points.size());
  }

  auto worst = [&](auto key) {
    std::vector<ResidualPoint> v = rep.points;
    const std::size_t k = std::min(worst_count, v.size());
    std::partial_sort(v.begin(), v.begin() + k, v.end(),
                      [&](const ResidualPoint& x, const ResidualPoint& y) { return key(x) > key(y); });
    v.resize(k);
    return v;
  };
  rep.worst_mass = worst([](const ResidualPoint& x) { return std::abs(x.mass_scaled); });
  rep.worst_momentum = worst([](const ResidualPoint& x) { return std::abs(x.momentum_scaled); });
  return rep;
}

ResidualReport verify_solution(const PhysicalParams& p, SolutionCase c, const VerifyOptions& options) {
  require_valid(p, c);
  if (c == SolutionCase::LegacyGW || c == SolutionCase::Legacy2D)
    throw InvalidArgument("verify_solution covers Case1a, Case1b and Case2");
  const RadialSolution sol = make_radial_solution(p, c, options.profile);
  const std::vector<double> t =
      options.t_samples.empty() ? default_time_samples(sol.scaling(), 5) : options.t_samples;
  return evaluate_residuals(sol, t, options.r_samples_per_t, options.residual, options.worst_count);
}

ResidualReport verify_solution(const PhysicalParams& p, SolutionCase c, std::span<const double> t_samples,
                               std::size_t r_samples_per_t, double rel_tol) {
  VerifyOptions o;
  o.profile.rel_tol = rel_tol;
  o.t_samples.assign(t_samples.begin(), t_samples.end());
  o.r_samples_per_t = r_samples_per_t;
  return verify_solution(p, c, o);
}

}  // namespace collapsar
