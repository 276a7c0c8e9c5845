#include "collapsar/emden.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "collapsar/errors.hpp"
#include "collapsar/model.hpp"

namespace collapsar {

namespace {
constexpr double kSeriesStart = 1e-6;
}

std::string_view to_string(EmdenKind k) noexcept {
  return k == EmdenKind::PowerLaw ? "PowerLaw" : "Exponential2D";
}

std::optional<EmdenKind> parse_emden_kind(std::string_view tag) noexcept {
  if (tag == "PowerLaw") return EmdenKind::PowerLaw;
  if (tag == "Exponential2D") return EmdenKind::Exponential2D;
  return std::nullopt;
}

double EmdenProfile::nonlinearity(double y) const noexcept {
  if (kind_ == EmdenKind::Exponential2D) return std::exp(y);
  return y > 0.0 ? std::pow(y, exponent_) : 0.0;
}

EmdenState EmdenProfile::at(double z) const {
  if (!(z >= 0.0 && z <= support_end()))
    throw InvalidArgument(fmt::format("Emden profile evaluated at z={} outside [0, {}]", z, support_end()));
  if (z <= z0_) return {alpha_ic_ + series_c_ * z * z, 2.0 * series_c_ * z, 2.0 * series_c_};
  const auto [y, dy] = trajectory_.smooth(z);
  return {y[0], y[1], dy[1]};
}

EmdenProfile integrate_emden(EmdenKind kind, int N, double K, double mu, double alpha_ic, double z_max,
                             double rel_tol) {
  std::vector<std::string> violations;
  if (!(K > 0.0)) violations.emplace_back("K>0 required");
  if (kind == EmdenKind::PowerLaw) {
    if (N < 3) violations.emplace_back("PowerLaw requires N>=3");
    if (!(alpha_ic > 0.0)) violations.emplace_back("alpha>0 required");
  } else if (N != 2) {
    violations.emplace_back("Exponential2D requires N=2");
  }
  if (!std::isfinite(mu) || !std::isfinite(alpha_ic)) violations.emplace_back("mu and alpha must be finite");
  if (!violations.empty()) throw ValidationError(std::move(violations));
  if (!(z_max > kSeriesStart)) throw InvalidArgument("integrate_emden: z_max must exceed the series start");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("integrate_emden: rel_tol must lie in (0, 1)");

  EmdenProfile prof;
  prof.kind_ = kind;
  prof.N_ = N;
  prof.K_ = K;
  prof.mu_ = mu;
  prof.alpha_ic_ = alpha_ic;
  prof.z0_ = kSeriesStart;
  if (kind == EmdenKind::PowerLaw) {
    prof.exponent_ = static_cast<double>(N) / (N - 2);
    prof.coeff_ = alpha_const(N) / ((2.0 * N - 2.0) * K);
  } else {
    prof.exponent_ = 0.0;
    prof.coeff_ = 2.0 * std::numbers::pi / K;
  }
  const double coeff = prof.coeff_;
  prof.series_c_ = (mu - coeff * prof.nonlinearity(alpha_ic)) / (2.0 * N);

  const double z0 = prof.z0_;
  const ode::State<2> y0{alpha_ic + prof.series_c_ * z0 * z0, 2.0 * prof.series_c_ * z0};

  prof.y_nodes_ = {0.0, z0};
  prof.y_values_ = {alpha_ic, y0[0]};
  prof.yprime_values_ = {0.0, y0[1]};

  auto rhs = [&prof, coeff, mu, N](double z, const ode::State<2>& y) -> ode::State<2> {
    return {y[1], mu - coeff * prof.nonlinearity(y[0]) - (N - 1) * y[1] / z};
  };

  auto on_step = [&](const ode::DenseSegment<2>& seg, const ode::State<2>& y1, const ode::State<2>&) {
    prof.trajectory_.append(seg);
    if (kind == EmdenKind::PowerLaw && seg.start_state()[0] > 0.0 && y1[0] <= 0.0) {
      const auto& traj = prof.trajectory_;
      const double Z = refine_root([&traj](double z) { return traj.smooth(z).first[0]; }, seg.x_begin(), seg.x_end());
      prof.trajectory_.truncate(Z);
      prof.Z_mu_ = Z;
      const auto yz = traj.smooth(Z).first;
      prof.y_nodes_.push_back(Z);
      prof.y_values_.push_back(yz[0]);
      prof.yprime_values_.push_back(yz[1]);
      return ode::StepAction::Stop;
    }
    prof.y_nodes_.push_back(seg.x_end());
    prof.y_values_.push_back(y1[0]);
    prof.yprime_values_.push_back(y1[1]);
    return ode::StepAction::Continue;
  };

  ode::StepControl control;
  control.tol = {rel_tol, rel_tol * 1e-2 * std::max(1.0, std::abs(alpha_ic))};
  prof.stats_ = ode::integrate_dopri5<2>(rhs, z0, y0, z_max, control, on_step);
  return prof;
}

Residual emden_equation_residual(const EmdenProfile& profile, double z, const EmdenState& s) {
  const double t_second = s.ysecond;
  const double t_first = (profile.N() - 1) * s.yprime / z;
  const double t_source = profile.coeff() * profile.nonlinearity(s.y);
  const double t_mu = profile.mu();
  return {t_second + t_first + t_source - t_mu,
          std::max({std::abs(t_second), std::abs(t_first), std::abs(t_source), std::abs(t_mu)})};
}

Residual emden_residual(const EmdenProfile& profile, double z) {
  if (!(z > 0.0 && z < profile.support_end()))
    throw InvalidArgument(fmt::format("emden_residual: z={} outside (0, {})", z, profile.support_end()));
  return emden_equation_residual(profile, z, profile.at(z));
}

}  // namespace collapsar
