#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "collapsar/config.hpp"
#include "collapsar/emden.hpp"
#include "collapsar/profile.hpp"
#include "collapsar/radial.hpp"
#include "collapsar/scaling.hpp"

namespace collapsar {

/// 17 significant digits in scientific notation; round-trips exactly.
std::string format_real(double x);

nlohmann::json to_json(const ode::IntegratorStats& s);

std::string profile_csv(const ProfileSolution& profile);
nlohmann::json profile_json(const ProfileSolution& profile, const RunConfig& cfg);
std::string profile_svg(const ProfileSolution& profile);

std::string residuals_csv(const ResidualReport& report);
/// Norms, worst offenders and the pass flag against cfg.thresholds.
nlohmann::json summary_json(const ResidualReport& report, const RunConfig& cfg);
std::string residual_heatmap_svg(const ResidualReport& report);
bool passes(const ResidualReport& report, const Thresholds& thresholds) noexcept;

struct BlowupRow {
  double t;
  double a;
  double central_density;
  double amplification;  // central density relative to t = 0
};

struct BlowupReport {
  SolutionCase solution_case = SolutionCase::Case1a;
  std::optional<double> blowup_time;
  std::string message;
  std::vector<BlowupRow> rows;
};

/// Central density alpha / a(t)^N at t = 0 and t = T (1 - 10^-k), k = 1..levels,
/// or at t = 0..levels when there is no blowup. Closed-form cases only.
BlowupReport blowup_report(const PhysicalParams& p, SolutionCase c, int levels);
nlohmann::json to_json(const BlowupReport& r);
std::string blowup_csv(const BlowupReport& r);
std::string blowup_svg(const BlowupReport& r);

std::string emden_csv(const EmdenProfile& profile);
nlohmann::json emden_json(const EmdenProfile& profile, const RunConfig& cfg,
                          const ScalingFunction* scaling = nullptr);
std::string emden_svg(const EmdenProfile& profile);
std::string scaling_csv(const ScalingFunction& scaling);
std::string scaling_svg(const ScalingFunction& scaling);

}  // namespace collapsar
