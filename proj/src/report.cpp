#include "collapsar/report.hpp"

#include <cmath>

#include <fmt/format.h>

#include "collapsar/svg.hpp"

namespace collapsar {

using nlohmann::json;

namespace {

json optional_real(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json point_json(const ResidualPoint& p) {
  return json{{"t", p.t},
              {"r", p.r},
              {"mass_raw", p.mass_raw},
              {"mass_scaled", p.mass_scaled},
              {"momentum_raw", p.momentum_raw},
              {"momentum_scaled", p.momentum_scaled}};
}

json header_json(const RunConfig& cfg) {
  json j;
  j["case"] = cfg.solution_case ? json(std::string(to_string(*cfg.solution_case))) : json(nullptr);
  j["params"] = to_json(cfg.params);
  j["grid"] = to_json(cfg.grid);
  return j;
}

}  // namespace

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.16e}", x);
}

json to_json(const ode::IntegratorStats& s) {
  json j{{"accepted_steps", s.accepted_steps},
         {"rejected_steps", s.rejected_steps},
         {"rhs_evaluations", s.rhs_evaluations},
         {"rel_tol", s.rel_tol},
         {"abs_tol", s.abs_tol}};
  const bool any = s.accepted_steps > 0;
  j["smallest_step"] = any ? json(s.smallest_step) : json(nullptr);
  j["largest_step"] = any ? json(s.largest_step) : json(nullptr);
  return j;
}

// -- profile ---------------------------------------------------------------

std::string profile_csv(const ProfileSolution& profile) {
  std::string out = "z,f,fprime,M\n";
  const auto& z = profile.z_nodes();
  for (std::size_t i = 0; i < z.size(); ++i)
    out += fmt::format("{},{},{},{}\n", format_real(z[i]), format_real(profile.f_values()[i]),
                       format_real(profile.fprime_values()[i]), format_real(profile.M_values()[i]));
  return out;
}

json profile_json(const ProfileSolution& profile, const RunConfig& cfg) {
  json j = header_json(cfg);
  j["case"] = std::string(to_string(profile.solution_case()));
  j["params"] = to_json(profile.params());
  j["Z_mu"] = optional_real(profile.Z_mu());
  j["support_kind"] = std::string(to_string(profile.support_kind()));
  j["support_end"] = profile.support_end();
  j["total_moment"] = profile.total_moment();
  j["nodes"] = profile.z_nodes().size();
  j["integrator_stats"] = to_json(profile.integrator_stats());
  return j;
}

std::string profile_svg(const ProfileSolution& profile) {
  svg::Axes axes{fmt::format("Profile f(z), {}", to_string(profile.solution_case())), "z", "f", false, {}, {}};
  if (profile.Z_mu()) {
    axes.x_marker = *profile.Z_mu();
    axes.marker_label = fmt::format("Z = {:.6g}", *profile.Z_mu());
  }
  return svg::line_plot({{"f(z)", profile.z_nodes(), profile.f_values()}}, axes);
}

// -- residuals -------------------------------------------------------------

std::string residuals_csv(const ResidualReport& report) {
  std::string out = "t,r,mass_raw,mass_scaled,momentum_raw,momentum_scaled\n";
  for (const auto& p : report.points)
    out += fmt::format("{},{},{},{},{},{}\n", format_real(p.t), format_real(p.r), format_real(p.mass_raw),
                       format_real(p.mass_scaled), format_real(p.momentum_raw), format_real(p.momentum_scaled));
  return out;
}

bool passes(const ResidualReport& report, const Thresholds& thresholds) noexcept {
  // NaN compares false and therefore fails.
  return report.mass_residual_max <= thresholds.mass && report.momentum_residual_max <= thresholds.momentum;
}

json summary_json(const ResidualReport& report, const RunConfig& cfg) {
  json j = header_json(cfg);
  j["case"] = std::string(to_string(report.solution_case));
  j["t_grid"] = report.t_grid;
  j["r_samples_per_t"] = report.r_samples_per_t;
  j["points"] = report.points.size();
  j["support_kind"] = std::string(to_string(report.support_kind));
  j["Z_mu"] = optional_real(report.Z_mu);
  j["support_end"] = report.support_end;
  j["blowup_time"] = optional_real(report.blowup_time);

  json norms;
  norms["mass"] = json{{"max_scaled", report.mass_residual_max},
                       {"l2_scaled", report.mass_residual_l2},
                       {"max_raw", report.mass_raw_max}};
  norms["momentum"] = json{{"max_scaled", report.momentum_residual_max},
                           {"l2_scaled", report.momentum_residual_l2},
                           {"max_raw", report.momentum_raw_max}};
  j["norms"] = norms;

  json worst;
  worst["mass"] = json::array();
  worst["momentum"] = json::array();
  for (const auto& p : report.worst_mass) worst["mass"].push_back(point_json(p));
  for (const auto& p : report.worst_momentum) worst["momentum"].push_back(point_json(p));
  j["worst"] = worst;

  j["thresholds"] = json{{"mass", cfg.thresholds.mass}, {"momentum", cfg.thresholds.momentum}};
  j["checks"] = json{{"mass", report.mass_residual_max <= cfg.thresholds.mass},
                     {"momentum", report.momentum_residual_max <= cfg.thresholds.momentum}};
  j["pass"] = passes(report, cfg.thresholds);
  return j;
}

std::string residual_heatmap_svg(const ResidualReport& report) {
  std::vector<double> values;
  values.reserve(report.points.size());
  for (const auto& p : report.points) values.push_back(p.momentum_scaled);
  const svg::Axes axes{fmt::format("Scaled momentum residual, {}", to_string(report.solution_case)),
                       "r / (a(t) Z)", "t", false, {}, {}};
  return svg::heat_map(values, report.t_grid.size(), report.r_samples_per_t, report.t_grid, axes);
}

// -- blowup ----------------------------------------------------------------

BlowupReport blowup_report(const PhysicalParams& p, SolutionCase c, int levels) {
  if (c == SolutionCase::LegacyGW || c == SolutionCase::Legacy2D)
    throw ValidationError({"blowup report covers Case1a, Case1b and Case2; legacy scaling runs through the legacy command"});
  if (levels < 1) throw InvalidArgument("blowup_report: levels must be positive");
  require_valid(p, c);

  const ScalingFunction s = ScalingFunction::closed_form(p, c);
  BlowupReport r;
  r.solution_case = c;
  r.blowup_time = s.blowup_time();

  std::vector<double> times{0.0};
  if (r.blowup_time) {
    const double T = *r.blowup_time;
    r.message = fmt::format("blowup at T = {}", format_real(T));
    for (int k = 1; k <= levels; ++k) times.push_back(T * (1.0 - std::pow(10.0, -k)));
  } else {
    r.message = c == SolutionCase::Case2 ? "no blowup (exponential scaling)" : "no blowup";
    for (int k = 1; k <= levels; ++k) times.push_back(static_cast<double>(k));
  }

  const double rho0 = p.alpha_ic / std::pow(s.evaluate(0.0).a, p.N);
  for (double t : times) {
    const double a = s.evaluate(t).a;
    const double rho = p.alpha_ic / std::pow(a, p.N);
    r.rows.push_back({t, a, rho, rho / rho0});
  }
  return r;
}

json to_json(const BlowupReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"t", row.t}, {"a", row.a}, {"central_density", row.central_density},
                        {"amplification", row.amplification}});
  return json{{"case", std::string(to_string(r.solution_case))},
              {"blowup_time", optional_real(r.blowup_time)},
              {"blowup", r.blowup_time.has_value()},
              {"message", r.message},
              {"table", rows}};
}

std::string blowup_csv(const BlowupReport& r) {
  std::string out = "t,a,central_density,amplification\n";
  for (const auto& row : r.rows)
    out += fmt::format("{},{},{},{}\n", format_real(row.t), format_real(row.a), format_real(row.central_density),
                       format_real(row.amplification));
  return out;
}

std::string blowup_svg(const BlowupReport& r) {
  std::vector<double> t, a;
  for (const auto& row : r.rows) {
    t.push_back(row.t);
    a.push_back(row.a);
  }
  svg::Axes axes{fmt::format("Scaling a(t), {}", to_string(r.solution_case)), "t", "a(t)", true, {}, {}};
  if (r.blowup_time) {
    axes.x_marker = *r.blowup_time;
    axes.marker_label = fmt::format("T = {:.6g}", *r.blowup_time);
  }
  return svg::line_plot({{"a(t)", t, a}}, axes);
}

// -- legacy ----------------------------------------------------------------

std::string emden_csv(const EmdenProfile& profile) {
  std::string out = "z,y,yprime\n";
  const auto& z = profile.y_nodes();
  for (std::size_t i = 0; i < z.size(); ++i)
    out += fmt::format("{},{},{}\n", format_real(z[i]), format_real(profile.y_values()[i]),
                       format_real(profile.yprime_values()[i]));
  return out;
}

json emden_json(const EmdenProfile& profile, const RunConfig& cfg, const ScalingFunction* scaling) {
  json j = header_json(cfg);
  j["kind"] = std::string(to_string(profile.kind()));
  j["N"] = profile.N();
  j["K"] = profile.K();
  j["mu"] = profile.mu();
  j["coeff"] = profile.coeff();
  j["alpha_ic"] = profile.alpha_ic();
  j["Z_mu"] = optional_real(profile.Z_mu());
  j["support_end"] = profile.support_end();
  j["nodes"] = profile.y_nodes().size();
  j["integrator_stats"] = to_json(profile.integrator_stats());
  if (scaling) {
    const EnergyMonitor& e = scaling->energy();
    j["scaling"] = json{{"lambda_legacy", scaling->params().lambda_legacy},
                        {"collapse_detected", scaling->collapse_detected()},
                        {"blowup_time", optional_real(scaling->blowup_time())},
                        {"t_end", scaling->samples().t.empty() ? 0.0 : scaling->samples().t.back()},
                        {"energy_initial", e.initial},
                        {"energy_max_abs_drift", e.max_abs_drift},
                        {"energy_max_relative_drift", e.max_relative_drift},
                        {"energy_max_component_drift", e.max_component_drift},
                        {"integrator_stats", to_json(scaling->integrator_stats())}};
  }
  return j;
}

std::string emden_svg(const EmdenProfile& profile) {
  svg::Axes axes{fmt::format("Emden profile y(z), {}", to_string(profile.kind())), "z", "y", false, {}, {}};
  if (profile.Z_mu()) {
    axes.x_marker = *profile.Z_mu();
    axes.marker_label = fmt::format("Z = {:.6g}", *profile.Z_mu());
  }
  return svg::line_plot({{"y(z)", profile.y_nodes(), profile.y_values()}}, axes);
}

std::string scaling_csv(const ScalingFunction& scaling) {
  std::string out = "t,a,a_dot,energy\n";
  const ScalingSamples& s = scaling.samples();
  for (std::size_t i = 0; i < s.t.size(); ++i)
    out += fmt::format("{},{},{},{}\n", format_real(s.t[i]), format_real(s.a[i]), format_real(s.a_dot[i]),
                       format_real(s.energy[i]));
  return out;
}

std::string scaling_svg(const ScalingFunction& scaling) {
  svg::Axes axes{"Scaling a(t)", "t", "a(t)", false, {}, {}};
  if (scaling.blowup_time()) {
    axes.x_marker = *scaling.blowup_time();
    axes.marker_label = fmt::format("collapse t = {:.6g}", *scaling.blowup_time());
  }
  return svg::line_plot({{"a(t)", scaling.samples().t, scaling.samples().a}}, axes);
}

}  // namespace collapsar
