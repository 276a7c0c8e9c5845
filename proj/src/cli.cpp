#include "collapsar/cli.hpp"

#include <cstdlib>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "collapsar/report.hpp"

namespace collapsar::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::shared_ptr<spdlog::logger> logger() {
  if (auto l = spdlog::get("collapsar")) return l;
  configure_logging();
  return spdlog::get("collapsar");
}

class OutputError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

bool wants(const RunConfig& cfg, OutputFormat f) { return cfg.output.formats.count(f) > 0; }

void write_file(const RunConfig& cfg, const std::string& name, const std::string& content) {
  const fs::path dir = cfg.output.directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw OutputError(fmt::format("cannot write '{}'", path.string()));
  logger()->info("wrote {}", path.string());
}

void write_json(const RunConfig& cfg, const std::string& name, const json& j) { write_file(cfg, name, j.dump(2) + "\n"); }

SolutionCase closed_form_case(const RunConfig& cfg, std::string_view command) {
  if (!cfg.solution_case) throw ConfigError(fmt::format("{}: config must name a case", command));
  const SolutionCase c = *cfg.solution_case;
  if (c == SolutionCase::LegacyGW || c == SolutionCase::Legacy2D)
    throw ConfigError(fmt::format("{}: case {} is handled by the legacy command", command, to_string(c)));
  return c;
}

std::vector<double> verify_times(const RunConfig& cfg, const ScalingFunction& scaling) {
  const std::size_t n = cfg.grid.t_samples;
  if (!cfg.grid.t_end) return default_time_samples(scaling, n);
  const double t_end = *cfg.grid.t_end;
  if (const auto T = scaling.blowup_time(); T && t_end >= *T)
    throw ConfigError(fmt::format("grid.t_end = {} is not before the blowup time {}", t_end, *T));
  std::vector<double> t(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

}  // namespace

void configure_logging() {
  auto l = spdlog::get("collapsar");
  if (!l) {
    l = std::make_shared<spdlog::logger>("collapsar", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("%n: %l: %v");
    spdlog::register_logger(l);
  }
  spdlog::level::level_enum level = spdlog::level::warn;
  bool unknown = false;
  if (const char* env = std::getenv("COLLAPSAR_LOG"); env && *env) {
    const std::string v = env;
    if (v == "error")
      level = spdlog::level::err;
    else if (v == "warn")
      level = spdlog::level::warn;
    else if (v == "info")
      level = spdlog::level::info;
    else if (v == "debug")
      level = spdlog::level::debug;
    else
      unknown = true;
  }
  l->set_level(level);
  if (unknown) l->warn("ignoring COLLAPSAR_LOG='{}' (expected error, warn, info or debug)", std::getenv("COLLAPSAR_LOG"));
}

int cmd_solve(const RunConfig& cfg) {
  const SolutionCase c = closed_form_case(cfg, "solve");
  require_valid(cfg.params, c);
  logger()->info("integrating {} profile to z = {}", to_string(c), cfg.grid.z_max);
  const ProfileSolution profile = integrate_profile(cfg.params, c, cfg.profile_options());
  logger()->debug("{} accepted steps, {} rejected", profile.integrator_stats().accepted_steps,
                  profile.integrator_stats().rejected_steps);

  if (wants(cfg, OutputFormat::Csv)) write_file(cfg, "profile.csv", profile_csv(profile));
  if (wants(cfg, OutputFormat::Json)) write_json(cfg, "profile.json", profile_json(profile, cfg));
  if (wants(cfg, OutputFormat::Svg)) write_file(cfg, "profile.svg", profile_svg(profile));

  fmt::print("solve: {} support {} at z = {}\n", to_string(c), to_string(profile.support_kind()),
             format_real(profile.support_end()));
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  const SolutionCase c = closed_form_case(cfg, "verify");
  require_valid(cfg.params, c);

  VerifyOptions opts;
  opts.profile = cfg.profile_options();
  opts.t_samples = verify_times(cfg, ScalingFunction::closed_form(cfg.params, c));
  opts.r_samples_per_t = cfg.grid.r_samples;
  logger()->info("verifying {} on a {} x {} (t, r) grid", to_string(c), opts.t_samples.size(), opts.r_samples_per_t);
  const ResidualReport report = verify_solution(cfg.params, c, opts);

  if (wants(cfg, OutputFormat::Csv)) write_file(cfg, "residuals.csv", residuals_csv(report));
  // The summary carries the pass flag and is always written.
  write_json(cfg, "summary.json", summary_json(report, cfg));
  if (wants(cfg, OutputFormat::Svg)) write_file(cfg, "residuals.svg", residual_heatmap_svg(report));

  const bool ok = passes(report, cfg.thresholds);
  fmt::print("verify: {} {} (max scaled mass {:.3e} <= {:.1e}, momentum {:.3e} <= {:.1e})\n", to_string(c),
             ok ? "pass" : "FAIL", report.mass_residual_max, cfg.thresholds.mass, report.momentum_residual_max,
             cfg.thresholds.momentum);
  if (!ok) logger()->error("residual thresholds exceeded");
  return ok ? kOk : kThresholdFailure;
}

int cmd_blowup(const RunConfig& cfg) {
  const SolutionCase c = closed_form_case(cfg, "blowup");
  const BlowupReport report = blowup_report(cfg.params, c, cfg.blowup.levels);

  if (wants(cfg, OutputFormat::Csv)) write_file(cfg, "blowup.csv", blowup_csv(report));
  if (wants(cfg, OutputFormat::Json)) write_json(cfg, "blowup.json", to_json(report));
  if (wants(cfg, OutputFormat::Svg)) write_file(cfg, "blowup.svg", blowup_svg(report));

  fmt::print("blowup: {} {}\n", to_string(c), report.message);
  return kOk;
}

int cmd_legacy(const RunConfig& cfg) {
  const LegacySpec& spec = cfg.legacy;
  if (cfg.solution_case) {
    const SolutionCase expected = spec.kind == EmdenKind::PowerLaw ? SolutionCase::LegacyGW : SolutionCase::Legacy2D;
    if (*cfg.solution_case != expected)
      throw ConfigError(fmt::format("legacy: case {} does not match legacy.kind {}", to_string(*cfg.solution_case),
                                    to_string(spec.kind)));
  }
  const PhysicalParams& p = cfg.params;
  logger()->info("integrating {} Emden profile, N = {}, mu = {}", to_string(spec.kind), p.N, spec.mu);
  const EmdenProfile profile = integrate_emden(spec.kind, p.N, p.K, spec.mu, p.alpha_ic, spec.z_max, cfg.grid.rel_tol);

  std::optional<ScalingFunction> scaling;
  if (spec.a0) {
    if (p.N < 2) throw ValidationError({"N must be at least 2"});
    scaling = emden_scaling_integrate(p.lambda_legacy, *spec.a0, spec.a1, p.N, spec.t_max, cfg.grid.rel_tol);
  }

  if (wants(cfg, OutputFormat::Csv)) {
    write_file(cfg, "profile.csv", emden_csv(profile));
    if (scaling) write_file(cfg, "scaling.csv", scaling_csv(*scaling));
  }
  if (wants(cfg, OutputFormat::Json))
    write_json(cfg, "profile.json", emden_json(profile, cfg, scaling ? &*scaling : nullptr));
  if (wants(cfg, OutputFormat::Svg)) {
    write_file(cfg, "profile.svg", emden_svg(profile));
    if (scaling) write_file(cfg, "scaling.svg", scaling_svg(*scaling));
  }

  fmt::print("legacy: {} first zero {}\n", to_string(spec.kind),
             profile.Z_mu() ? format_real(*profile.Z_mu()) : std::string("none before z_max"));
  return kOk;
}

int run_command(std::string_view command, const fs::path& config_path, const Overrides& overrides) {
  auto log = logger();
  try {
    RunConfig cfg = load_config(config_path);
    if (overrides.out) cfg.output.directory = *overrides.out;
    if (overrides.formats) cfg.output.formats = parse_formats(*overrides.formats);

    if (command == "solve") return cmd_solve(cfg);
    if (command == "verify") return cmd_verify(cfg);
    if (command == "blowup") return cmd_blowup(cfg);
    if (command == "legacy") return cmd_legacy(cfg);
    log->error("unknown command '{}'", command);
    return kConfigError;
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations()) log->error("invalid parameters: {}", v);
    return kConfigError;
  } catch (const ConfigError& e) {
    log->error("{}", e.what());
    return kConfigError;
  } catch (const InvalidArgument& e) {
    log->error("{}", e.what());
    return kConfigError;
  } catch (const StiffnessFailure& e) {
    log->error("integration failed: {}", e.what());
    return kNumericalFailure;
  } catch (const DegenerateDenominator& e) {
    log->error("integration failed: {}", e.what());
    return kNumericalFailure;
  } catch (const Error& e) {
    log->error("numerical failure: {}", e.what());
    return kNumericalFailure;
  } catch (const std::exception& e) {
    log->error("unexpected failure: {}", e.what());
    return kNumericalFailure;
  }
}

}  // namespace collapsar::cli
