#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "collapsar/emden.hpp"
#include "collapsar/model.hpp"
#include "collapsar/profile.hpp"

namespace collapsar {

/// Malformed or schema-violating run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct GridSpec {
  double z_max = 10.0;
  std::size_t t_samples = 5;
  std::size_t r_samples = 50;
  std::optional<double> t_end;  // default: 0.9 T with blowup, else 1
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double z0 = 1e-6;
  double eps_cut = 1e-8;
};

struct Thresholds {
  double mass = 1e-10;
  double momentum = 1e-6;
};

struct BlowupSpec {
  int levels = 6;  // t = T (1 - 10^-k), k = 1..levels
};

struct LegacySpec {
  EmdenKind kind = EmdenKind::PowerLaw;
  double mu = 0.0;
  double z_max = 20.0;
  // Optional scaling trajectory a'' = -lambda_legacy / a^(N-1).
  std::optional<double> a0;
  double a1 = 0.0;
  double t_max = 1.0;
};

enum class OutputFormat { Csv, Json, Svg };

struct OutputSpec {
  std::filesystem::path directory = "collapsar_out";
  std::set<OutputFormat> formats{OutputFormat::Csv, OutputFormat::Json, OutputFormat::Svg};
};

struct RunConfig {
  std::optional<SolutionCase> solution_case;
  PhysicalParams params;
  GridSpec grid;
  Thresholds thresholds;
  BlowupSpec blowup;
  LegacySpec legacy;
  OutputSpec output;

  ProfileOptions profile_options() const;
};

/// Parses a run configuration. gamma and theta default to the exact values
/// for the configured case; unknown keys anywhere are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

std::set<OutputFormat> parse_formats(const std::string& comma_separated);

nlohmann::json to_json(const PhysicalParams& p);
nlohmann::json to_json(const GridSpec& g);

}  // namespace collapsar
