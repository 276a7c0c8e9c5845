#include "collapsar/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>

namespace collapsar {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

double get_real(const json& obj, std::string_view where, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(fmt::format("{}.{}: expected a number", where, key));
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(fmt::format("{}.{}: must be finite", where, key));
  return x;
}

long long get_int(const json& obj, std::string_view where, const char* key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 1e15) return static_cast<long long>(x);
  }
  throw ConfigError(fmt::format("{}.{}: expected an integer", where, key));
}

std::string get_string(const json& obj, std::string_view where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(fmt::format("{}.{}: expected a string", where, key));
  return v.get<std::string>();
}

void require(bool ok, std::string_view what) {
  if (!ok) throw ConfigError(std::string(what));
}

PhysicalParams parse_params(const json& obj, std::optional<SolutionCase> c) {
  constexpr std::string_view W = "params";
  reject_unknown(obj, W,
                 {"N", "K", "kappa", "gamma", "theta", "delta", "Lambda", "m", "n", "alpha_ic", "lambda_legacy"});
  PhysicalParams p;
  p.N = static_cast<int>(get_int(obj, W, "N", p.N));
  p.K = get_real(obj, W, "K", p.K);
  p.kappa = get_real(obj, W, "kappa", p.kappa);
  p.delta = static_cast<int>(get_int(obj, W, "delta", p.delta));
  p.Lambda = get_real(obj, W, "Lambda", p.Lambda);
  p.m = get_real(obj, W, "m", p.m);
  p.n = get_real(obj, W, "n", p.n);
  p.alpha_ic = get_real(obj, W, "alpha_ic", p.alpha_ic);
  p.lambda_legacy = get_real(obj, W, "lambda_legacy", p.lambda_legacy);

  // Exponents not given explicitly are the exact ones for the case.
  if (c && p.N >= 1) {
    try {
      const Exponents e = exponents_for(*c, p.N);
      p.gamma = e.gamma;
      p.theta = e.theta;
    } catch (const InvalidArgument&) {
      // left for validation to report against the case
    }
  }
  p.gamma = get_real(obj, W, "gamma", p.gamma);
  p.theta = get_real(obj, W, "theta", p.theta);
  return p;
}

GridSpec parse_grid(const json& obj) {
  constexpr std::string_view W = "grid";
  reject_unknown(obj, W, {"z_max", "t_samples", "r_samples", "t_end", "rel_tol", "abs_tol", "z0", "eps_cut"});
  GridSpec g;
  g.z_max = get_real(obj, W, "z_max", g.z_max);
  const long long nt = get_int(obj, W, "t_samples", static_cast<long long>(g.t_samples));
  const long long nr = get_int(obj, W, "r_samples", static_cast<long long>(g.r_samples));
  require(nt >= 1, "grid.t_samples must be at least 1");
  require(nr >= 1, "grid.r_samples must be at least 1");
  g.t_samples = static_cast<std::size_t>(nt);
  g.r_samples = static_cast<std::size_t>(nr);
  if (obj.contains("t_end")) g.t_end = get_real(obj, W, "t_end", 0.0);
  g.rel_tol = get_real(obj, W, "rel_tol", g.rel_tol);
  g.abs_tol = get_real(obj, W, "abs_tol", g.abs_tol);
  g.z0 = get_real(obj, W, "z0", g.z0);
  g.eps_cut = get_real(obj, W, "eps_cut", g.eps_cut);

  require(g.rel_tol > 0.0, "grid.rel_tol must be positive");
  require(g.abs_tol > 0.0, "grid.abs_tol must be positive");
  require(g.eps_cut > 0.0, "grid.eps_cut must be positive");
  require(g.z0 > 0.0, "grid.z0 must be positive");
  require(g.z_max > g.z0, "grid.z_max must exceed grid.z0");
  require(!g.t_end || *g.t_end > 0.0, "grid.t_end must be positive");
  return g;
}

Thresholds parse_thresholds(const json& obj) {
  reject_unknown(obj, "thresholds", {"mass", "momentum"});
  Thresholds t;
  t.mass = get_real(obj, "thresholds", "mass", t.mass);
  t.momentum = get_real(obj, "thresholds", "momentum", t.momentum);
  require(t.mass >= 0.0 && t.momentum >= 0.0, "thresholds must be non-negative");
  return t;
}

BlowupSpec parse_blowup(const json& obj) {
  reject_unknown(obj, "blowup", {"levels"});
  BlowupSpec b;
  const long long levels = get_int(obj, "blowup", "levels", b.levels);
  require(levels >= 1 && levels <= 15, "blowup.levels must be in [1, 15]");
  b.levels = static_cast<int>(levels);
  return b;
}

LegacySpec parse_legacy(const json& obj) {
  constexpr std::string_view W = "legacy";
  reject_unknown(obj, W, {"kind", "mu", "z_max", "a0", "a1", "t_max"});
  LegacySpec l;
  if (obj.contains("kind")) {
    const std::string tag = get_string(obj, W, "kind");
    const auto k = parse_emden_kind(tag);
    if (!k) throw ConfigError(fmt::format("legacy.kind: unknown kind '{}'", tag));
    l.kind = *k;
  }
  l.mu = get_real(obj, W, "mu", l.mu);
  l.z_max = get_real(obj, W, "z_max", l.z_max);
  if (obj.contains("a0")) l.a0 = get_real(obj, W, "a0", 1.0);
  l.a1 = get_real(obj, W, "a1", l.a1);
  l.t_max = get_real(obj, W, "t_max", l.t_max);
  require(l.z_max > 0.0, "legacy.z_max must be positive");
  require(!l.a0 || *l.a0 > 0.0, "legacy.a0 must be positive");
  require(l.t_max > 0.0, "legacy.t_max must be positive");
  return l;
}

OutputSpec parse_output(const json& obj) {
  reject_unknown(obj, "output", {"directory", "formats"});
  OutputSpec o;
  if (obj.contains("directory")) {
    const std::string dir = get_string(obj, "output", "directory");
    require(!dir.empty(), "output.directory must not be empty");
    o.directory = dir;
  }
  if (obj.contains("formats")) {
    const json& f = obj.at("formats");
    if (!f.is_array()) throw ConfigError("output.formats: expected an array of strings");
    std::string joined;
    for (const auto& item : f) {
      if (!item.is_string()) throw ConfigError("output.formats: expected an array of strings");
      joined += item.get<std::string>() + ",";
    }
    o.formats = parse_formats(joined);
  }
  return o;
}

}  // namespace

ProfileOptions RunConfig::profile_options() const {
  ProfileOptions o;
  o.z_max = grid.z_max;
  o.rel_tol = grid.rel_tol;
  o.abs_tol = grid.abs_tol;
  o.z0 = grid.z0;
  o.eps_cut = grid.eps_cut;
  return o;
}

std::set<OutputFormat> parse_formats(const std::string& comma_separated) {
  std::set<OutputFormat> out;
  std::stringstream ss(comma_separated);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "csv")
      out.insert(OutputFormat::Csv);
    else if (item == "json")
      out.insert(OutputFormat::Json);
    else if (item == "svg")
      out.insert(OutputFormat::Svg);
    else
      throw ConfigError(fmt::format("unknown output format '{}' (expected csv, json or svg)", item));
  }
  if (out.empty()) throw ConfigError("at least one output format is required");
  return out;
}

RunConfig parse_config(const json& doc) {
  reject_unknown(doc, "config", {"case", "params", "grid", "thresholds", "blowup", "legacy", "output"});
  RunConfig cfg;
  if (doc.contains("case")) {
    const std::string tag = get_string(doc, "config", "case");
    cfg.solution_case = parse_solution_case(tag);
    if (!cfg.solution_case) throw ConfigError(fmt::format("case: unknown solution case '{}'", tag));
  }
  cfg.params = parse_params(doc.value("params", json::object()), cfg.solution_case);
  cfg.grid = parse_grid(doc.value("grid", json::object()));
  cfg.thresholds = parse_thresholds(doc.value("thresholds", json::object()));
  cfg.blowup = parse_blowup(doc.value("blowup", json::object()));
  cfg.legacy = parse_legacy(doc.value("legacy", json::object()));
  cfg.output = parse_output(doc.value("output", json::object()));
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

json to_json(const PhysicalParams& p) {
  return json{{"N", p.N},         {"K", p.K},         {"kappa", p.kappa},       {"gamma", p.gamma},
              {"theta", p.theta}, {"delta", p.delta}, {"Lambda", p.Lambda},     {"m", p.m},
              {"n", p.n},         {"alpha_ic", p.alpha_ic}, {"lambda_legacy", p.lambda_legacy}};
}

json to_json(const GridSpec& g) {
  json j{{"z_max", g.z_max},     {"t_samples", g.t_samples}, {"r_samples", g.r_samples}, {"rel_tol", g.rel_tol},
         {"abs_tol", g.abs_tol}, {"z0", g.z0},               {"eps_cut", g.eps_cut}};
  j["t_end"] = g.t_end ? json(*g.t_end) : json(nullptr);
  return j;
}

}  // namespace collapsar
