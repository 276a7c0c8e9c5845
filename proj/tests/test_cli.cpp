#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <sys/wait.h>
#include <unistd.h>

#include "collapsar/cli.hpp"
#include "collapsar/report.hpp"

using namespace collapsar;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per call, removed by the destructor.
struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("collapsar_test_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const TempDir& dir, const json& doc, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

json criterion_one(const std::string& c = "Case1a") {
  json doc = {{"case", c},
              {"params", {{"N", 3}, {"K", 1.0}, {"kappa", 1.0}, {"delta", 1}, {"m", -1.0}, {"n", 1.0}, {"alpha_ic", 1.0}}}};
  if (c == "Case2") doc["params"]["Lambda"] = 0.01 * 3 / alpha_const(3);
  return doc;
}

int run(const std::string& command, const TempDir& dir, const json& doc, const std::string& formats = "csv,json,svg") {
  return cli::run_command(command, write_config(dir, doc), cli::Overrides{dir / "out", formats});
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("config defaults and case exponents") {
  const RunConfig cfg = parse_config(criterion_one("Case1b"));
  REQUIRE(cfg.solution_case == SolutionCase::Case1b);
  CHECK(cfg.params.gamma == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(cfg.params.theta == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(cfg.grid.rel_tol == 1e-10);
  CHECK(cfg.grid.abs_tol == 1e-12);
  CHECK(cfg.grid.z0 == 1e-6);
  CHECK(cfg.grid.eps_cut == 1e-8);
  CHECK(cfg.grid.t_samples == 5);
  CHECK(cfg.grid.r_samples == 50);
  CHECK(cfg.output.formats.size() == 3);
}

TEST_CASE("config rejects unknown keys at every level") {
  for (const char* where : {"", "params", "grid", "thresholds", "blowup", "legacy", "output"}) {
    json doc = criterion_one();
    if (std::string(where).empty())
      doc["bogus"] = 1;
    else
      doc[where]["bogus"] = 1;
    CAPTURE(where);
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }
  json doc = criterion_one();
  doc["case"] = "Case9";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = criterion_one();
  doc["params"]["K"] = "one";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
  doc = criterion_one();
  doc["grid"]["rel_tol"] = -1.0;
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("format lists") {
  CHECK(parse_formats("csv") == std::set<OutputFormat>{OutputFormat::Csv});
  CHECK(parse_formats("json,svg") == std::set<OutputFormat>{OutputFormat::Json, OutputFormat::Svg});
  CHECK_THROWS_AS(parse_formats("csv,png"), ConfigError);
  CHECK_THROWS_AS(parse_formats(""), ConfigError);
}

TEST_CASE("solve with delta 0 gives a constant profile") {
  TempDir dir;
  json doc = criterion_one();
  doc["params"]["delta"] = 0;
  doc["params"]["alpha_ic"] = 0.75;
  doc["params"]["m"] = 0.0;
  REQUIRE(run("solve", dir, doc) == cli::kOk);
  const auto rows = read_csv(dir / "out/profile.csv");
  REQUIRE(rows.size() > 2);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 4);
    CHECK(row[1] == 0.75);
  }
  CHECK(fs::exists(dir / "out/profile.svg"));
}

TEST_CASE("inviscid solve reports the first zero") {
  TempDir dir;
  json doc = criterion_one();
  doc["params"]["kappa"] = 0.0;
  REQUIRE(run("solve", dir, doc) == cli::kOk);
  const json j = json::parse(slurp(dir / "out/profile.json"));
  REQUIRE(j.contains("Z_mu"));
  CHECK(j["Z_mu"].is_number());
  CHECK(j["support_kind"] == "ZeroCrossing");
  // Inviscid N=3 with K=1 is the index-3 Lane-Emden solution with z = xi/sqrt(pi).
  CHECK(j["Z_mu"].get<double>() == doctest::Approx(6.896848619 / std::sqrt(std::numbers::pi)).epsilon(1e-8));
}

TEST_CASE("exit codes") {
  TempDir dir;
  SUBCASE("malformed JSON") {
    const fs::path p = dir / "broken.json";
    std::ofstream(p) << "{\"case\": \"Case1a\", \"params\": {";
    CHECK(cli::run_command("verify", p, cli::Overrides{dir / "out", {}}) == cli::kConfigError);
  }
  SUBCASE("missing file") {
    CHECK(cli::run_command("solve", dir / "nope.json") == cli::kConfigError);
  }
  SUBCASE("unknown command") { CHECK(run("sweep", dir, criterion_one()) == cli::kConfigError); }
  SUBCASE("zero threshold") {
    json doc = criterion_one();
    doc["thresholds"] = {{"mass", 0.0}, {"momentum", 0.0}};
    CHECK(run("verify", dir, doc) == cli::kThresholdFailure);
    const json j = json::parse(slurp(dir / "out/summary.json"));
    CHECK(j["pass"] == false);
  }
  SUBCASE("Case2 needs delta Lambda > 0") {
    json doc = criterion_one("Case2");
    doc["params"]["Lambda"] = 0.0;
    CHECK(run("verify", dir, doc) == cli::kConfigError);
    CHECK_FALSE(fs::exists(dir / "out/summary.json"));
  }
  SUBCASE("t_end past blowup") {
    json doc = criterion_one();
    doc["grid"] = {{"t_end", 1.0}};
    CHECK(run("verify", dir, doc) == cli::kConfigError);
  }
  SUBCASE("unwritable output") {
    const fs::path blocker = dir / "file";
    std::ofstream(blocker) << "x";
    CHECK(cli::run_command("solve", write_config(dir, criterion_one()), cli::Overrides{blocker / "sub", {}}) ==
          cli::kConfigError);
  }
}

TEST_CASE("verify passes on the default Case1a run") {
  TempDir dir;
  REQUIRE(run("verify", dir, criterion_one()) == cli::kOk);
  const json j = json::parse(slurp(dir / "out/summary.json"));
  CHECK(j["pass"] == true);
  CHECK(j["points"] == 250);
  CHECK(j["blowup_time"].get<double>() == 1.0);
  CHECK(j["norms"]["mass"]["max_scaled"].get<double>() <= 1e-10);
  CHECK(j["norms"]["momentum"]["max_scaled"].get<double>() <= 1e-6);
  const auto rows = read_csv(dir / "out/residuals.csv");
  CHECK(rows.size() == 250);
  for (const auto& row : rows) CHECK(row.size() == 6);
  CHECK(fs::exists(dir / "out/residuals.svg"));
}

TEST_CASE("blowup reports") {
  TempDir dir;
  SUBCASE("finite time") {
    REQUIRE(run("blowup", dir, criterion_one()) == cli::kOk);
    const json j = json::parse(slurp(dir / "out/blowup.json"));
    CHECK(j["blowup_time"].get<double>() == 1.0);
    bool found = false;
    for (const auto& row : j["table"]) {
      if (std::abs(row["t"].get<double>() - 0.99) > 1e-15) continue;
      found = true;
      CHECK(row["central_density"].get<double>() == doctest::Approx(1e6).epsilon(1e-12));
    }
    CHECK(found);
  }
  SUBCASE("expanding") {
    json doc = criterion_one();
    doc["params"]["m"] = 1.0;
    REQUIRE(run("blowup", dir, doc) == cli::kOk);
    const json j = json::parse(slurp(dir / "out/blowup.json"));
    CHECK(j["message"] == "no blowup");
    CHECK(j["blowup_time"].is_null());
  }
  SUBCASE("exponential") {
    REQUIRE(run("blowup", dir, criterion_one("Case2")) == cli::kOk);
    const json j = json::parse(slurp(dir / "out/blowup.json"));
    CHECK(j["message"] == "no blowup (exponential scaling)");
  }
}

TEST_CASE("legacy command") {
  TempDir dir;
  SUBCASE("Lane-Emden index 3") {
    const json doc = {{"case", "LegacyGW"},
                      {"params", {{"N", 3}, {"K", std::numbers::pi}, {"alpha_ic", 1.0}}},
                      {"legacy", {{"kind", "PowerLaw"}, {"mu", 0.0}}}};
    REQUIRE(run("legacy", dir, doc) == cli::kOk);
    const json j = json::parse(slurp(dir / "out/profile.json"));
    CHECK(std::abs(j["Z_mu"].get<double>() - 6.8968) <= 1e-3);
  }
  SUBCASE("constant balance") {
    const double K = 2.0, alpha = 0.7;
    const double mu = alpha_const(3) / (4.0 * K) * std::pow(alpha, 3.0);
    const json doc = {{"params", {{"N", 3}, {"K", K}, {"alpha_ic", alpha}}},
                      {"legacy", {{"kind", "PowerLaw"}, {"mu", mu}, {"z_max", 5.0}}}};
    REQUIRE(run("legacy", dir, doc) == cli::kOk);
    for (const auto& row : read_csv(dir / "out/profile.csv")) CHECK(std::abs(row[1] - alpha) <= 1e-15);
  }
  SUBCASE("PowerLaw needs N >= 3") {
    const json doc = {{"params", {{"N", 2}, {"K", 1.0}}}, {"legacy", {{"kind", "PowerLaw"}}}};
    CHECK(run("legacy", dir, doc) == cli::kConfigError);
  }
  SUBCASE("with scaling trajectory") {
    const json doc = {{"params", {{"N", 3}, {"K", std::numbers::pi}, {"lambda_legacy", 1.0}}},
                      {"legacy", {{"kind", "PowerLaw"}, {"a0", 1.0}, {"a1", 0.0}, {"t_max", 5.0}}}};
    REQUIRE(run("legacy", dir, doc) == cli::kOk);
    const json j = json::parse(slurp(dir / "out/profile.json"));
    CHECK(j["scaling"]["collapse_detected"] == true);
    CHECK(fs::exists(dir / "out/scaling.csv"));
  }
}

TEST_CASE("scalar metadata round-trips bit-exactly") {
  TempDir dir;
  json doc = criterion_one("Case1b");
  doc["params"]["K"] = 0.1 + 0.2;  // not representable in a short decimal
  doc["grid"] = {{"rel_tol", 1e-10 / 3.0}};
  REQUIRE(run("solve", dir, doc, "json") == cli::kOk);
  const RunConfig cfg = parse_config(doc);
  const ProfileSolution direct = integrate_profile(cfg.params, SolutionCase::Case1b, cfg.profile_options());
  const json j = json::parse(slurp(dir / "out/profile.json"));
  CHECK(j["params"]["K"].get<double>() == cfg.params.K);
  CHECK(j["params"]["gamma"].get<double>() == cfg.params.gamma);
  CHECK(j["params"]["theta"].get<double>() == cfg.params.theta);
  CHECK(j["support_end"].get<double>() == direct.support_end());
  CHECK(j["total_moment"].get<double>() == direct.total_moment());
  CHECK(j["nodes"].get<std::size_t>() == direct.z_nodes().size());
  CHECK_FALSE(fs::exists(dir / "out/profile.csv"));
  CHECK_FALSE(fs::exists(dir / "out/profile.svg"));
}

TEST_CASE("artifacts are deterministic") {
  TempDir a, b;
  json doc = criterion_one("Case2");
  doc["grid"] = {{"t_samples", 3}, {"r_samples", 20}};
  REQUIRE(run("verify", a, doc) == cli::kOk);
  REQUIRE(run("verify", b, doc) == cli::kOk);
  for (const char* name : {"residuals.csv", "summary.json", "residuals.svg"}) {
    CAPTURE(name);
    CHECK(slurp(a / "out" / name) == slurp(b / "out" / name));
  }
  REQUIRE(run("solve", a, doc) == cli::kOk);
  REQUIRE(run("solve", b, doc) == cli::kOk);
  for (const char* name : {"profile.csv", "profile.json"}) CHECK(slurp(a / "out" / name) == slurp(b / "out" / name));
}

TEST_CASE("csv carries full precision") {
  CHECK(format_real(0.1) == "1.0000000000000001e-01");
  CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("the installed binary honours the contract") {
  TempDir dir;
  const fs::path cfg = write_config(dir, criterion_one());
  const std::string bin = COLLAPSAR_CLI_PATH;
  auto exit_code = [](const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string quiet = " > /dev/null 2>&1";
  CHECK(exit_code(bin + " verify --config " + cfg.string() + " --out " + (dir / "o").string() + " --format json" +
                  quiet) == 0);
  CHECK(fs::exists(dir / "o/summary.json"));
  CHECK_FALSE(fs::exists(dir / "o/residuals.csv"));
  CHECK(exit_code(bin + " verify" + quiet) == 2);
  CHECK(exit_code(bin + " verify --config " + cfg.string() + " --format pdf" + quiet) == 2);
  CHECK(exit_code(bin + " --help" + quiet) == 0);
}
