// collapsar: self-similar collapse profiles, scaling laws and residual checks.
#include <CLI11.hpp>

#include "collapsar/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = collapsar::cli;
  cli::configure_logging();

  CLI::App app{"Self-similar collapse solutions: profiles, blowup reports and PDE residual verification"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string formats;
  for (const char* name : {"solve", "verify", "blowup", "legacy"}) {
    const char* help = std::string_view(name) == "solve"    ? "integrate the density profile"
                       : std::string_view(name) == "verify" ? "evaluate mass and momentum residuals"
                       : std::string_view(name) == "blowup" ? "report the blowup time and central density growth"
                                                            : "integrate the Emden-type profile and scaling";
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides output.directory)");
    sub->add_option("--format", formats, "comma separated subset of csv,json,svg");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kConfigError;
  }

  cli::Overrides overrides;
  if (!out.empty()) overrides.out = out;
  if (!formats.empty()) overrides.formats = formats;
  return cli::run_command(app.get_subcommands().front()->get_name(), config, overrides);
}
