#include "acefl/cli.h"

#include <cstdint>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "acefl/config.h"
#include "acefl/report.h"
#include "acefl/scenario.h"
#include "acefl/verify.h"

namespace acefl {
namespace {

int Run(const std::string& config_path, const std::string& out_dir,
        std::optional<std::uint64_t> seed, bool quiet, std::ostream& out) {
  ExperimentConfig cfg = LoadConfig(config_path);
  if (seed) cfg.seed = *seed;
  cfg = Resolve(cfg);
  const ScenarioResult result = RunScenario(cfg);
  WriteScenarioOutputs(result, out_dir);
  if (!quiet) out << RenderReport(ReportFromResult(result));
  return 0;
}

int Verify(std::uint64_t seed, std::ostream& out) {
  bool ok = true;
  for (const auto& check : RunVerification(seed)) {
    out << (check.passed ? "PASS " : "FAIL ") << check.name << " (" << check.detail
        << ")\n";
    ok = ok && check.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Federated contribution-evaluation attack simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir;
  std::optional<std::uint64_t> seed;
  std::uint64_t verify_seed = 2024;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a paired attack-free / attacked scenario");
  run->add_option("--config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override [experiment] seed");
  run->add_flag("--quiet", quiet, "Do not print the report");

  auto* verify = app.add_subcommand("verify", "Run the built-in oracle checks");
  verify->add_option("--seed", verify_seed, "Seed for random instances");

  auto* report = app.add_subcommand("report", "Render tables from a run directory");
  report->add_option("--in", in_dir, "Directory written by `run`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (run->parsed()) return Run(config_path, out_dir, seed, quiet, out);
    if (verify->parsed()) return Verify(verify_seed, out);
    out << RenderReport(LoadReport(in_dir));
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace acefl
