#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ionprobe/errors.hpp"
#include "ionprobe/scenario.hpp"

namespace {

// Exit codes: 0 pass, 1 tolerance failure (--strict), 2 usage/parse error,
// 3 resource error.
enum ExitCode { kOk = 0, kToleranceFailure = 1, kUsageError = 2, kResourceError = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ionprobe: trapped-ion motional-moment and quadrature readout simulator"};

  std::string scenario_path;
  std::string out_path;
  std::string sweep_out_path;
  ionprobe::CliOptions options;
  std::uint64_t seed_value = 0;

  app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  app.add_option("--out", out_path, "Report JSON output path (default: stdout)");
  app.add_option("--sweep-out", sweep_out_path, "Sweep table CSV output path");
  app.add_flag("--strict", options.strict, "Exit nonzero when a declared tolerance fails");
  auto* seed_opt =
      app.add_option("--seed", seed_value, "Override the scenario seed");
  app.add_option("--threads", options.threads, "Sweep-row parallelism")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }
  if (*seed_opt) options.seed_override = seed_value;

  try {
    const ionprobe::ScenarioOutcome outcome =
        ionprobe::run_scenario_file(scenario_path, options);

    const std::string text = outcome.report.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      if (!out) {
        std::cerr << "error: cannot write report to '" << out_path << "'\n";
        return kUsageError;
      }
      out << text;
    }
    if (!outcome.sweep_csv.empty() && !sweep_out_path.empty()) {
      std::ofstream csv(sweep_out_path);
      if (!csv) {
        std::cerr << "error: cannot write sweep table to '" << sweep_out_path << "'\n";
        return kUsageError;
      }
      csv << outcome.sweep_csv;
    }
    if (options.strict && !outcome.all_pass) return kToleranceFailure;
    return kOk;
  } catch (const ionprobe::resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResourceError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}
