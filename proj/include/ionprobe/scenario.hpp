#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ionprobe/fock.hpp"

namespace ionprobe {

using Json = nlohmann::ordered_json;

struct CliOptions {
  std::optional<std::uint64_t> seed_override;
  int threads = 1;
  bool strict = false;
};

struct ScenarioOutcome {
  Json report;
  std::string sweep_csv;  // nonempty when the scenario carries a sweep block
  bool all_pass = true;
};

// Run one scenario object / file. Parse problems raise std::invalid_argument
// with the offending field; library errors propagate with module context.
ScenarioOutcome run_scenario(const Json& scenario, const CliOptions& options);
ScenarioOutcome run_scenario_file(const std::string& path, const CliOptions& options);

// Explicit density matrix input: header line "dim,<d>", then d rows of 2d
// comma-separated entries (re, im interleaved, row-major). Validated against
// the density-matrix invariants on load.
MotionalState load_density_csv(const std::string& path);
void save_density_csv(const std::string& path, const Matrix& rho);

}  // namespace ionprobe
