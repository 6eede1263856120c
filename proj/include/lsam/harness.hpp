#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsam/config.hpp"
#include "lsam/metrics.hpp"

namespace lsam {

struct RunOutput {
  std::uint64_t seed = 0;
  std::string csv_path;
  std::string summary_path;
  RunSummary summary;
  bool aborted = false;
};

struct RunOverrides {
  std::optional<std::string> output_path;
  std::optional<std::uint64_t> seed;
  std::optional<SchedulerMode> scheduler;
};

// Executes one seed of the configured run and writes its metrics CSV and
// summary file. Returns file locations and the summary.
RunOutput execute_single(const RunConfig& cfg, std::uint64_t seed,
                         const std::string& output_base);

// Executes every seed of the config (honoring overrides) and writes one CSV
// and one summary per seed.
std::vector<RunOutput> execute_config(const RunConfig& cfg,
                                      const RunOverrides& overrides = {});

// Grid sweep: the spec maps dotted config paths ("schedule.eta0") to value
// lists; the Cartesian product of assignments is executed, one metrics file
// each, and a summary ranked by final objective value is written to
// <output>_sweep.json. Refuses grids larger than the cap.
struct SweepResult {
  std::vector<RunOutput> runs;
  std::string summary_path;
};

SweepResult run_sweep(const RunConfig& base, const nlohmann::json& grid_spec,
                      const RunOverrides& overrides = {});

}  // namespace lsam
