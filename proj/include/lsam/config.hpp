#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsam/dist_runtime.hpp"
#include "lsam/dual_loop.hpp"
#include "lsam/landscapes.hpp"

namespace lsam {

// Objective selection by name plus its parameters. Names: "quadratic",
// "basin3", "double_well", "mlp".
struct ObjectiveConfig {
  std::string name = "quadratic";
  int dim = 2;
  std::vector<double> hessian_diag = {1.0, 1.0};
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;  // basin3 / mlp data seed
  int hidden = 16;
  int samples = 256;
  int minibatch = 32;
};

ObjectiveSpec build_objective(const ObjectiveConfig& cfg);

// Full experiment description. One file determines a run including all
// seeds; unknown keys are rejected with field-level diagnostics.
struct RunConfig {
  ObjectiveConfig objective;
  // "esgd" | "lsam" (single chain) | "lsam_dist" | "dp_sgd" | "dp_sam" |
  // "easgd" | "lsgd"
  std::string algorithm = "esgd";
  ScheduleSpec schedule;
  double sam_gamma = -1.0;  // negative means the dimension-aware default
  std::optional<DistConfig> dist;
  std::int64_t horizon = 1000;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_path = "run";
  std::vector<double> x0;  // empty means the origin

  SamParams sam_params(int dim) const;
  void validate() const;  // structural checks beyond parsing
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

}  // namespace lsam
