#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsam/errors.hpp"
#include "lsam/harness.hpp"
#include "lsam/verify.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out,
            std::int64_t seed_override, const std::string& scheduler) {
  lsam::RunConfig cfg = lsam::load_run_config(config_path);
  lsam::RunOverrides overrides;
  if (!out.empty()) overrides.output_path = out;
  if (seed_override >= 0) {
    overrides.seed = static_cast<std::uint64_t>(seed_override);
  }
  if (!scheduler.empty()) {
    overrides.scheduler = lsam::parse_scheduler(scheduler);
  }
  bool any_aborted = false;
  for (const lsam::RunOutput& o : lsam::execute_config(cfg, overrides)) {
    std::cout << "seed " << o.seed << ": " << o.csv_path << " ("
              << o.summary.rows << " rows, final f = " << o.summary.final_f
              << ")" << (o.aborted ? " [ABORTED: non-finite state]" : "")
              << "\n";
    any_aborted = any_aborted || o.aborted;
  }
  return any_aborted ? 2 : 0;
}

int cmd_verify(const std::string& suite) {
  std::vector<lsam::CriterionResult> results = lsam::run_suite(suite);
  lsam::print_report(std::cout, results);
  return lsam::all_pass(results) ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& grid_path,
              const std::string& out, std::int64_t seed_override) {
  lsam::RunConfig cfg = lsam::load_run_config(config_path);
  nlohmann::json grid_spec = nlohmann::json::object();
  if (!grid_path.empty()) {
    std::ifstream in(grid_path);
    if (!in) throw lsam::ConfigError("cannot open grid spec: " + grid_path);
    in >> grid_spec;
  }
  lsam::RunOverrides overrides;
  if (!out.empty()) overrides.output_path = out;
  if (seed_override >= 0) {
    overrides.seed = static_cast<std::uint64_t>(seed_override);
  }
  lsam::SweepResult result = lsam::run_sweep(cfg, grid_spec, overrides);
  std::cout << result.runs.size() << " runs complete, summary at "
            << result.summary_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSAM experiment harness: landscape-smoothed sharpness-aware "
               "minimization on analytic objectives"};
  app.require_subcommand(1);

  std::string config_path, out, scheduler, suite = "all", grid_path;
  std::int64_t seed_override = -1;

  CLI::App* run = app.add_subcommand("run", "execute a configured run");
  run->add_option("--config", config_path, "run config file")->required();
  run->add_option("--out", out, "output path base override");
  run->add_option("--seed-override", seed_override,
                  "replace the config's seed list with one seed");
  run->add_option("--scheduler", scheduler,
                  "scheduler override: round-robin, seeded-random, "
                  "real-concurrent");

  CLI::App* verify =
      app.add_subcommand("verify", "run a verification suite");
  verify->add_option(
      "--suite", suite,
      "densities, score, rates, anchor, distributed, basins, or all");

  CLI::App* sweep = app.add_subcommand("sweep", "grid sweep over a config");
  sweep->add_option("--config", config_path, "base run config file")
      ->required();
  sweep->add_option("--grid", grid_path,
                    "grid spec file: {\"cap\": n, \"grid\": {path: [values]}}");
  sweep->add_option("--out", out, "output path base override");
  sweep->add_option("--seed-override", seed_override,
                    "replace the config's seed list with one seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, out, seed_override, scheduler);
    }
    if (verify->parsed()) return cmd_verify(suite);
    if (sweep->parsed()) {
      return cmd_sweep(config_path, grid_path, out, seed_override);
    }
  } catch (const lsam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return 0;
}
