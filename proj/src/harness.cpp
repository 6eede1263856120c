#include "lsam/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "lsam/errors.hpp"

namespace lsam {

namespace {

using nlohmann::json;

ParamVec initial_point(const RunConfig& cfg, int dim) {
  if (cfg.x0.empty()) return ParamVec::Zero(dim);
  if (static_cast<int>(cfg.x0.size()) != dim) {
    throw ConfigError("x0 length does not match the objective dimension");
  }
  ParamVec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = cfg.x0[i];
  return x;
}

std::vector<MetricsRecord> dispatch_run(const RunConfig& cfg,
                                        const ObjectiveSpec& obj,
                                        std::uint64_t seed, bool* aborted) {
  const ParamVec x0 = initial_point(cfg, obj.dim);
  *aborted = false;

  if (cfg.algorithm == "esgd" || cfg.algorithm == "lsam") {
    ChainResult r = run_chain(obj, cfg.schedule, cfg.sam_params(obj.dim), x0,
                              x0, cfg.horizon, seed);
    *aborted = r.aborted;
    return std::move(r.records);
  }

  DistConfig dist = *cfg.dist;
  const std::uint64_t dist_seed = dist.seed != 0 ? dist.seed : seed;
  const std::vector<ParamVec> x0s(dist.n_workers, x0);
  const int outer = static_cast<int>(cfg.horizon);

  if (cfg.algorithm == "lsam_dist") {
    return run_distributed(obj, dist, x0s, x0, outer, dist_seed).records;
  }
  return run_baseline(obj, parse_baseline(cfg.algorithm), dist, x0s, x0, outer,
                      dist_seed)
      .records;
}

void apply_dotted_path(json& j, const std::string& path, const json& value) {
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("empty segment in grid path: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace

RunOutput execute_single(const RunConfig& cfg, std::uint64_t seed,
                         const std::string& output_base) {
  const ObjectiveSpec obj = build_objective(cfg.objective);

  RunOutput out;
  out.seed = seed;
  std::vector<MetricsRecord> records =
      dispatch_run(cfg, obj, seed, &out.aborted);

  const std::string base = output_base + "_seed" + std::to_string(seed);
  out.csv_path = base + ".csv";
  out.summary_path = base + "_summary.json";
  const std::filesystem::path parent =
      std::filesystem::path(out.csv_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);

  write_metrics_csv(out.csv_path, records);
  out.summary = summarize(records);
  write_summary_json(out.summary_path, out.summary);
  return out;
}

std::vector<RunOutput> execute_config(const RunConfig& cfg,
                                      const RunOverrides& overrides) {
  RunConfig effective = cfg;
  if (overrides.scheduler && effective.dist) {
    effective.dist->scheduler = *overrides.scheduler;
  }
  std::vector<std::uint64_t> seeds =
      overrides.seed ? std::vector<std::uint64_t>{*overrides.seed}
                     : effective.seeds;
  const std::string base =
      overrides.output_path ? *overrides.output_path : effective.output_path;

  std::vector<RunOutput> outputs;
  for (std::uint64_t seed : seeds) {
    outputs.push_back(execute_single(effective, seed, base));
  }
  return outputs;
}

SweepResult run_sweep(const RunConfig& base, const nlohmann::json& grid_spec,
                      const RunOverrides& overrides) {
  if (!grid_spec.is_object()) {
    throw ConfigError("grid spec must be a JSON object");
  }
  for (const auto& [key, value] : grid_spec.items()) {
    if (key != "cap" && key != "grid") {
      throw ConfigError("unknown key '" + key + "' in grid spec");
    }
  }
  const std::size_t cap = grid_spec.value("cap", 256u);
  const json grid = grid_spec.value("grid", json::object());

  std::vector<std::string> paths;
  std::vector<std::vector<json>> values;
  std::size_t combos = 1;
  for (const auto& [path, list] : grid.items()) {
    if (!list.is_array() || list.empty()) {
      throw ConfigError("grid entry '" + path +
                        "' must be a nonempty value list");
    }
    paths.push_back(path);
    values.emplace_back(list.begin(), list.end());
    combos *= list.size();
    if (combos > cap) {
      throw ConfigError("grid of " + std::to_string(combos) +
                        " runs exceeds the cap of " + std::to_string(cap));
    }
  }

  const std::string out_base =
      overrides.output_path ? *overrides.output_path : base.output_path;

  SweepResult result;
  json rows = json::array();
  const json base_json = to_json(base);
  for (std::size_t k = 0; k < combos; ++k) {
    json cfg_json = base_json;
    json assignment = json::object();
    std::size_t rem = k;
    for (std::size_t p = 0; p < paths.size(); ++p) {
      const std::size_t idx = rem % values[p].size();
      rem /= values[p].size();
      apply_dotted_path(cfg_json, paths[p], values[p][idx]);
      assignment[paths[p]] = values[p][idx];
    }
    RunConfig cfg = parse_run_config(cfg_json);
    RunOverrides run_overrides = overrides;
    run_overrides.output_path =
        combos > 1 ? out_base + "_g" + std::to_string(k) : out_base;
    std::vector<RunOutput> outs = execute_config(cfg, run_overrides);
    for (const RunOutput& o : outs) {
      json row;
      row["assignment"] = assignment;
      row["seed"] = o.seed;
      row["csv"] = o.csv_path;
      row["final_f"] = o.summary.final_f;
      row["mean_G_norm_sq"] = o.summary.mean_G_norm_sq;
      rows.push_back(row);
      result.runs.push_back(o);
    }
  }

  std::sort(rows.begin(), rows.end(), [](const json& a, const json& b) {
    return a.at("final_f").get<double>() < b.at("final_f").get<double>();
  });
  json summary;
  summary["runs"] = rows;
  result.summary_path = out_base + "_sweep.json";
  std::ofstream out(result.summary_path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot open sweep summary for writing: " +
                      result.summary_path);
  }
  out << summary.dump(2) << '\n';
  return result;
}

}  // namespace lsam
