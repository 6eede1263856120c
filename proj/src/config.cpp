#include "lsam/config.hpp"

#include <fstream>
#include <set>

#include "lsam/errors.hpp"
#include "lsam/sam_map.hpp"

namespace lsam {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::string& section,
                         const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw ConfigError("config section '" + section + "' must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in section '" + section +
                        "'");
    }
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

template <typename T>
T get_required(const json& j, const std::string& section,
               const std::string& key) {
  if (!j.contains(key)) {
    throw ConfigError("missing required key '" + key + "' in section '" +
                      section + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + key + "' in section '" + section +
                      "' has the wrong type");
  }
}

RhoMode parse_rho_mode(const std::string& s) {
  if (s == "zero") return RhoMode::kZero;
  if (s == "constant") return RhoMode::kConstant;
  if (s == "decaying") return RhoMode::kDecaying;
  throw ConfigError("unknown rho_mode: " + s);
}

InnerStepSchedule parse_inner_schedule(const std::string& s) {
  if (s == "constant") return InnerStepSchedule::kConstant;
  if (s == "sqrt-decay") return InnerStepSchedule::kSqrtDecay;
  throw ConfigError("unknown inner_schedule: " + s);
}

const char* to_string(InnerStepSchedule s) {
  return s == InnerStepSchedule::kConstant ? "constant" : "sqrt-decay";
}

ObjectiveConfig parse_objective(const json& j) {
  reject_unknown_keys(j, "objective",
                      {"name", "dim", "hessian_diag", "noise_sigma", "seed",
                       "hidden", "samples", "minibatch"});
  ObjectiveConfig cfg;
  cfg.name = get_required<std::string>(j, "objective", "name");
  cfg.dim = get_or(j, "dim", cfg.dim);
  cfg.hessian_diag = get_or(j, "hessian_diag", cfg.hessian_diag);
  cfg.noise_sigma = get_or(j, "noise_sigma", cfg.noise_sigma);
  cfg.seed = get_or(j, "seed", cfg.seed);
  cfg.hidden = get_or(j, "hidden", cfg.hidden);
  cfg.samples = get_or(j, "samples", cfg.samples);
  cfg.minibatch = get_or(j, "minibatch", cfg.minibatch);
  return cfg;
}

json objective_to_json(const ObjectiveConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["noise_sigma"] = cfg.noise_sigma;
  if (cfg.name == "quadratic") {
    j["dim"] = cfg.dim;
    j["hessian_diag"] = cfg.hessian_diag;
  } else if (cfg.name == "basin3") {
    j["seed"] = cfg.seed;
  } else if (cfg.name == "mlp") {
    j["seed"] = cfg.seed;
    j["hidden"] = cfg.hidden;
    j["samples"] = cfg.samples;
    j["minibatch"] = cfg.minibatch;
  }
  return j;
}

ScheduleSpec parse_schedule(const json& j) {
  reject_unknown_keys(j, "schedule",
                      {"eta0", "rho_mode", "rho0", "lambda", "alpha"});
  ScheduleSpec s;
  s.eta0 = get_required<double>(j, "schedule", "eta0");
  s.rho_mode = parse_rho_mode(get_or<std::string>(j, "rho_mode", "zero"));
  s.rho0 = get_or(j, "rho0", 0.0);
  s.lambda = get_or(j, "lambda", 0.0);
  s.alpha = get_or(j, "alpha", 0.5);
  return s;
}

json schedule_to_json(const ScheduleSpec& s) {
  json j;
  j["eta0"] = s.eta0;
  j["rho_mode"] = to_string(s.rho_mode);
  j["rho0"] = s.rho0;
  j["lambda"] = s.lambda;
  j["alpha"] = s.alpha;
  return j;
}

DistConfig parse_dist(const json& j) {
  reject_unknown_keys(
      j, "dist",
      {"n_workers", "tau", "beta", "eta_inner", "eta_outer", "lambda0",
       "scheduler", "seed", "kernel_s_sq", "temperature", "nesterov_mu",
       "inner_schedule", "rho", "gamma"});
  DistConfig d;
  d.n_workers = get_or(j, "n_workers", d.n_workers);
  d.tau = get_or(j, "tau", d.tau);
  d.beta = get_or(j, "beta", d.beta);
  d.eta_inner = get_or(j, "eta_inner", d.eta_inner);
  d.eta_outer = get_or(j, "eta_outer", d.eta_outer);
  d.lambda0 = get_or(j, "lambda0", d.lambda0);
  d.scheduler =
      parse_scheduler(get_or<std::string>(j, "scheduler", "round-robin"));
  d.seed = get_or(j, "seed", d.seed);
  d.kernel_s_sq = get_or(j, "kernel_s_sq", d.kernel_s_sq);
  d.temperature = get_or(j, "temperature", d.temperature);
  d.nesterov_mu = get_or(j, "nesterov_mu", d.nesterov_mu);
  d.inner_schedule = parse_inner_schedule(
      get_or<std::string>(j, "inner_schedule", "constant"));
  d.sam.rho = get_or(j, "rho", d.sam.rho);
  d.sam.gamma = get_or(j, "gamma", default_sam_gamma(2));
  return d;
}

json dist_to_json(const DistConfig& d) {
  json j;
  j["n_workers"] = d.n_workers;
  j["tau"] = d.tau;
  j["beta"] = d.beta;
  j["eta_inner"] = d.eta_inner;
  j["eta_outer"] = d.eta_outer;
  j["lambda0"] = d.lambda0;
  j["scheduler"] = to_string(d.scheduler);
  j["seed"] = d.seed;
  j["kernel_s_sq"] = d.kernel_s_sq;
  j["temperature"] = d.temperature;
  j["nesterov_mu"] = d.nesterov_mu;
  j["inner_schedule"] = to_string(d.inner_schedule);
  j["rho"] = d.sam.rho;
  j["gamma"] = d.sam.gamma;
  return j;
}

const std::set<std::string> kAlgorithms = {
    "esgd", "lsam", "lsam_dist", "dp_sgd", "dp_sam", "easgd", "lsgd"};

}  // namespace

ObjectiveSpec build_objective(const ObjectiveConfig& cfg) {
  if (cfg.name == "quadratic") {
    ParamVec h(cfg.dim);
    if (static_cast<int>(cfg.hessian_diag.size()) != cfg.dim) {
      throw ConfigError("objective: hessian_diag length must equal dim");
    }
    for (int i = 0; i < cfg.dim; ++i) h[i] = cfg.hessian_diag[i];
    return make_quadratic(cfg.dim, h, cfg.noise_sigma);
  }
  if (cfg.name == "basin3") {
    return make_basin_landscape(cfg.seed, cfg.noise_sigma);
  }
  if (cfg.name == "double_well") {
    return make_double_well(cfg.noise_sigma);
  }
  if (cfg.name == "mlp") {
    return make_mlp_regression(cfg.hidden, cfg.samples, cfg.seed,
                               cfg.minibatch);
  }
  throw ConfigError("unknown objective name: " + cfg.name);
}

SamParams RunConfig::sam_params(int dim) const {
  SamParams p;
  p.rho = schedule.rho0;
  p.gamma = sam_gamma > 0.0 ? sam_gamma : default_sam_gamma(dim);
  return p;
}

void RunConfig::validate() const {
  if (!kAlgorithms.count(algorithm)) {
    throw ConfigError("unknown algorithm: " + algorithm);
  }
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (output_path.empty()) throw ConfigError("output_path must be nonempty");
  if (algorithm == "esgd" && schedule.rho_mode != RhoMode::kZero) {
    throw ConfigError("esgd requires rho_mode = zero");
  }
  if (algorithm == "lsam" && schedule.rho_mode == RhoMode::kZero) {
    throw ConfigError("lsam (single chain) requires a nonzero rho_mode");
  }
  const bool needs_dist = algorithm == "lsam_dist" || algorithm == "dp_sgd" ||
                          algorithm == "dp_sam" || algorithm == "easgd" ||
                          algorithm == "lsgd";
  if (needs_dist && !dist) {
    throw ConfigError("algorithm '" + algorithm +
                      "' requires a dist section");
  }
  schedule.validate();
}

RunConfig parse_run_config(const nlohmann::json& j) {
  reject_unknown_keys(j, "<root>",
                      {"objective", "algorithm", "schedule", "sam_gamma",
                       "dist", "horizon", "seeds", "output_path", "x0"});
  RunConfig cfg;
  if (!j.contains("objective")) {
    throw ConfigError("missing required section 'objective'");
  }
  cfg.objective = parse_objective(j.at("objective"));
  cfg.algorithm = get_required<std::string>(j, "<root>", "algorithm");
  if (!j.contains("schedule")) {
    throw ConfigError("missing required section 'schedule'");
  }
  cfg.schedule = parse_schedule(j.at("schedule"));
  cfg.sam_gamma = get_or(j, "sam_gamma", -1.0);
  if (j.contains("dist")) cfg.dist = parse_dist(j.at("dist"));
  cfg.horizon = get_required<std::int64_t>(j, "<root>", "horizon");
  cfg.seeds = get_or(j, "seeds", cfg.seeds);
  cfg.output_path = get_or<std::string>(j, "output_path", cfg.output_path);
  cfg.x0 = get_or(j, "x0", cfg.x0);
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["objective"] = objective_to_json(cfg.objective);
  j["algorithm"] = cfg.algorithm;
  j["schedule"] = schedule_to_json(cfg.schedule);
  if (cfg.sam_gamma > 0.0) j["sam_gamma"] = cfg.sam_gamma;
  if (cfg.dist) j["dist"] = dist_to_json(*cfg.dist);
  j["horizon"] = cfg.horizon;
  j["seeds"] = cfg.seeds;
  j["output_path"] = cfg.output_path;
  if (!cfg.x0.empty()) j["x0"] = cfg.x0;
  return j;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace lsam
