#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsam/landscapes.hpp"
#include "lsam/metrics.hpp"
#include "lsam/sam_map.hpp"

namespace lsam {

enum class SchedulerMode { kRoundRobin, kSeededRandom, kRealConcurrent };
enum class InnerStepSchedule { kConstant, kSqrtDecay };

SchedulerMode parse_scheduler(const std::string& name);
const char* to_string(SchedulerMode mode);

// Shape and hyperparameters of the asynchronous sampling/optimization loop.
// The pulling strength is derived as lambda = lambda0 / (eta_inner * tau);
// the default Gaussian kernel scale ties s^2 = 1/lambda so the worker drift
// reproduces the lambda (x - y) coupling of the single-chain update.
struct DistConfig {
  int n_workers = 4;
  int tau = 16;
  double beta = 0.9;        // look-ahead momentum on the aggregated direction
  double eta_inner = 0.05;  // sampler step size
  double eta_outer = 1.0;   // optimizer step size
  double lambda0 = 0.2;
  SamParams sam{};
  SchedulerMode scheduler = SchedulerMode::kRoundRobin;
  std::uint64_t seed = 0;

  double kernel_s_sq = 0.0;   // 0 means derive 1/lambda
  double temperature = 1.0;   // Langevin noise multiplier; 0 = proximal mode
  double nesterov_mu = 0.9;   // outer optimizer momentum; 0 = plain step
  InnerStepSchedule inner_schedule = InnerStepSchedule::kConstant;

  double lambda() const { return lambda0 / (eta_inner * tau); }
  double s_sq() const { return kernel_s_sq > 0.0 ? kernel_s_sq : 1.0 / lambda(); }
  void validate() const;  // throws ConfigError
};

struct WorkerState {
  int id = 0;
  ParamVec x;
  int t_x = 0;           // local counter, reset at every sync
  ParamVec sample_sum;   // running sum of samples since the last sync
  std::uint64_t rng_seed = 0;  // stream state, advanced by one split per step
  std::int64_t steps_total = 0;  // monotone, never reset
};

struct CenterState {
  ParamVec y;
  int t_y = 0;
  ParamVec g_prev;    // g'_{t_y - 1}; zero before the first sync
  ParamVec velocity;  // Nesterov momentum buffer
};

struct SyncEvent {
  int t_y = 0;  // counter value after the update
  ParamVec g_prime;
  ParamVec g;
  std::int64_t worker_iteration_total = 0;
};

// One asynchronous sampling step against the worker's current view of the
// center. The drift is the score of q(x | y): minus the SAM stochastic
// gradient minus the kernel pull (x - y)/s^2; SGLD noise sqrt(2 eta T).
WorkerState worker_sample_step(const ObjectiveSpec& obj, const DistConfig& cfg,
                               WorkerState w, const ParamVec& y);

// Synchronous optimization step: aggregates all accumulated samples into the
// ascent direction g' = mean(samples) - y, applies the look-ahead momentum
// g = g' + beta (g' - g'_prev) (skipped at t_y = 0), moves the center with
// Nesterov momentum, and resets every worker's counter and sum. Throws
// ProtocolError when called off-schedule.
std::pair<CenterState, SyncEvent> aggregate_and_update_center(
    const DistConfig& cfg, std::vector<WorkerState>& workers, CenterState c);

struct ProtocolStats {
  std::int64_t worker_requests = 0;
  std::int64_t center_responses = 0;
  std::int64_t sequence_violations = 0;
  bool queues_drained = true;
};

struct DistResult {
  std::vector<MetricsRecord> records;
  std::vector<SyncEvent> sync_events;
  CenterState center;
  std::vector<WorkerState> workers;
  ProtocolStats protocol;
};

// Runs the full loop for total_outer_steps center updates. Round-robin and
// seeded-random schedulers are deterministic functions of (cfg, inits, seed);
// the real-concurrent scheduler runs workers as threads exchanging messages
// through ordered queues and satisfies the protocol invariants without
// determinism.
DistResult run_distributed(const ObjectiveSpec& obj, const DistConfig& cfg,
                           const std::vector<ParamVec>& x0s,
                           const ParamVec& y0, int total_outer_steps,
                           std::uint64_t seed);

enum class BaselineAlgo { kDpSgd, kDpSam, kEasgd, kLsgd };

BaselineAlgo parse_baseline(const std::string& name);  // throws ConfigError
const char* to_string(BaselineAlgo algo);

// Baseline runners sharing the MetricsRecord schema. DP-SGD / DP-SAM force
// tau = 1 synchronous gradient averaging; EASGD couples workers elastically
// to the center (elastic coefficient = lambda0); LSGD pulls workers toward
// the best-loss worker.
DistResult run_baseline(const ObjectiveSpec& obj, BaselineAlgo algo,
                        const DistConfig& cfg,
                        const std::vector<ParamVec>& x0s, const ParamVec& y0,
                        int total_outer_steps, std::uint64_t seed);

}  // namespace lsam
