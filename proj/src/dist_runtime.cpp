#include "lsam/dist_runtime.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include "lsam/errors.hpp"
#include "lsam/message_queue.hpp"
#include "lsam/rng.hpp"

namespace lsam {

SchedulerMode parse_scheduler(const std::string& name) {
  if (name == "round-robin") return SchedulerMode::kRoundRobin;
  if (name == "seeded-random") return SchedulerMode::kSeededRandom;
  if (name == "real-concurrent") return SchedulerMode::kRealConcurrent;
  throw ConfigError("unknown scheduler: " + name);
}

const char* to_string(SchedulerMode mode) {
  switch (mode) {
    case SchedulerMode::kRoundRobin: return "round-robin";
    case SchedulerMode::kSeededRandom: return "seeded-random";
    case SchedulerMode::kRealConcurrent: return "real-concurrent";
  }
  return "?";
}

BaselineAlgo parse_baseline(const std::string& name) {
  if (name == "dp_sgd" || name == "DP-SGD") return BaselineAlgo::kDpSgd;
  if (name == "dp_sam" || name == "DP-SAM") return BaselineAlgo::kDpSam;
  if (name == "easgd" || name == "EASGD") return BaselineAlgo::kEasgd;
  if (name == "lsgd" || name == "LSGD") return BaselineAlgo::kLsgd;
  throw ConfigError("unsupported baseline algorithm: " + name);
}

const char* to_string(BaselineAlgo algo) {
  switch (algo) {
    case BaselineAlgo::kDpSgd: return "dp_sgd";
    case BaselineAlgo::kDpSam: return "dp_sam";
    case BaselineAlgo::kEasgd: return "easgd";
    case BaselineAlgo::kLsgd: return "lsgd";
  }
  return "?";
}

void DistConfig::validate() const {
  if (n_workers < 1) throw ConfigError("dist: n_workers must be >= 1");
  if (tau < 1) throw ConfigError("dist: tau must be >= 1");
  if (beta < 0.0) throw ConfigError("dist: beta must be >= 0");
  if (!(eta_inner > 0.0)) throw ConfigError("dist: eta_inner must be > 0");
  if (!(eta_outer > 0.0)) throw ConfigError("dist: eta_outer must be > 0");
  if (!(lambda0 > 0.0)) throw ConfigError("dist: lambda0 must be > 0");
  if (temperature < 0.0) throw ConfigError("dist: temperature must be >= 0");
  if (nesterov_mu < 0.0 || nesterov_mu >= 1.0) {
    throw ConfigError("dist: nesterov_mu must be in [0, 1)");
  }
  sam.validate();
}

namespace {

constexpr double kConfinementRadius = 1e3;

double worker_eta(const DistConfig& cfg, const WorkerState& w) {
  if (cfg.inner_schedule == InnerStepSchedule::kSqrtDecay) {
    return cfg.eta_inner / std::sqrt(static_cast<double>(w.steps_total + 1));
  }
  return cfg.eta_inner;
}

MetricsRecord worker_metrics(const ObjectiveSpec& obj, const DistConfig& cfg,
                             const WorkerState& w, const ParamVec& y,
                             std::int64_t tick, std::int64_t wall_ns) {
  const ParamVec grad = obj.grad(w.x);
  const ParamVec z = w.x - y;
  MetricsRecord rec;
  rec.t = tick;
  rec.wall_ns = wall_ns;
  rec.f_val = obj.eval(w.x);
  rec.grad_norm_sq = grad.squaredNorm();
  rec.z_norm_sq = z.squaredNorm();
  rec.G_norm_sq = (grad + cfg.lambda() * z).squaredNorm();
  rec.phi = rec.f_val + 0.5 * cfg.lambda() * rec.z_norm_sq;
  rec.worker_id = w.id;
  return rec;
}

MetricsRecord sync_metrics(const ObjectiveSpec& obj, const DistConfig& cfg,
                           const std::vector<WorkerState>& workers,
                           const CenterState& center, const SyncEvent& ev,
                           std::int64_t tick, std::int64_t wall_ns) {
  const ParamVec grad = obj.grad(center.y);
  double z_mean = 0.0;
  for (const WorkerState& w : workers) {
    z_mean += (w.x - center.y).squaredNorm();
  }
  z_mean /= static_cast<double>(workers.size());
  MetricsRecord rec;
  rec.t = tick;
  rec.wall_ns = wall_ns;
  rec.f_val = obj.eval(center.y);
  rec.grad_norm_sq = grad.squaredNorm();
  rec.G_norm_sq = ev.g_prime.squaredNorm();
  rec.z_norm_sq = z_mean;
  rec.phi = rec.f_val + 0.5 * cfg.lambda() * z_mean;
  rec.sync_flag = true;
  rec.worker_id = -1;
  return rec;
}

}  // namespace

WorkerState worker_sample_step(const ObjectiveSpec& obj, const DistConfig& cfg,
                               WorkerState w, const ParamVec& y) {
  const double inv_s_sq = 1.0 / cfg.s_sq();
  const double eta = worker_eta(cfg, w);

  // Two decorrelated draws per step from the worker's stream.
  std::uint64_t stream = w.rng_seed;
  const std::uint64_t grad_seed = splitmix64(stream);
  const std::uint64_t noise_seed = splitmix64(stream);

  // Score of q(x | y) is minus this drift.
  ParamVec drift = sam_stochastic_grad(obj, cfg.sam, w.x, grad_seed) +
                   inv_s_sq * (w.x - y);
  w.x -= eta * drift;
  if (cfg.temperature > 0.0) {
    w.x += std::sqrt(2.0 * eta * cfg.temperature) *
           standard_normal_vec(noise_seed, obj.dim);
  }
  if (w.x.norm() > kConfinementRadius || !all_finite(w.x)) {
    throw ChainDivergenceError("worker " + std::to_string(w.id) +
                               " diverged at local step " +
                               std::to_string(w.t_x + 1));
  }

  w.t_x += 1;
  w.steps_total += 1;
  w.sample_sum += w.x;
  w.rng_seed = stream;
  return w;
}

std::pair<CenterState, SyncEvent> aggregate_and_update_center(
    const DistConfig& cfg, std::vector<WorkerState>& workers, CenterState c) {
  const std::int64_t period =
      static_cast<std::int64_t>(cfg.n_workers) * cfg.tau;
  std::int64_t total_tx = 0;
  for (const WorkerState& w : workers) total_tx += w.t_x;
  if (total_tx == 0 || total_tx % period != 0) {
    throw ProtocolError(
        "aggregate called off-schedule: sum of worker counters is " +
        std::to_string(total_tx) + ", expected a positive multiple of " +
        std::to_string(period));
  }

  ParamVec sum = ParamVec::Zero(c.y.size());
  for (const WorkerState& w : workers) sum += w.sample_sum;

  SyncEvent ev;
  ev.g_prime = sum / static_cast<double>(total_tx) - c.y;
  // The look-ahead difference needs g'_{-1}, which is undefined at the first
  // sync; skip the term there instead of inflating the first step.
  ev.g = c.t_y == 0 ? ev.g_prime
                    : ParamVec(ev.g_prime + cfg.beta * (ev.g_prime - c.g_prev));

  if (cfg.nesterov_mu > 0.0) {
    c.velocity = cfg.nesterov_mu * c.velocity + ev.g;
    c.y += cfg.eta_outer * (ev.g + cfg.nesterov_mu * c.velocity);
  } else {
    c.y += cfg.eta_outer * ev.g;
  }
  c.g_prev = ev.g_prime;
  c.t_y += 1;

  for (WorkerState& w : workers) {
    w.t_x = 0;
    w.sample_sum.setZero();
  }

  ev.t_y = c.t_y;
  ev.worker_iteration_total = static_cast<std::int64_t>(c.t_y) * period;
  return {std::move(c), ev};
}

namespace {

DistResult run_simulated(const ObjectiveSpec& obj, const DistConfig& cfg,
                         const std::vector<ParamVec>& x0s, const ParamVec& y0,
                         int total_outer_steps, std::uint64_t seed) {
  DistResult result;
  result.workers.reserve(cfg.n_workers);
  for (int i = 0; i < cfg.n_workers; ++i) {
    WorkerState w;
    w.id = i;
    w.x = x0s[i];
    w.sample_sum = ParamVec::Zero(obj.dim);
    w.rng_seed = derive_seed(seed, "worker", i);
    result.workers.push_back(std::move(w));
  }
  result.center.y = y0;
  result.center.g_prev = ParamVec::Zero(obj.dim);
  result.center.velocity = ParamVec::Zero(obj.dim);

  Rng sched_rng(derive_seed(seed, "scheduler"));
  const std::int64_t period =
      static_cast<std::int64_t>(cfg.n_workers) * cfg.tau;
  std::int64_t tick = 0;
  while (result.center.t_y < total_outer_steps) {
    const int i = cfg.scheduler == SchedulerMode::kRoundRobin
                      ? static_cast<int>(tick % cfg.n_workers)
                      : sched_rng.uniform_int(0, cfg.n_workers - 1);
    WorkerState& w = result.workers[i];
    w = worker_sample_step(obj, cfg, std::move(w), result.center.y);
    ++tick;
    result.protocol.worker_requests += 1;
    result.protocol.center_responses += 1;

    if (tick % period == 0) {
      auto [next_center, ev] = aggregate_and_update_center(
          cfg, result.workers, std::move(result.center));
      result.center = std::move(next_center);
      result.records.push_back(sync_metrics(obj, cfg, result.workers,
                                            result.center, ev, tick, tick));
      result.sync_events.push_back(std::move(ev));
    } else if (keep_step(tick)) {
      result.records.push_back(
          worker_metrics(obj, cfg, w, result.center.y, tick, tick));
    }
  }
  return result;
}

// Messages of the real-concurrent protocol. A worker performs one sampling
// step, ships the new sample with its sequence number, and blocks until the
// center acknowledges with the current parameters (or a stop order).
struct StepDone {
  int worker = 0;
  std::int64_t seq = 0;
  ParamVec sample;
};

struct CenterReply {
  bool stop = false;
  ParamVec y;
};

DistResult run_real_concurrent(const ObjectiveSpec& obj, const DistConfig& cfg,
                               const std::vector<ParamVec>& x0s,
                               const ParamVec& y0, int total_outer_steps,
                               std::uint64_t seed) {
  const auto t_start = std::chrono::steady_clock::now();
  auto wall_ns = [&] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - t_start)
        .count();
  };

  MessageQueue<StepDone> inbox;
  std::vector<std::unique_ptr<MessageQueue<CenterReply>>> replies;
  for (int i = 0; i < cfg.n_workers; ++i) {
    replies.push_back(std::make_unique<MessageQueue<CenterReply>>());
  }

  std::vector<std::thread> threads;
  threads.reserve(cfg.n_workers);
  for (int i = 0; i < cfg.n_workers; ++i) {
    threads.emplace_back([&, i] {
      WorkerState w;
      w.id = i;
      w.x = x0s[i];
      w.sample_sum = ParamVec::Zero(obj.dim);
      w.rng_seed = derive_seed(seed, "worker", i);
      ParamVec y_view = y0;
      std::int64_t seq = 0;
      while (true) {
        w = worker_sample_step(obj, cfg, std::move(w), y_view);
        ++seq;
        inbox.push(StepDone{i, seq, w.x});
        CenterReply reply = replies[i]->pop();
        if (reply.stop) break;
        y_view = std::move(reply.y);
      }
    });
  }

  // The center applies syncs serially. It keeps shadow worker accumulators
  // fed by the sample messages; worker threads never share numeric state.
  DistResult result;
  result.workers.reserve(cfg.n_workers);
  std::vector<std::int64_t> expected_seq(cfg.n_workers, 1);
  for (int i = 0; i < cfg.n_workers; ++i) {
    WorkerState shadow;
    shadow.id = i;
    shadow.x = x0s[i];
    shadow.sample_sum = ParamVec::Zero(obj.dim);
    result.workers.push_back(std::move(shadow));
  }
  result.center.y = y0;
  result.center.g_prev = ParamVec::Zero(obj.dim);
  result.center.velocity = ParamVec::Zero(obj.dim);

  const std::int64_t period =
      static_cast<std::int64_t>(cfg.n_workers) * cfg.tau;
  std::int64_t total = 0;
  int stopped = 0;
  while (stopped < cfg.n_workers) {
    StepDone msg = inbox.pop();
    result.protocol.worker_requests += 1;
    WorkerState& shadow = result.workers[msg.worker];
    if (msg.seq != expected_seq[msg.worker]) {
      result.protocol.sequence_violations += 1;
    }
    expected_seq[msg.worker] = msg.seq + 1;
    shadow.t_x += 1;
    shadow.steps_total += 1;
    shadow.sample_sum += msg.sample;
    shadow.x = std::move(msg.sample);
    ++total;

    const bool done = result.center.t_y >= total_outer_steps;
    if (!done && total % period == 0) {
      auto [next_center, ev] = aggregate_and_update_center(
          cfg, result.workers, std::move(result.center));
      result.center = std::move(next_center);
      result.records.push_back(sync_metrics(obj, cfg, result.workers,
                                            result.center, ev, total,
                                            wall_ns()));
      result.sync_events.push_back(std::move(ev));
    } else if (!done && keep_step(total)) {
      result.records.push_back(
          worker_metrics(obj, cfg, shadow, result.center.y, total, wall_ns()));
    }

    const bool stop = result.center.t_y >= total_outer_steps;
    replies[msg.worker]->push(CenterReply{stop, result.center.y});
    result.protocol.center_responses += 1;
    if (stop) ++stopped;
  }
  for (std::thread& th : threads) th.join();

  result.protocol.queues_drained = inbox.size() == 0;
  for (const auto& q : replies) {
    result.protocol.queues_drained =
        result.protocol.queues_drained && q->size() == 0;
  }
  if (result.protocol.sequence_violations > 0) {
    throw ProtocolError("a worker advanced past a pending sync barrier (" +
                        std::to_string(result.protocol.sequence_violations) +
                        " sequence violations)");
  }
  return result;
}

}  // namespace

DistResult run_distributed(const ObjectiveSpec& obj, const DistConfig& cfg,
                           const std::vector<ParamVec>& x0s,
                           const ParamVec& y0, int total_outer_steps,
                           std::uint64_t seed) {
  cfg.validate();
  if (static_cast<int>(x0s.size()) != cfg.n_workers) {
    throw ConfigError("run_distributed: expected one initial point per worker");
  }
  for (const ParamVec& x0 : x0s) {
    if (x0.size() != obj.dim) {
      throw ConfigError("run_distributed: initial point dimension mismatch");
    }
  }
  if (total_outer_steps < 1) {
    throw ConfigError("run_distributed: total_outer_steps must be >= 1");
  }
  if (cfg.scheduler == SchedulerMode::kRealConcurrent) {
    return run_real_concurrent(obj, cfg, x0s, y0, total_outer_steps, seed);
  }
  return run_simulated(obj, cfg, x0s, y0, total_outer_steps, seed);
}

namespace {

DistResult run_data_parallel(const ObjectiveSpec& obj, bool sam_on,
                             const DistConfig& cfg, const ParamVec& y0,
                             int total_steps, std::uint64_t seed) {
  SamParams sam = cfg.sam;
  if (!sam_on) sam.rho = 0.0;

  DistResult result;
  ParamVec x = y0;
  for (int t = 0; t < total_steps; ++t) {
    ParamVec g = ParamVec::Zero(obj.dim);
    for (int i = 0; i < cfg.n_workers; ++i) {
      g += sam_stochastic_grad(
          obj, sam, x,
          derive_seed(seed, "dp",
                      static_cast<std::uint64_t>(t) * cfg.n_workers + i));
    }
    g /= static_cast<double>(cfg.n_workers);
    x -= cfg.eta_inner * g;

    SyncEvent ev;
    ev.t_y = t + 1;
    ev.g_prime = -g;
    ev.g = ev.g_prime;
    ev.worker_iteration_total =
        static_cast<std::int64_t>(t + 1) * cfg.n_workers;
    const std::int64_t tick = t + 1;
    const ParamVec grad = obj.grad(x);
    MetricsRecord rec;
    rec.t = tick;
    rec.wall_ns = tick;
    rec.f_val = obj.eval(x);
    rec.grad_norm_sq = grad.squaredNorm();
    rec.G_norm_sq = grad.squaredNorm();
    rec.z_norm_sq = 0.0;
    rec.phi = rec.f_val;
    rec.sync_flag = true;
    rec.worker_id = -1;
    if (keep_step(tick) || rec.sync_flag) result.records.push_back(rec);
    result.sync_events.push_back(std::move(ev));
  }
  result.center.y = x;
  result.center.t_y = total_steps;
  result.center.g_prev = ParamVec::Zero(obj.dim);
  result.center.velocity = ParamVec::Zero(obj.dim);
  for (int i = 0; i < cfg.n_workers; ++i) {
    WorkerState w;
    w.id = i;
    w.x = x;
    w.sample_sum = ParamVec::Zero(obj.dim);
    result.workers.push_back(std::move(w));
  }
  return result;
}

DistResult run_elastic_or_leader(const ObjectiveSpec& obj, BaselineAlgo algo,
                                 const DistConfig& cfg,
                                 const std::vector<ParamVec>& x0s,
                                 const ParamVec& y0, int total_outer_steps,
                                 std::uint64_t seed) {
  DistResult result;
  for (int i = 0; i < cfg.n_workers; ++i) {
    WorkerState w;
    w.id = i;
    w.x = x0s[i];
    w.sample_sum = ParamVec::Zero(obj.dim);
    w.rng_seed = derive_seed(seed, "worker", i);
    result.workers.push_back(std::move(w));
  }
  result.center.y = y0;
  result.center.g_prev = ParamVec::Zero(obj.dim);
  result.center.velocity = ParamVec::Zero(obj.dim);

  // LSGD pulls toward the best-loss worker, refreshed at each sync.
  ParamVec leader = y0;
  if (algo == BaselineAlgo::kLsgd) {
    int best = 0;
    for (int i = 1; i < cfg.n_workers; ++i) {
      if (obj.eval(x0s[i]) < obj.eval(x0s[best])) best = i;
    }
    leader = x0s[best];
  }

  const std::int64_t period =
      static_cast<std::int64_t>(cfg.n_workers) * cfg.tau;
  std::int64_t tick = 0;
  while (result.center.t_y < total_outer_steps) {
    const int i = static_cast<int>(tick % cfg.n_workers);
    WorkerState& w = result.workers[i];

    std::uint64_t stream = w.rng_seed;
    const std::uint64_t grad_seed = splitmix64(stream);
    w.rng_seed = stream;
    ParamVec g = obj.stochastic_grad(w.x, grad_seed);
    if (algo == BaselineAlgo::kLsgd) {
      g += cfg.lambda() * (w.x - leader);
    }
    w.x -= cfg.eta_inner * g;
    w.t_x += 1;
    w.steps_total += 1;

    if (algo == BaselineAlgo::kEasgd && w.t_x == cfg.tau) {
      // Elastic exchange with the center; coefficient lambda0.
      ParamVec d = cfg.lambda0 * (w.x - result.center.y);
      w.x -= d;
      result.center.y += d;
      w.t_x = 0;
    }
    ++tick;

    if (tick % period == 0) {
      if (algo == BaselineAlgo::kLsgd) {
        int best = 0;
        for (int j = 1; j < cfg.n_workers; ++j) {
          if (obj.eval(result.workers[j].x) < obj.eval(result.workers[best].x))
            best = j;
        }
        leader = result.workers[best].x;
        result.center.y = leader;
        for (WorkerState& ws : result.workers) ws.t_x = 0;
      }
      result.center.t_y += 1;

      SyncEvent ev;
      ev.t_y = result.center.t_y;
      ev.g_prime = ParamVec::Zero(obj.dim);
      for (const WorkerState& ws : result.workers) {
        ev.g_prime += ws.x - result.center.y;
      }
      ev.g_prime /= static_cast<double>(cfg.n_workers);
      ev.g = ev.g_prime;
      ev.worker_iteration_total = result.center.t_y * period;
      result.records.push_back(sync_metrics(obj, cfg, result.workers,
                                            result.center, ev, tick, tick));
      result.sync_events.push_back(std::move(ev));
    } else if (keep_step(tick)) {
      result.records.push_back(
          worker_metrics(obj, cfg, w, result.center.y, tick, tick));
    }
  }
  return result;
}

}  // namespace

DistResult run_baseline(const ObjectiveSpec& obj, BaselineAlgo algo,
                        const DistConfig& cfg,
                        const std::vector<ParamVec>& x0s, const ParamVec& y0,
                        int total_outer_steps, std::uint64_t seed) {
  cfg.validate();
  switch (algo) {
    case BaselineAlgo::kDpSgd:
      return run_data_parallel(obj, false, cfg, y0, total_outer_steps, seed);
    case BaselineAlgo::kDpSam:
      return run_data_parallel(obj, true, cfg, y0, total_outer_steps, seed);
    case BaselineAlgo::kEasgd:
    case BaselineAlgo::kLsgd:
      if (static_cast<int>(x0s.size()) != cfg.n_workers) {
        throw ConfigError("run_baseline: expected one initial point per worker");
      }
      return run_elastic_or_leader(obj, algo, cfg, x0s, y0, total_outer_steps,
                                   seed);
  }
  throw ConfigError("unsupported baseline algorithm");
}

}  // namespace lsam
