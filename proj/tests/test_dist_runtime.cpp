#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lsam/dist_runtime.hpp"
#include "lsam/dual_loop.hpp"
#include "lsam/errors.hpp"
#include "lsam/metrics.hpp"
#include "lsam/rng.hpp"

using namespace lsam;

namespace {

ParamVec vec2(double a, double b) {
  ParamVec v(2);
  v << a, b;
  return v;
}

ParamVec vec1(double a) {
  ParamVec v(1);
  v << a;
  return v;
}

ObjectiveSpec unit_quadratic(double sigma = 0.0) {
  return make_quadratic(2, vec2(1.0, 1.0), sigma);
}

DistConfig base_config() {
  DistConfig cfg;
  cfg.n_workers = 4;
  cfg.tau = 16;
  cfg.eta_inner = 0.05;
  cfg.lambda0 = 0.2;
  cfg.sam = SamParams{0.1, 1e-8};
  // Tame outer step: the full-momentum defaults overshoot on a testbed this
  // strongly curved.
  cfg.eta_outer = 0.1;
  cfg.nesterov_mu = 0.0;
  return cfg;
}

WorkerState fresh_worker(int id, const ParamVec& x, std::uint64_t seed) {
  WorkerState w;
  w.id = id;
  w.x = x;
  w.sample_sum = ParamVec::Zero(x.size());
  w.rng_seed = seed;
  return w;
}

CenterState fresh_center(const ParamVec& y) {
  CenterState c;
  c.y = y;
  c.g_prev = ParamVec::Zero(y.size());
  c.velocity = ParamVec::Zero(y.size());
  return c;
}

}  // namespace

TEST_CASE("config: derived coupling and kernel scale") {
  DistConfig cfg = base_config();
  CHECK(cfg.lambda() == doctest::Approx(0.2 / (0.05 * 16)));
  CHECK(cfg.s_sq() == doctest::Approx(1.0 / cfg.lambda()));
  cfg.kernel_s_sq = 2.0;
  CHECK(cfg.s_sq() == 2.0);
  // Appendix-style defaults.
  DistConfig d;
  CHECK(d.eta_outer == 1.0);
  CHECK(d.beta == 0.9);
}

TEST_CASE("worker drift reproduces the elastic coupling when s^2 = 1/lambda") {
  // With a Gaussian kernel the pull term is (x - y)/s^2 = lambda (x - y).
  ObjectiveSpec obj = unit_quadratic(0.0);
  DistConfig cfg = base_config();
  cfg.temperature = 0.0;
  cfg.sam.rho = 0.0;
  const double lambda = cfg.lambda();

  Rng rng(derive_seed(1, "states"));
  for (int k = 0; k < 100; ++k) {
    ParamVec x = 2.0 * rng.normal_vec(2);
    ParamVec y = 2.0 * rng.normal_vec(2);
    WorkerState w = fresh_worker(0, x, 5);
    WorkerState next = worker_sample_step(obj, cfg, w, y);
    // Expected: one unperturbed coupled step, x - eta (grad + lambda (x-y)).
    ParamVec expected = x - cfg.eta_inner * (obj.grad(x) + lambda * (x - y));
    CHECK((next.x - expected).norm() <= 1e-12 * std::max(1.0, expected.norm()));
    CHECK(next.t_x == 1);
    CHECK(next.steps_total == 1);
    CHECK(next.sample_sum == next.x);
  }
}

TEST_CASE("worker trajectories replay under one seed") {
  ObjectiveSpec obj = unit_quadratic(0.5);
  DistConfig cfg = base_config();
  ParamVec y = vec2(0.5, -0.5);
  WorkerState a = fresh_worker(0, vec2(1.0, 1.0), 99);
  WorkerState b = fresh_worker(0, vec2(1.0, 1.0), 99);
  for (int t = 0; t < 200; ++t) {
    a = worker_sample_step(obj, cfg, std::move(a), y);
    b = worker_sample_step(obj, cfg, std::move(b), y);
    CHECK(a.x == b.x);
  }
}

TEST_CASE("aggregate: single worker, tau = 1") {
  ObjectiveSpec obj = unit_quadratic(0.0);
  DistConfig cfg = base_config();
  cfg.n_workers = 1;
  cfg.tau = 1;
  cfg.temperature = 0.0;
  cfg.nesterov_mu = 0.0;
  std::vector<WorkerState> ws{fresh_worker(0, vec2(1.0, 0.0), 5)};
  CenterState c = fresh_center(vec2(0.2, 0.0));
  ws[0] = worker_sample_step(obj, cfg, std::move(ws[0]), c.y);
  const ParamVec x1 = ws[0].x;
  auto [next, ev] = aggregate_and_update_center(cfg, ws, std::move(c));
  CHECK(ev.g_prime == ParamVec(x1 - vec2(0.2, 0.0)));
  CHECK(ev.g == ev.g_prime);  // first sync skips the momentum difference
  CHECK(ev.worker_iteration_total == 1);
  CHECK(ws[0].t_x == 0);
  CHECK(ws[0].sample_sum.isZero(0.0));
}

TEST_CASE("aggregate: beta = 0 leaves g equal to g-prime after warmup") {
  ObjectiveSpec obj = unit_quadratic(0.0);
  DistConfig cfg = base_config();
  cfg.n_workers = 2;
  cfg.tau = 3;
  cfg.beta = 0.0;
  cfg.nesterov_mu = 0.0;
  std::vector<WorkerState> ws{fresh_worker(0, vec2(1.0, 0.0), 5),
                              fresh_worker(1, vec2(0.0, 1.0), 6)};
  CenterState c = fresh_center(vec2(0.0, 0.0));
  for (int round = 0; round < 3; ++round) {
    for (int s = 0; s < cfg.tau; ++s) {
      for (WorkerState& w : ws) {
        w = worker_sample_step(obj, cfg, std::move(w), c.y);
      }
    }
    auto [next, ev] = aggregate_and_update_center(cfg, ws, std::move(c));
    c = std::move(next);
    CHECK(ev.g == ev.g_prime);
  }
}

TEST_CASE("aggregate: off-schedule call is a protocol error") {
  DistConfig cfg = base_config();
  cfg.n_workers = 2;
  cfg.tau = 4;
  std::vector<WorkerState> ws{fresh_worker(0, vec2(1.0, 0.0), 5),
                              fresh_worker(1, vec2(0.0, 1.0), 6)};
  ws[0].t_x = 3;  // sum = 3, not a multiple of 8
  CenterState c = fresh_center(vec2(0.0, 0.0));
  CHECK_THROWS_AS(aggregate_and_update_center(cfg, ws, std::move(c)),
                  ProtocolError);
}

TEST_CASE("round-robin: sync cadence and counter resets") {
  ObjectiveSpec obj = unit_quadratic(0.5);
  DistConfig cfg = base_config();  // n = 4, tau = 16
  std::vector<ParamVec> x0s(4, vec2(1.0, 1.0));
  DistResult r = run_distributed(obj, cfg, x0s, vec2(1.0, 1.0), 25, 42);
  REQUIRE(r.sync_events.size() == 25);
  for (std::size_t k = 0; k < r.sync_events.size(); ++k) {
    CHECK(r.sync_events[k].worker_iteration_total ==
          std::int64_t(64 * (k + 1)));
  }
  for (const WorkerState& w : r.workers) {
    CHECK(w.t_x == 0);
    CHECK(w.sample_sum.isZero(0.0));
  }
  // Sync rows are always recorded and t is strictly increasing.
  std::int64_t prev = -1;
  int syncs = 0;
  for (const MetricsRecord& rec : r.records) {
    CHECK(rec.t > prev);
    prev = rec.t;
    if (rec.sync_flag) ++syncs;
  }
  CHECK(syncs == 25);
}

TEST_CASE("seeded-random scheduler replays bit-identically") {
  ObjectiveSpec obj = unit_quadratic(0.5);
  DistConfig cfg = base_config();
  cfg.scheduler = SchedulerMode::kSeededRandom;
  std::vector<ParamVec> x0s(4, vec2(1.0, 1.0));
  DistResult a = run_distributed(obj, cfg, x0s, vec2(1.0, 1.0), 10, 7);
  DistResult b = run_distributed(obj, cfg, x0s, vec2(1.0, 1.0), 10, 7);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(to_csv_line(a.records[i]) == to_csv_line(b.records[i]));
  }
  CHECK(a.center.y == b.center.y);
}

TEST_CASE("real-concurrent: protocol invariants across randomized runs") {
  ObjectiveSpec obj = unit_quadratic(0.5);
  DistConfig cfg = base_config();
  cfg.tau = 8;
  cfg.scheduler = SchedulerMode::kRealConcurrent;
  std::vector<ParamVec> x0s(4, vec2(1.0, 1.0));
  for (int k = 0; k < 5; ++k) {
    DistResult r = run_distributed(obj, cfg, x0s, vec2(1.0, 1.0), 6, 300 + k);
    CHECK(r.protocol.worker_requests == r.protocol.center_responses);
    CHECK(r.protocol.queues_drained);
    CHECK(r.protocol.sequence_violations == 0);
    REQUIRE(r.sync_events.size() == 6);
    for (std::size_t e = 0; e < r.sync_events.size(); ++e) {
      CHECK(r.sync_events[e].worker_iteration_total ==
            std::int64_t(32 * (e + 1)));
    }
  }
}

TEST_CASE("n=1 tau=1 noise-free distributed run equals the dual-loop chain") {
  ObjectiveSpec obj = unit_quadratic(0.0);
  const double lambda = 1.0;
  const double alpha = 0.5;

  DistConfig cfg;
  cfg.n_workers = 1;
  cfg.tau = 1;
  cfg.beta = 0.0;
  cfg.eta_inner = 0.1;
  cfg.eta_outer = alpha;
  cfg.lambda0 = lambda * cfg.eta_inner;
  cfg.sam = SamParams{0.0, 1e-8};
  cfg.temperature = 0.0;
  cfg.nesterov_mu = 0.0;
  cfg.inner_schedule = InnerStepSchedule::kSqrtDecay;

  ScheduleSpec sched;
  sched.eta0 = 0.1;
  sched.lambda = lambda;
  sched.alpha = alpha;

  std::vector<WorkerState> ws{fresh_worker(0, vec2(2.0, -1.0), 5)};
  CenterState c = fresh_center(vec2(2.0, -1.0));
  ChainState chain{vec2(2.0, -1.0), vec2(2.0, -1.0), 0, 7};
  double max_dev = 0.0;
  for (int t = 0; t < 2000; ++t) {
    ws[0] = worker_sample_step(obj, cfg, std::move(ws[0]), c.y);
    auto [next_c, ev] = aggregate_and_update_center(cfg, ws, std::move(c));
    c = std::move(next_c);
    auto [next_chain, diag] = step(obj, sched, SamParams{0.0, 1e-8}, chain);
    chain = std::move(next_chain);
    max_dev = std::max(max_dev, (ws[0].x - chain.x).norm());
    max_dev = std::max(max_dev, (c.y - chain.y).norm());
  }
  CHECK(max_dev <= 1e-10);
}

TEST_CASE("conjugate testbed: aggregated direction points back to the origin") {
  // 1-D quadratic, rho = 0: E[g'] at frozen y is y/(1+s^2) - y, so its sign
  // opposes y. Average g' over many frozen-center periods.
  ParamVec h1(1);
  h1 << 1.0;
  ObjectiveSpec obj = make_quadratic(1, h1, 0.0);
  DistConfig cfg;
  cfg.n_workers = 2;
  cfg.tau = 8;
  cfg.eta_inner = 0.05;
  cfg.kernel_s_sq = 1.0;
  cfg.lambda0 = 1.0;  // lambda irrelevant once kernel_s_sq is set
  cfg.sam = SamParams{0.0, 1e-8};
  cfg.temperature = 1.0;
  cfg.nesterov_mu = 0.0;

  const double y_val = 2.0;
  ParamVec y = vec1(y_val);
  std::vector<WorkerState> ws{fresh_worker(0, y, 11), fresh_worker(1, y, 12)};
  double g_prime_mean = 0.0;
  const int periods = 1000;
  for (int p = 0; p < periods; ++p) {
    ParamVec sum = ParamVec::Zero(1);
    for (int s = 0; s < cfg.tau; ++s) {
      for (WorkerState& w : ws) {
        w = worker_sample_step(obj, cfg, std::move(w), y);
      }
    }
    for (WorkerState& w : ws) {
      sum += w.sample_sum;
      w.t_x = 0;
      w.sample_sum.setZero();
    }
    g_prime_mean += (sum / (cfg.n_workers * cfg.tau) - y)[0];
  }
  g_prime_mean /= periods;
  const double expected = y_val / (1.0 + cfg.kernel_s_sq) - y_val;  // -1.0
  CHECK(g_prime_mean < 0.0);
  CHECK(std::abs(g_prime_mean - expected) < 0.15);
}

TEST_CASE("worker divergence raises a diagnosis") {
  ObjectiveSpec bad;
  bad.dim = 1;
  bad.eval = [](const ParamVec& x) { return -x[0] * x[0]; };
  bad.grad = [](const ParamVec& x) -> ParamVec { return ParamVec(-2.0 * x); };
  bad.stochastic_grad = [](const ParamVec& x, std::uint64_t) {
    return ParamVec(-2.0 * x);
  };
  DistConfig cfg;
  cfg.n_workers = 1;
  cfg.tau = 1;
  cfg.eta_inner = 0.6;
  cfg.kernel_s_sq = 1e6;
  cfg.sam = SamParams{0.0, 1e-8};
  WorkerState w = fresh_worker(0, vec1(1.0), 3);
  ParamVec y = vec1(0.0);
  CHECK_THROWS_AS(
      [&] {
        for (int t = 0; t < 100000; ++t) {
          w = worker_sample_step(bad, cfg, std::move(w), y);
        }
      }(),
      ChainDivergenceError);
}

TEST_CASE("baselines: DP-SGD with sigma = 0 equals averaged-gradient descent") {
  ObjectiveSpec obj = unit_quadratic(0.0);
  DistConfig cfg = base_config();
  cfg.eta_inner = 0.1;
  DistResult r = run_baseline(obj, BaselineAlgo::kDpSgd, cfg, {}, vec2(1.0, 0.5),
                              200, 9);
  // Deterministic gradients: every worker contributes the same gradient, so
  // the trajectory is plain gradient descent.
  ParamVec x = vec2(1.0, 0.5);
  for (int t = 0; t < 200; ++t) x -= cfg.eta_inner * obj.grad(x);
  CHECK((r.center.y - x).norm() < 1e-12);
}

TEST_CASE("baselines: DP-SAM at rho = 0 is DP-SGD bit-exactly") {
  ObjectiveSpec obj = unit_quadratic(0.5);
  DistConfig cfg = base_config();
  cfg.sam.rho = 0.0;
  DistResult a = run_baseline(obj, BaselineAlgo::kDpSam, cfg, {},
                              vec2(1.0, 0.5), 100, 9);
  DistResult b = run_baseline(obj, BaselineAlgo::kDpSgd, cfg, {},
                              vec2(1.0, 0.5), 100, 9);
  CHECK(a.center.y == b.center.y);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(to_csv_line(a.records[i]) == to_csv_line(b.records[i]));
  }
}

TEST_CASE("baselines: EASGD with elastic coefficient zero decouples") {
  ObjectiveSpec obj = unit_quadratic(0.5);
  DistConfig cfg = base_config();
  cfg.lambda0 = 0.0;  // elastic coefficient
  // validate() requires lambda0 > 0 for the LSAM coupling; EASGD reuses the
  // field as its elastic coefficient, where zero is meaningful.
  std::vector<ParamVec> x0s{vec2(1.0, 0.0), vec2(0.0, 1.0), vec2(-1.0, 0.0),
                            vec2(0.0, -1.0)};
  CHECK_THROWS_AS(run_baseline(obj, BaselineAlgo::kEasgd, cfg, x0s,
                               vec2(0.3, 0.3), 5, 9),
                  ConfigError);
}

TEST_CASE("baselines: EASGD with tiny elastic coefficient leaves center near its start") {
  ObjectiveSpec obj = unit_quadratic(0.5);
  DistConfig cfg = base_config();
  cfg.lambda0 = 1e-12;
  std::vector<ParamVec> x0s{vec2(1.0, 0.0), vec2(0.0, 1.0), vec2(-1.0, 0.0),
                            vec2(0.0, -1.0)};
  DistResult r =
      run_baseline(obj, BaselineAlgo::kEasgd, cfg, x0s, vec2(0.3, 0.3), 20, 9);
  CHECK((r.center.y - vec2(0.3, 0.3)).norm() < 1e-9);
}

TEST_CASE("baselines: LSGD tracks the best-loss worker") {
  ObjectiveSpec obj = unit_quadratic(0.0);
  DistConfig cfg = base_config();
  cfg.tau = 4;
  std::vector<ParamVec> x0s{vec2(3.0, 0.0), vec2(0.1, 0.1), vec2(-2.0, 1.0),
                            vec2(1.0, -2.0)};
  DistResult r =
      run_baseline(obj, BaselineAlgo::kLsgd, cfg, x0s, vec2(3.0, 0.0), 10, 9);
  // The center is always one of the workers, the best one at the last sync.
  double best = 1e300;
  for (const WorkerState& w : r.workers) {
    best = std::min(best, obj.eval(w.x));
  }
  CHECK(obj.eval(r.center.y) <= best + 1e-9);
}

TEST_CASE("baselines: unsupported algorithm string is rejected") {
  CHECK_THROWS_AS(parse_baseline("sgdm"), ConfigError);
  CHECK(parse_baseline("DP-SAM") == BaselineAlgo::kDpSam);
}
