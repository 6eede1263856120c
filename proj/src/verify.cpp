#include "lsam/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "lsam/conditional_sampler.hpp"
#include "lsam/dist_runtime.hpp"
#include "lsam/dual_loop.hpp"
#include "lsam/errors.hpp"
#include "lsam/landscapes.hpp"
#include "lsam/metrics.hpp"
#include "lsam/rng.hpp"
#include "lsam/sam_map.hpp"

namespace lsam {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Central finite differences of eval; the independent oracle for gradients.
ParamVec central_fd_grad(const ObjectiveSpec& obj, const ParamVec& x,
                         double h) {
  ParamVec g(obj.dim);
  ParamVec p = x;
  for (int i = 0; i < obj.dim; ++i) {
    const double xi = x[i];
    p[i] = xi + h;
    const double fp = obj.eval(p);
    p[i] = xi - h;
    const double fm = obj.eval(p);
    p[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Accumulates the Corollary-8 inequality check across observed steps:
// grad_norm_sq <= 2 G_norm_sq + 2 lambda^2 z_norm_sq, to 1e-9 relative.
struct Cor8Checker {
  double lambda = 0.0;
  long violations = 0;
  long steps = 0;
  double worst_excess = 0.0;

  void observe(const StepDiagnostics& d) {
    ++steps;
    const double rhs =
        2.0 * d.G_norm_sq + 2.0 * lambda * lambda * d.z_norm_sq;
    const double excess = d.grad_norm_sq - rhs;
    if (excess > 1e-9 * std::max(1.0, rhs)) {
      ++violations;
      worst_excess = std::max(worst_excess, excess);
    }
  }
};

}  // namespace

std::vector<CriterionResult> verify_gradients() {
  struct Item {
    std::string name;
    ObjectiveSpec obj;
    double scale;
  };
  ParamVec h2(2), h5(5);
  h2 << 1.0, 3.0;
  h5 << 0.5, 1.0, 1.5, 2.0, 2.5;
  std::vector<Item> items;
  items.push_back({"quadratic-2d", make_quadratic(2, h2, 0.5), 2.0});
  items.push_back({"quadratic-5d", make_quadratic(5, h5, 0.5), 2.0});
  items.push_back({"double-well", make_double_well(0.0), 1.5});
  items.push_back({"basin3", make_basin_landscape(0, 0.5), 3.0});
  items.push_back({"mlp", make_mlp_regression(16, 256, 3, 32), 1.0});

  double worst = 0.0;
  std::string worst_name;
  for (const Item& it : items) {
    Rng rng(derive_seed(42, "fd-points", std::hash<std::string>{}(it.name)));
    for (int k = 0; k < 20; ++k) {
      ParamVec x = it.scale * rng.normal_vec(it.obj.dim);
      ParamVec g = it.obj.grad(x);
      ParamVec gfd = central_fd_grad(it.obj, x, 1e-5);
      const double rel = (g - gfd).norm() / std::max(gfd.norm(), 1e-12);
      if (rel > worst) {
        worst = rel;
        worst_name = it.name;
      }
    }
  }
  const bool pass = worst < 1e-5;
  return {{"C1", "gradient-correctness", pass,
           "max rel err " + fmt(worst) + " on " + worst_name +
               " (tol 1e-05, 20 points per objective)"}};
}

std::vector<CriterionResult> verify_densities() {
  std::vector<CriterionResult> out = verify_gradients();

  struct Obj {
    std::string name;
    ObjectiveSpec obj;
    double span;
    bool convex;
  };
  ParamVec h1(1);
  h1 << 1.0;
  std::vector<Obj> objs;
  objs.push_back({"quadratic-1d", make_quadratic(1, h1, 0.0), 12.0, true});
  objs.push_back({"double-well", make_double_well(0.0), 4.0, false});

  double worst_sam = 0.0, worst_lsam = 0.0;
  bool convex_ok = true;
  std::string convex_detail;
  for (const Obj& o : objs) {
    for (double rho : {0.0, 0.05}) {
      SamParams p{rho, 1e-8};
      // The grids are offset so no node lands on a critical point of f,
      // where the look-back map is discontinuous at the gamma scale.
      const double off = 0.00037;
      const auto grid_a =
          QuadratureGrid::uniform_1d(-o.span + off, o.span + off, 16001);
      const auto grid_b =
          QuadratureGrid::uniform_1d(-o.span + off, o.span + off, 20001);
      const auto za = sam_partition_1d2d(o.obj, p, grid_a);
      const auto zb = sam_partition_1d2d(o.obj, p, grid_b);
      // pi_SAM normalized with grid A's constant, integrated on grid B.
      worst_sam =
          std::max(worst_sam, std::abs(std::exp(zb.log_value - za.log_value) -
                                       1.0));
      if (o.convex && rho > 0.0) {
        SamParams p0{0.0, 1e-8};
        const auto z0 = sam_partition_1d2d(o.obj, p0, grid_a);
        if (!(za.log_value <= z0.log_value)) {
          convex_ok = false;
          convex_detail = "Z_rho " + fmt(za.value) + " > Z_0 " + fmt(z0.value);
        }
      }
      for (double s : {0.5, 1.0}) {
        LsamDensityQuadrature dq(
            o.obj, p, gaussian_kernel(s, 1),
            QuadratureGrid::uniform_1d(-o.span - 3.0, o.span + 3.0, 2801));
        const auto ygrid =
            QuadratureGrid::uniform_1d(-o.span - 3.0, o.span + 3.0, 2801);
        const auto mass = log_trapezoid(
            ygrid, [&](const ParamVec& y) { return dq.log_density(y); });
        worst_lsam = std::max(worst_lsam, std::abs(mass.value - 1.0));
      }
    }
  }
  const bool pass = worst_sam < 1e-6 && worst_lsam < 1e-6 && convex_ok;
  std::string detail = "max |mass-1|: pi_SAM " + fmt(worst_sam) +
                       ", pi_LSAM " + fmt(worst_lsam) + " (tol 1e-06); " +
                       (convex_ok ? "Z_rho <= Z_0 holds" : convex_detail);
  out.push_back({"C2", "density-validity", pass, detail});
  return out;
}

std::vector<CriterionResult> verify_score() {
  ParamVec h1(1);
  h1 << 1.0;

  // Gaussian conjugate testbed: f = x^2/2, rho = 0, s = 1.
  const ObjectiveSpec quad = make_quadratic(1, h1, 0.0);
  const KernelSpec kern1 = gaussian_kernel(1.0, 1);
  const SamParams p0{0.0, 1e-8};
  double worst_conj = 0.0;
  bool any_warning = false;
  for (double y_val : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    ParamVec y(1);
    y[0] = y_val;
    ConditionalSamplerConfig cfg;
    cfg.method = SamplerMethod::kMALA;
    cfg.step = 0.8;
    cfg.chain_len = 100000;
    cfg.seed = derive_seed(2024, "score-conj", static_cast<std::uint64_t>(
                                                   (y_val + 3.0) * 10.0));
    ScoreEstimate est = score_via_conditional(quad, p0, kern1, y, cfg);
    const double closed_form = -y_val / 2.0;  // -y/(1+s^2)
    worst_conj = std::max(worst_conj, std::abs(est.score[0] - closed_form));
    any_warning = any_warning || est.sampler_warning;
  }

  // Double well with perturbation: estimator vs finite differences of the
  // quadrature log density.
  const ObjectiveSpec dwell = make_double_well(0.0);
  const SamParams pd{0.05, 1e-8};
  const KernelSpec kern05 = gaussian_kernel(0.5, 1);
  LsamDensityQuadrature dq(dwell, pd, kern05,
                           QuadratureGrid::uniform_1d(-4.5, 4.5, 4001));
  double worst_dwell = 0.0;
  for (double y_val : {-1.5, -0.7, 0.0, 0.7, 1.5}) {
    ParamVec y(1);
    y[0] = y_val;
    ConditionalSamplerConfig cfg;
    cfg.method = SamplerMethod::kMALA;
    cfg.step = 0.25;
    cfg.chain_len = 100000;
    cfg.seed = derive_seed(2024, "score-dwell", static_cast<std::uint64_t>(
                                                    (y_val + 3.0) * 10.0));
    ScoreEstimate est = score_via_conditional(dwell, pd, kern05, y, cfg);
    const double fd_h = 1e-3;
    ParamVec yp(1), ym(1);
    yp[0] = y_val + fd_h;
    ym[0] = y_val - fd_h;
    const double fd = (dq.log_density(yp) - dq.log_density(ym)) / (2.0 * fd_h);
    worst_dwell = std::max(worst_dwell, std::abs(est.score[0] - fd));
    any_warning = any_warning || est.sampler_warning;
  }

  const bool pass = worst_conj <= 0.05 && worst_dwell <= 0.05 && !any_warning;
  return {{"C3", "score-identity", pass,
           "max |err|: conjugate " + fmt(worst_conj) + ", double-well " +
               fmt(worst_dwell) + " (tol 0.05, chain 1e5)" +
               (any_warning ? "; sampler health warning raised" : "")}};
}

namespace {

// Shared protocol for the Theorem-4 statistic: seed-averaged E|G_t|^2,
// cumulative average scaled by sqrt(T)/log(T), constant fitted on the early
// window and checked on the late window with 2x slack.
struct RateRun {
  std::vector<double> mean_G;  // per-step, averaged over seeds
  std::vector<double> mean_z;
  Cor8Checker cor8;
};

RateRun theorem4_runs(int T, int seeds) {
  ParamVec h(2);
  h << 1.0, 2.0;  // L = 2
  const ObjectiveSpec obj = make_quadratic(2, h, 0.5);
  ScheduleSpec sched;
  sched.eta0 = 1.0 / (2.0 + 1.0);  // 1/(L+lambda)
  sched.rho_mode = RhoMode::kZero;
  sched.lambda = 1.0;
  sched.alpha = 0.5;
  ParamVec x0(2);
  x0 << 1.5, -1.0;

  RateRun run;
  run.mean_G.assign(T, 0.0);
  run.mean_z.assign(T, 0.0);
  run.cor8.lambda = sched.lambda;
  for (int s = 0; s < seeds; ++s) {
    run_chain(obj, sched, SamParams{0.0, 1e-8}, x0, x0, T,
              derive_seed(17, "thm4", s),
              [&](std::int64_t t, const StepDiagnostics& d) {
                run.mean_G[t] += d.G_norm_sq;
                run.mean_z[t] += d.z_norm_sq;
                run.cor8.observe(d);
              });
  }
  for (double& v : run.mean_G) v /= seeds;
  for (double& v : run.mean_z) v /= seeds;
  return run;
}

double scaled_stat(const std::vector<double>& prefix, std::int64_t T) {
  const double avg = prefix[T] / static_cast<double>(T);
  return avg * std::sqrt(static_cast<double>(T)) /
         std::log(static_cast<double>(T));
}

}  // namespace

std::vector<CriterionResult> verify_rates() {
  std::vector<CriterionResult> out;
  Cor8Checker cor8_all;

  // Theorem 4: windowed-rate check on ESGD.
  {
    const int T = 100000;
    RateRun run = theorem4_runs(T, 10);
    cor8_all.violations += run.cor8.violations;
    cor8_all.steps += run.cor8.steps;
    cor8_all.worst_excess =
        std::max(cor8_all.worst_excess, run.cor8.worst_excess);

    std::vector<double> prefix(T + 1, 0.0);
    for (int t = 0; t < T; ++t) prefix[t + 1] = prefix[t] + run.mean_G[t];
    double c_fit = 0.0;
    for (std::int64_t t = 100; t <= 1000; ++t) {
      c_fit = std::max(c_fit, scaled_stat(prefix, t));
    }
    double late = 0.0;
    for (std::int64_t t = 10000; t <= T; ++t) {
      late = std::max(late, scaled_stat(prefix, t));
    }
    const bool pass = late <= 2.0 * c_fit;
    out.push_back({"C4", "theorem4-rate", pass,
                   "fitted c " + fmt(c_fit) + ", late-window max " +
                       fmt(late) + " (cap 2c = " + fmt(2.0 * c_fit) +
                       ", 10 seeds)"});
  }

  // Theorem 5: constant-rho plateau and rho^2 scaling. Run in the
  // noise-free-perturbation regime: gradient noise adds a rho-proportional
  // restoring force on this testbed that would mask the quadratic scaling,
  // while at sigma = 0 the late dynamics are scale-invariant in rho and the
  // plateau ratio is pinned at rho^2.
  {
    ParamVec h(2);
    h << 1.0, 1.0;  // L = 1
    const ObjectiveSpec obj = make_quadratic(2, h, 0.0);
    const double L = 1.0;
    ScheduleSpec sched;
    sched.eta0 = 1.0 / (4.0 * (L + 1.0));
    sched.lambda = 1.0;
    sched.alpha = 0.5;
    ParamVec x0(2);
    x0 << 1.5, -1.0;
    const int T = 100000;
    const int seeds = 2;

    // The plateau is the average of |G_t|^2 over the late window [T/2, T),
    // where the deterministic descent transient has died out and the
    // statistic sits on its perturbation-driven floor.
    auto plateau = [&](double rho) {
      ScheduleSpec s = sched;
      s.rho_mode = rho > 0.0 ? RhoMode::kConstant : RhoMode::kZero;
      s.rho0 = rho;
      double acc = 0.0;
      for (int k = 0; k < seeds; ++k) {
        double wsum = 0.0;
        long wcount = 0;
        run_chain(
            obj, s, SamParams{rho, 1e-8}, x0, x0, T,
            derive_seed(19, "thm5", k * 100 + static_cast<int>(rho * 1000)),
            [&](std::int64_t t, const StepDiagnostics& d) {
              cor8_all.lambda = s.lambda;
              cor8_all.observe(d);
              if (t >= T / 2) {
                wsum += d.G_norm_sq;
                ++wcount;
              }
            });
        acc += wsum / static_cast<double>(wcount);
      }
      return acc / seeds;
    };

    const double base = plateau(0.0);
    const double slack = 3.0 * base;
    bool bound_ok = true;
    std::string bound_detail;
    double p_at[3];
    const double rhos[3] = {0.05, 0.1, 0.2};
    for (int i = 0; i < 3; ++i) {
      p_at[i] = plateau(rhos[i]);
      const double cap = 4.0 * L * L * rhos[i] * rhos[i] + slack;
      if (!(p_at[i] <= cap)) {
        bound_ok = false;
      }
      bound_detail += "rho=" + fmt(rhos[i]) + ": " + fmt(p_at[i]) + "<=" +
                      fmt(cap) + (i < 2 ? ", " : "");
    }
    const double ratio = (p_at[2] - base) / (p_at[1] - base);
    const bool ratio_ok = ratio >= 2.0 && ratio <= 8.0;
    out.push_back({"C5", "theorem5-neighborhood", bound_ok && ratio_ok,
                   bound_detail + "; plateau ratio(0.2/0.1) " + fmt(ratio) +
                       " in [2, 8]"});
  }

  // Theorem 6: decaying rho drives the statistic to zero.
  {
    ParamVec h(2);
    h << 1.0, 1.0;
    const ObjectiveSpec obj = make_quadratic(2, h, 0.1);
    ScheduleSpec sched;
    sched.eta0 = 1.0 / (4.0 * (1.0 + 1.0));
    sched.rho_mode = RhoMode::kDecaying;
    sched.rho0 = 0.5;
    sched.lambda = 1.0;
    sched.alpha = 0.5;
    ParamVec x0(2);
    x0 << 1.5, -1.0;
    const std::int64_t T = 1000000;

    // Window sums over [0.9 * 10^k, 10^k).
    double wsum[4] = {0, 0, 0, 0};
    long wcount[4] = {0, 0, 0, 0};
    run_chain(obj, sched, SamParams{0.5, 1e-8}, x0, x0, T,
              derive_seed(23, "thm6"),
              [&](std::int64_t t, const StepDiagnostics& d) {
                cor8_all.observe(d);
                for (int k = 0; k < 4; ++k) {
                  const std::int64_t hi = static_cast<std::int64_t>(
                      std::pow(10.0, k + 3));
                  const std::int64_t lo = hi - hi / 10;
                  if (t >= lo && t < hi) {
                    wsum[k] += d.G_norm_sq;
                    ++wcount[k];
                  }
                }
              });
    double w[4];
    for (int k = 0; k < 4; ++k) w[k] = wsum[k] / wcount[k];
    const bool tail_ok = w[3] < 1e-2;
    const bool decreasing = w[0] > w[1] && w[1] > w[2] && w[2] > w[3];
    out.push_back({"C6", "theorem6-vanishing", tail_ok && decreasing,
                   "tail avg " + fmt(w[3]) + " (tol 1e-02); decades " +
                       fmt(w[0]) + " > " + fmt(w[1]) + " > " + fmt(w[2]) +
                       " > " + fmt(w[3])});
  }

  out.push_back(
      {"C8", "corollary8-identity", cor8_all.violations == 0,
       std::to_string(cor8_all.steps) + " steps checked, " +
           std::to_string(cor8_all.violations) + " violations (tol 1e-09 rel)"});
  return out;
}

std::vector<CriterionResult> verify_anchor() {
  std::vector<CriterionResult> out;

  // Slope of E|z_t|^2 on the Theorem-4 runs.
  {
    const int T = 100000;
    RateRun run = theorem4_runs(T, 10);
    std::vector<std::pair<double, double>> series;
    for (int t = 1; t < T; t += 10) {
      series.emplace_back(static_cast<double>(t), run.mean_z[t]);
    }
    const double slope = fit_loglog_slope(series, 1e3, 1e5);
    const bool pass = slope <= -0.4;
    out.push_back({"C7a", "lemma7-z-decay-esgd", pass,
                   "loglog slope " + fmt(slope) + " (cap -0.4, 10 seeds)"});
  }

  // Slope on the Theorem-6 decaying-rho run.
  {
    ParamVec h(2);
    h << 1.0, 1.0;
    const ObjectiveSpec obj = make_quadratic(2, h, 0.1);
    ScheduleSpec sched;
    sched.eta0 = 1.0 / 8.0;
    sched.rho_mode = RhoMode::kDecaying;
    sched.rho0 = 0.5;
    sched.lambda = 1.0;
    sched.alpha = 0.5;
    ParamVec x0(2);
    x0 << 1.5, -1.0;
    std::vector<std::pair<double, double>> series;
    run_chain(obj, sched, SamParams{0.5, 1e-8}, x0, x0, 100000,
              derive_seed(23, "thm6"),
              [&](std::int64_t t, const StepDiagnostics& d) {
                if (t % 10 == 1) {
                  series.emplace_back(static_cast<double>(t), d.z_norm_sq);
                }
              });
    const double slope = fit_loglog_slope(series, 1e3, 1e5);
    const bool pass = slope <= -0.4;
    out.push_back({"C7b", "lemma7-z-decay-lsam", pass,
                   "loglog slope " + fmt(slope) + " (cap -0.4)"});
  }

  // Pathwise bound |z_t| <= D in the noise-free variants.
  {
    ParamVec h(2);
    h << 1.0, 1.0;
    const ObjectiveSpec obj = make_quadratic(2, h, 0.0);
    const double L = 1.0;
    const double lambda = 1.0;
    ParamVec x0(2);
    x0 << 1.5, -1.0;

    bool pass = true;
    std::string detail;
    struct Variant {
      const char* name;
      RhoMode mode;
      double rho0;
      double eta0;
    };
    for (const Variant& v :
         {Variant{"esgd", RhoMode::kZero, 0.0, 0.5},
          Variant{"lsam", RhoMode::kDecaying, 0.5, 0.125}}) {
      ScheduleSpec sched;
      sched.eta0 = v.eta0;
      sched.rho_mode = v.mode;
      sched.rho0 = v.rho0;
      sched.lambda = lambda;
      sched.alpha = 0.5;
      double max_x = 0.0, max_z_sq = 0.0;
      run_chain(obj, sched, SamParams{v.rho0, 1e-8}, x0, x0, 20000,
                derive_seed(29, v.name),
                [&](std::int64_t, const StepDiagnostics& d) {
                  // |x| = sqrt(2 f) for the unit quadratic
                  max_x = std::max(max_x, std::sqrt(2.0 * d.f_val));
                  max_z_sq = std::max(max_z_sq, d.z_norm_sq);
                });
      const double C = L * max_x;  // sigma = 0
      const double D = std::max(C / lambda, (C + v.rho0 * L) / lambda);
      if (!(max_z_sq <= D * D)) pass = false;
      detail += std::string(v.name) + ": max|z| " + fmt(std::sqrt(max_z_sq)) +
                " <= D " + fmt(D) + "; ";
    }
    out.push_back({"C7c", "lemma7-pathwise-bound", pass, detail});
  }
  return out;
}

std::vector<CriterionResult> verify_distributed() {
  std::vector<CriterionResult> out;
  ParamVec h(2);
  h << 1.0, 1.0;

  // Protocol conformance, round-robin.
  {
    const ObjectiveSpec obj = make_quadratic(2, h, 0.5);
    DistConfig cfg;
    cfg.n_workers = 4;
    cfg.tau = 16;
    cfg.eta_inner = 0.05;
    cfg.eta_outer = 0.1;  // keeps the look-ahead recurrence contractive here
    cfg.lambda0 = 0.2;
    cfg.sam = SamParams{0.1, 1e-8};
    cfg.scheduler = SchedulerMode::kRoundRobin;
    cfg.nesterov_mu = 0.0;
    ParamVec x0(2);
    x0 << 1.0, 1.0;
    std::vector<ParamVec> x0s(4, x0);

    DistResult r1 = run_distributed(obj, cfg, x0s, x0, 100, 11);
    DistResult r2 = run_distributed(obj, cfg, x0s, x0, 100, 11);

    bool cadence_ok = r1.sync_events.size() == 100;
    for (std::size_t k = 0; k < r1.sync_events.size(); ++k) {
      cadence_ok = cadence_ok && r1.sync_events[k].worker_iteration_total ==
                                     static_cast<std::int64_t>(64 * (k + 1));
    }
    bool reset_ok = true;
    for (const WorkerState& w : r1.workers) {
      reset_ok = reset_ok && w.t_x == 0 && w.sample_sum.isZero(0.0);
    }
    bool replay_ok = r1.records.size() == r2.records.size();
    for (std::size_t k = 0; replay_ok && k < r1.records.size(); ++k) {
      replay_ok = to_csv_line(r1.records[k]) == to_csv_line(r2.records[k]);
    }

    // Real-concurrent invariants over randomized runs.
    DistConfig rc = cfg;
    rc.tau = 8;
    rc.scheduler = SchedulerMode::kRealConcurrent;
    bool concurrent_ok = true;
    for (int k = 0; k < 20; ++k) {
      DistResult r = run_distributed(obj, rc, x0s, x0, 10, 100 + k);
      concurrent_ok =
          concurrent_ok &&
          r.protocol.worker_requests == r.protocol.center_responses &&
          r.protocol.queues_drained && r.protocol.sequence_violations == 0 &&
          r.sync_events.size() == 10;
      for (std::size_t e = 1; e < r.sync_events.size(); ++e) {
        concurrent_ok = concurrent_ok &&
                        r.sync_events[e].worker_iteration_total -
                                r.sync_events[e - 1].worker_iteration_total ==
                            32;
      }
    }

    const bool pass = cadence_ok && reset_ok && replay_ok && concurrent_ok;
    out.push_back(
        {"C9", "protocol-conformance", pass,
         std::string("cadence ") + (cadence_ok ? "ok" : "BAD") + ", resets " +
             (reset_ok ? "ok" : "BAD") + ", replay " +
             (replay_ok ? "byte-identical" : "DIVERGED") + ", concurrent " +
             (concurrent_ok ? "ok (20 runs)" : "BAD")});
  }

  // Single-chain equivalence: n = 1, tau = 1, noise off, beta = 0,
  // kernel scale s^2 = 1/lambda, outer step = alpha.
  {
    const ObjectiveSpec obj = make_quadratic(2, h, 0.0);
    const double lambda = 1.0;
    const double alpha = 0.5;

    DistConfig cfg;
    cfg.n_workers = 1;
    cfg.tau = 1;
    cfg.beta = 0.0;
    cfg.eta_inner = 0.1;
    cfg.eta_outer = alpha;
    cfg.lambda0 = lambda * cfg.eta_inner * cfg.tau;
    cfg.sam = SamParams{0.05, 1e-8};
    cfg.temperature = 0.0;
    cfg.nesterov_mu = 0.0;
    cfg.inner_schedule = InnerStepSchedule::kSqrtDecay;

    ScheduleSpec sched;
    sched.eta0 = 0.1;
    sched.rho_mode = RhoMode::kConstant;
    sched.rho0 = 0.05;
    sched.lambda = lambda;
    sched.alpha = alpha;

    ParamVec x0(2);
    x0 << 2.0, -1.0;

    WorkerState w;
    w.id = 0;
    w.x = x0;
    w.sample_sum = ParamVec::Zero(2);
    w.rng_seed = derive_seed(31, "worker", 0);
    std::vector<WorkerState> workers{w};
    CenterState center;
    center.y = x0;
    center.g_prev = ParamVec::Zero(2);
    center.velocity = ParamVec::Zero(2);

    ChainState chain{x0, x0, 0, derive_seed(31, "chain")};
    double max_dev = 0.0;
    for (int t = 0; t < 10000; ++t) {
      workers[0] =
          worker_sample_step(obj, cfg, std::move(workers[0]), center.y);
      auto [next_center, ev] =
          aggregate_and_update_center(cfg, workers, std::move(center));
      center = std::move(next_center);
      auto [next_chain, diag] = step(obj, sched, SamParams{0.05, 1e-8}, chain);
      chain = std::move(next_chain);
      max_dev = std::max(max_dev, (workers[0].x - chain.x).norm());
      max_dev = std::max(max_dev, (center.y - chain.y).norm());
    }
    const bool pass = max_dev <= 1e-10;
    out.push_back({"C10", "alg1-alg2-equivalence", pass,
                   "max per-step deviation " + fmt(max_dev) +
                       " over 1e4 steps (tol 1e-10)"});
  }
  return out;
}

std::vector<CriterionResult> verify_basins() {
  const ObjectiveSpec noisy = make_basin_landscape(0, 0.5);
  const ObjectiveSpec clean = make_basin_landscape(0, 0.0);
  const double L = *clean.smoothness_L;

  std::size_t wide_deep_idx = 0;
  for (std::size_t i = 0; i < clean.minima_catalog.size(); ++i) {
    if (clean.minima_catalog[i].basin == BasinLabel::kWideDeep) {
      wide_deep_idx = i;
    }
  }

  const int trials = 200;
  int esgd_hits = 0, sam_hits = 0, lsam_hits = 0;
  for (int k = 0; k < trials; ++k) {
    Rng rng(derive_seed(2718, "basin-init", k));
    ParamVec init(2);
    init[0] = 10.0 * rng.uniform() - 5.0;
    init[1] = 10.0 * rng.uniform() - 5.0;

    // Noise-free ESGD: coupled chain, no perturbation.
    {
      ScheduleSpec sched;
      sched.eta0 = 1.0 / (L + 0.25);
      sched.rho_mode = RhoMode::kZero;
      sched.lambda = 0.25;
      sched.alpha = 0.5;
      ChainResult r = run_chain(clean, sched, SamParams{0.0, 1e-8}, init, init,
                                8000, derive_seed(2718, "esgd", k));
      if (classify_basin(clean, r.final_state.x) == wide_deep_idx) ++esgd_hits;
    }

    // Single-chain SAM: constant step, no coupling.
    {
      DistConfig cfg;
      cfg.n_workers = 1;
      cfg.tau = 1;
      cfg.eta_inner = 0.02;
      cfg.lambda0 = 0.2;
      cfg.sam = SamParams{0.3, 1e-8};
      DistResult r = run_baseline(noisy, BaselineAlgo::kDpSam, cfg, {init},
                                  init, 8000, derive_seed(2718, "sam", k));
      if (classify_basin(clean, r.center.y) == wide_deep_idx) ++sam_hits;
    }

    // Distributed LSAM: Langevin workers, smoothed center ascent.
    {
      DistConfig cfg;
      cfg.n_workers = 4;
      cfg.tau = 16;
      cfg.beta = 0.9;
      cfg.eta_inner = 0.02;
      cfg.eta_outer = 1.0;
      cfg.lambda0 = 0.1;
      cfg.sam = SamParams{0.3, 1e-8};
      cfg.temperature = 1.0;
      cfg.nesterov_mu = 0.0;
      std::vector<ParamVec> x0s(4, init);
      DistResult r = run_distributed(noisy, cfg, x0s, init, 150,
                                     derive_seed(2718, "lsam", k));
      if (classify_basin(clean, r.center.y) == wide_deep_idx) ++lsam_hits;
    }
  }

  const double f_esgd = static_cast<double>(esgd_hits) / trials;
  const double f_sam = static_cast<double>(sam_hits) / trials;
  const double f_lsam = static_cast<double>(lsam_hits) / trials;
  const bool pass = lsam_hits > sam_hits && lsam_hits > esgd_hits;
  return {{"C11", "basin-selection", pass,
           "wide-deep fraction: lsam " + fmt(f_lsam) + ", sam " + fmt(f_sam) +
               ", esgd " + fmt(f_esgd) + " (lsam must strictly exceed both)"}};
}

std::vector<CriterionResult> run_suite(const std::string& name) {
  if (name == "densities") return verify_densities();
  if (name == "score") return verify_score();
  if (name == "rates") return verify_rates();
  if (name == "anchor") return verify_anchor();
  if (name == "distributed") return verify_distributed();
  if (name == "basins") return verify_basins();
  if (name == "all") {
    std::vector<CriterionResult> all;
    for (const char* suite :
         {"densities", "score", "rates", "anchor", "distributed", "basins"}) {
      std::vector<CriterionResult> rs = run_suite(suite);
      all.insert(all.end(), rs.begin(), rs.end());
    }
    return all;
  }
  throw ConfigError(
      "unknown suite '" + name +
      "' (expected densities, score, rates, anchor, distributed, basins, "
      "or all)");
}

void print_report(std::ostream& os, const std::vector<CriterionResult>& rs) {
  for (const CriterionResult& r : rs) {
    os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << ": "
       << r.detail << '\n';
  }
}

bool all_pass(const std::vector<CriterionResult>& rs) {
  for (const CriterionResult& r : rs) {
    if (!r.pass) return false;
  }
  return true;
}

}  // namespace lsam
