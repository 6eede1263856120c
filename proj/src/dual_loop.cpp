#include "lsam/dual_loop.hpp"

#include <cmath>

#include "lsam/errors.hpp"
#include "lsam/rng.hpp"

namespace lsam {

const char* to_string(RhoMode mode) {
  switch (mode) {
    case RhoMode::kZero: return "zero";
    case RhoMode::kConstant: return "constant";
    case RhoMode::kDecaying: return "decaying";
  }
  return "?";
}

double ScheduleSpec::eta_at(std::int64_t t) const {
  return eta0 / std::sqrt(static_cast<double>(t + 1));
}

double ScheduleSpec::rho_at(std::int64_t t) const {
  switch (rho_mode) {
    case RhoMode::kZero: return 0.0;
    case RhoMode::kConstant: return rho0;
    case RhoMode::kDecaying:
      return rho0 / std::sqrt(static_cast<double>(t + 1));
  }
  return 0.0;
}

void ScheduleSpec::validate() const {
  if (!(eta0 > 0.0)) throw ConfigError("schedule: eta0 must be > 0");
  if (lambda < 0.0) throw ConfigError("schedule: lambda must be >= 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("schedule: alpha must be in (0, 1]");
  }
  if (rho_mode != RhoMode::kZero && rho0 < 0.0) {
    throw ConfigError("schedule: rho0 must be >= 0");
  }
}

void ScheduleSpec::validate_caps(const ObjectiveSpec& obj) const {
  validate();
  if (!obj.smoothness_L) return;  // cap not checkable
  const double L_lambda = *obj.smoothness_L + lambda;
  if (rho_mode == RhoMode::kZero) {
    if (eta0 > 1.0 / L_lambda + 1e-15) {
      throw ConfigError(
          "schedule: eta0 = " + std::to_string(eta0) +
          " violates the unperturbed-run cap eta0 <= 1/(L+lambda) = " +
          std::to_string(1.0 / L_lambda));
    }
  } else {
    if (eta0 > 0.25 / L_lambda + 1e-15) {
      throw ConfigError(
          "schedule: eta0 = " + std::to_string(eta0) +
          " violates the perturbed-run cap eta0 <= 1/(4(L+lambda)) = " +
          std::to_string(0.25 / L_lambda));
    }
  }
}

std::pair<ChainState, StepDiagnostics> step(const ObjectiveSpec& obj,
                                            const ScheduleSpec& sched,
                                            const SamParams& sam,
                                            const ChainState& state) {
  const double eta = sched.eta_at(state.t);
  const double rho = sched.rho_at(state.t);

  // Diagnostics with the exact gradient, before the update.
  const ParamVec z = state.x - state.y;
  const ParamVec exact_grad = obj.grad(state.x);
  StepDiagnostics diag;
  diag.f_val = obj.eval(state.x);
  diag.grad_norm_sq = exact_grad.squaredNorm();
  diag.z_norm_sq = z.squaredNorm();
  diag.G_norm_sq = (exact_grad + sched.lambda * z).squaredNorm();
  diag.phi = diag.f_val + 0.5 * sched.lambda * diag.z_norm_sq;

  const std::uint64_t xi = derive_seed(state.rng_seed, "xi", state.t);
  SamParams step_sam{rho, sam.gamma};
  const ParamVec g = rho > 0.0 ? sam_stochastic_grad(obj, step_sam, state.x, xi)
                               : obj.stochastic_grad(state.x, xi);

  ChainState next;
  next.x = state.x - eta * (g + sched.lambda * z);
  const ParamVec z_next =
      (1.0 - sched.alpha) * ((1.0 - sched.lambda * eta) * z - eta * g);
  next.y = next.x - z_next;
  next.t = state.t + 1;
  next.rng_seed = state.rng_seed;
  return {std::move(next), diag};
}

ChainResult run_chain(const ObjectiveSpec& obj, const ScheduleSpec& sched,
                      const SamParams& sam, const ParamVec& x0,
                      const ParamVec& y0, std::int64_t T, std::uint64_t seed,
                      const StepObserver& observer) {
  if (T < 1) throw ConfigError("run_chain: T must be >= 1");
  sam.validate();
  sched.validate_caps(obj);
  if (x0.size() != obj.dim || y0.size() != obj.dim) {
    throw ConfigError("run_chain: initial point dimension mismatch");
  }

  ChainResult result;
  ChainState state{x0, y0, 0, seed};
  double sum_G = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    auto [next, diag] = step(obj, sched, sam, state);
    const bool diag_ok = std::isfinite(diag.f_val) &&
                         std::isfinite(diag.G_norm_sq) &&
                         std::isfinite(diag.grad_norm_sq) &&
                         std::isfinite(diag.z_norm_sq);
    if (!diag_ok) {
      result.aborted = true;
      result.abort_reason =
          "non-finite diagnostics at step " + std::to_string(t);
      result.final_state = std::move(state);
      result.time_avg_G_norm_sq = t > 0 ? sum_G / static_cast<double>(t) : 0.0;
      return result;
    }
    sum_G += diag.G_norm_sq;
    if (observer) observer(t, diag);
    if (keep_step(t)) {
      MetricsRecord rec;
      rec.t = t;
      rec.wall_ns = t;
      rec.f_val = diag.f_val;
      rec.grad_norm_sq = diag.grad_norm_sq;
      rec.G_norm_sq = diag.G_norm_sq;
      rec.z_norm_sq = diag.z_norm_sq;
      rec.phi = diag.phi;
      rec.worker_id = -1;
      result.records.push_back(rec);
    }
    if (!all_finite(next.x) || !all_finite(next.y)) {
      result.aborted = true;
      result.abort_reason =
          "non-finite state at step " + std::to_string(t + 1);
      result.final_state = std::move(state);
      result.time_avg_G_norm_sq = sum_G / static_cast<double>(t + 1);
      return result;
    }
    state = std::move(next);
  }
  result.final_state = std::move(state);
  result.time_avg_G_norm_sq = sum_G / static_cast<double>(T);
  return result;
}

}  // namespace lsam
