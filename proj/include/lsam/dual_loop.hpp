#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lsam/landscapes.hpp"
#include "lsam/metrics.hpp"
#include "lsam/sam_map.hpp"

namespace lsam {

enum class RhoMode { kZero, kConstant, kDecaying };

const char* to_string(RhoMode mode);

// Step-size and perturbation schedules of the single-chain update. The step
// size is always eta_t = eta0 / sqrt(t+1); the perturbation radius is zero,
// the constant rho0, or rho0 / sqrt(t+1).
struct ScheduleSpec {
  double eta0 = 0.1;
  RhoMode rho_mode = RhoMode::kZero;
  double rho0 = 0.0;
  double lambda = 0.0;  // coupling strength, >= 0
  double alpha = 0.5;   // mixing coefficient, in (0, 1]

  double eta_at(std::int64_t t) const;
  double rho_at(std::int64_t t) const;

  // Enforces the step-size cap of the matching convergence regime:
  // eta0 <= 1/(L+lambda) for rho_mode zero, eta0 <= 1/(4(L+lambda))
  // otherwise. Skipped when the objective's smoothness constant is unknown.
  void validate_caps(const ObjectiveSpec& obj) const;
  void validate() const;
};

struct ChainState {
  ParamVec x;
  ParamVec y;
  std::int64_t t = 0;
  std::uint64_t rng_seed = 0;
};

// Verification-grade diagnostics, computed with the exact gradient at
// (x_t, y_t) before the update is applied.
struct StepDiagnostics {
  double G_norm_sq = 0.0;     // |grad f(x) + lambda (x - y)|^2
  double z_norm_sq = 0.0;     // |x - y|^2
  double phi = 0.0;           // f(x) + lambda/2 |x - y|^2
  double f_val = 0.0;
  double grad_norm_sq = 0.0;
};

// One alternating update. The anchor gap z is advanced by its own recursion
// z' = (1-alpha)((1-lambda eta) z - eta g) and y' = x' - z', which is the
// same update as y' = alpha x' + (1-alpha) y up to rounding and makes the
// gap recursion hold bit-exactly.
std::pair<ChainState, StepDiagnostics> step(const ObjectiveSpec& obj,
                                            const ScheduleSpec& sched,
                                            const SamParams& sam,
                                            const ChainState& state);

using StepObserver =
    std::function<void(std::int64_t t, const StepDiagnostics&)>;

struct ChainResult {
  std::vector<MetricsRecord> records;  // downsampled per keep_step
  ChainState final_state;
  double time_avg_G_norm_sq = 0.0;  // over all T steps, not just logged ones
  bool aborted = false;
  std::string abort_reason;
};

// Runs T steps from (x0, y0). Deterministic given the seed. A non-finite
// state aborts the run and keeps the last good diagnostics. The observer,
// when given, sees every step at full resolution.
ChainResult run_chain(const ObjectiveSpec& obj, const ScheduleSpec& sched,
                      const SamParams& sam, const ParamVec& x0,
                      const ParamVec& y0, std::int64_t T, std::uint64_t seed,
                      const StepObserver& observer = {});

}  // namespace lsam
