#include "lsam/conditional_sampler.hpp"

#include <cmath>
#include <limits>

#include "lsam/errors.hpp"
#include "lsam/rng.hpp"

namespace lsam {

namespace {

constexpr double kConfinementRadius = 1e3;

void require_admissible(const KernelSpec& kern) {
  if (kern.tail_class == TailClass::kNone) {
    throw ConfigError(
        "kernel tail class does not guarantee a finite normalizer; "
        "rejected for density use");
  }
}

// Exact unnormalized log q(x | y) = -f(T(x)) - phi(x - y).
double log_q(const ObjectiveSpec& obj, const SamParams& p,
             const KernelSpec& kern, const ParamVec& y, const ParamVec& x) {
  return -sam_loss(obj, p, x) - kern.phi(x - y);
}

// Deterministic drift: exact-gradient SAM approximation of grad f(T(x))
// plus the kernel pull. No Jacobian-of-T term.
ParamVec exact_drift(const ObjectiveSpec& obj, const SamParams& p,
                     const KernelSpec& kern, const ParamVec& y,
                     const ParamVec& x) {
  return obj.grad(lookback_map(obj, p, x)) + kern.grad_phi(x - y);
}

void check_confined(const ParamVec& x, int t, const ParamVec& y) {
  if (x.norm() > kConfinementRadius || !all_finite(x)) {
    throw ChainDivergenceError(
        "conditional chain diverged at step " + std::to_string(t) +
        ": |x| = " + std::to_string(x.norm()) +
        ", anchor |y| = " + std::to_string(y.norm()));
  }
}

}  // namespace

void ConditionalSamplerConfig::validate() const {
  if (chain_len < 1) throw ConfigError("sampler: chain_len must be >= 1");
  if (!(step > 0.0)) throw ConfigError("sampler: step must be > 0");
  if (effective_burn_in() >= chain_len) {
    throw ConfigError("sampler: burn_in must leave at least one sample");
  }
}

ChainSamples sample_conditional(const ObjectiveSpec& obj, const SamParams& p,
                                const KernelSpec& kern, const ParamVec& y,
                                const ConditionalSamplerConfig& cfg) {
  cfg.validate();
  p.validate();
  require_admissible(kern);

  Rng rng(derive_seed(cfg.seed, "conditional-chain"));
  const int burn = cfg.effective_burn_in();
  ChainSamples out;
  out.samples.reserve(cfg.chain_len - burn);

  ParamVec x = y;
  long accepted = 0;
  long proposed = 0;

  if (cfg.method == SamplerMethod::kSGLD) {
    const double noise_scale = std::sqrt(cfg.step);
    for (int t = 0; t < cfg.chain_len; ++t) {
      const std::uint64_t grad_seed = derive_seed(cfg.seed, "sgld-grad", t);
      ParamVec drift =
          sam_stochastic_grad(obj, p, x, grad_seed) + kern.grad_phi(x - y);
      x += -0.5 * cfg.step * drift + noise_scale * rng.normal_vec(obj.dim);
      check_confined(x, t, y);
      if (t >= burn) out.samples.push_back(x);
    }
    out.acceptance_rate = 1.0;
    return out;
  }

  // MALA
  double logq_x = log_q(obj, p, kern, y, x);
  ParamVec drift_x = exact_drift(obj, p, kern, y, x);
  const double noise_scale = std::sqrt(cfg.step);
  for (int t = 0; t < cfg.chain_len; ++t) {
    ParamVec mean_fwd = x - 0.5 * cfg.step * drift_x;
    ParamVec prop = mean_fwd + noise_scale * rng.normal_vec(obj.dim);
    const double logq_prop = log_q(obj, p, kern, y, prop);
    ParamVec drift_prop = exact_drift(obj, p, kern, y, prop);
    ParamVec mean_rev = prop - 0.5 * cfg.step * drift_prop;

    const double log_alpha =
        logq_prop - logq_x +
        (-(x - mean_rev).squaredNorm() + (prop - mean_fwd).squaredNorm()) /
            (2.0 * cfg.step);
    ++proposed;
    if (std::log(rng.uniform() + std::numeric_limits<double>::min()) <
        log_alpha) {
      x = std::move(prop);
      logq_x = logq_prop;
      drift_x = std::move(drift_prop);
      ++accepted;
    }
    check_confined(x, t, y);
    if (t >= burn) out.samples.push_back(x);
  }
  out.acceptance_rate =
      proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
  out.sampler_warning =
      out.acceptance_rate < 0.05 || out.acceptance_rate > 0.99;
  return out;
}

ScoreEstimate score_via_conditional(const ObjectiveSpec& obj,
                                    const SamParams& p, const KernelSpec& kern,
                                    const ParamVec& y,
                                    const ConditionalSamplerConfig& cfg) {
  ChainSamples chain = sample_conditional(obj, p, kern, y, cfg);
  ParamVec score_acc = ParamVec::Zero(obj.dim);
  ParamVec mean_acc = ParamVec::Zero(obj.dim);
  for (const ParamVec& x : chain.samples) {
    score_acc += kern.grad_phi(x - y);  // -grad_y k(x, y)
    mean_acc += x;
  }
  const double m = static_cast<double>(chain.samples.size());
  ScoreEstimate est;
  est.score = score_acc / m;
  est.chain_mean = mean_acc / m;
  est.acceptance_rate = chain.acceptance_rate;
  est.sampler_warning = chain.sampler_warning;
  return est;
}

LsamDensityQuadrature::LsamDensityQuadrature(const ObjectiveSpec& obj,
                                             const SamParams& p,
                                             const KernelSpec& kern,
                                             const QuadratureGrid& x_grid)
    : kern_(kern), grid_(x_grid) {
  require_admissible(kern);
  p.validate();
  if (obj.dim != 1 && obj.dim != 2) {
    throw ConfigError("LsamDensityQuadrature: dimension must be 1 or 2");
  }
  grid_.validate(obj.dim);
  nodes_ = grid_nodes(grid_);
  log_sam_values_.reserve(nodes_.size());
  for (const ParamVec& node : nodes_) {
    log_sam_values_.push_back(sam_log_density_unnormalized(obj, p, node));
  }
  log_sam_partition_ = log_trapezoid_values(grid_, log_sam_values_).log_value;
  const double span = grid_.hi[0] - grid_.lo[0];
  log_kernel_z_ = ::lsam::kernel_log_normalizer(kern_, obj.dim, span,
                                                grid_.points[0] * 2 + 1);
}

double LsamDensityQuadrature::log_density(const ParamVec& y) const {
  std::vector<double> log_values(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    log_values[i] = log_sam_values_[i] - kern_.phi(nodes_[i] - y);
  }
  const double log_inner = log_trapezoid_values(grid_, log_values).log_value;
  return log_inner - log_sam_partition_ - log_kernel_z_;
}

double LsamDensityQuadrature::density(const ParamVec& y) const {
  return std::exp(log_density(y));
}

double lsam_density_quadrature(const ObjectiveSpec& obj, const SamParams& p,
                               const KernelSpec& kern, const ParamVec& y,
                               const QuadratureGrid& grid) {
  return LsamDensityQuadrature(obj, p, kern, grid).density(y);
}

}  // namespace lsam
