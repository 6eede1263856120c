#include "lsam/landscapes.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <memory>

#include "lsam/errors.hpp"
#include "lsam/rng.hpp"

namespace lsam {

const char* to_string(BasinLabel label) {
  switch (label) {
    case BasinLabel::kDeepSharp: return "deep-sharp";
    case BasinLabel::kWideShallow: return "wide-shallow";
    case BasinLabel::kWideDeep: return "wide-deep";
  }
  return "?";
}

namespace {

// Wraps an exact gradient with additive isotropic Gaussian noise of total
// variance sigma^2 (per-component std sigma/sqrt(d)), so the (C1) bound holds
// with equality. The noise draw depends only on the seed, not on the point.
std::function<ParamVec(const ParamVec&, std::uint64_t)> gaussian_noise_oracle(
    std::function<ParamVec(const ParamVec&)> grad, int dim, double sigma,
    std::uint64_t stream_tag) {
  const double scale = sigma / std::sqrt(static_cast<double>(dim));
  return [grad = std::move(grad), dim, scale, stream_tag](
             const ParamVec& x, std::uint64_t seed) -> ParamVec {
    ParamVec g = grad(x);
    if (scale > 0.0) {
      g += scale * standard_normal_vec(mix_seed(stream_tag, seed), dim);
    }
    return g;
  };
}

}  // namespace

ObjectiveSpec make_quadratic(int dim, const ParamVec& hessian_diag,
                             double noise_sigma) {
  if (hessian_diag.size() != dim) {
    throw ConfigError("make_quadratic: hessian_diag has dimension " +
                      std::to_string(hessian_diag.size()) + ", expected " +
                      std::to_string(dim));
  }
  for (int i = 0; i < dim; ++i) {
    if (!(hessian_diag[i] > 0.0)) {
      throw ConfigError("make_quadratic: curvature component " +
                        std::to_string(i) + " is nonpositive");
    }
  }
  auto h = std::make_shared<ParamVec>(hessian_diag);

  ObjectiveSpec spec;
  spec.dim = dim;
  spec.eval = [h](const ParamVec& x) {
    return 0.5 * x.cwiseProduct(x).dot(*h);
  };
  spec.grad = [h](const ParamVec& x) -> ParamVec { return h->cwiseProduct(x); };
  spec.stochastic_grad =
      gaussian_noise_oracle(spec.grad, dim, noise_sigma, /*stream_tag=*/0x71ad);
  spec.smoothness_L = hessian_diag.maxCoeff();
  spec.noise_sigma = noise_sigma;
  spec.minima_catalog = {{ParamVec::Zero(dim), BasinLabel::kWideDeep}};
  return spec;
}

ObjectiveSpec make_double_well(double noise_sigma) {
  ObjectiveSpec spec;
  spec.dim = 1;
  spec.eval = [](const ParamVec& x) {
    const double u = x[0] * x[0] - 1.0;
    return u * u;
  };
  spec.grad = [](const ParamVec& x) -> ParamVec {
    ParamVec g(1);
    g[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0);
    return g;
  };
  spec.stochastic_grad =
      gaussian_noise_oracle(spec.grad, 1, noise_sigma, /*stream_tag=*/0xd0b1);
  // f'' = 12 x^2 - 4; the experiments stay well inside |x| <= 3.
  spec.smoothness_L = 104.0;
  spec.noise_sigma = noise_sigma;
  ParamVec left(1), right(1);
  left[0] = -1.0;
  right[0] = 1.0;
  spec.minima_catalog = {{left, BasinLabel::kWideDeep},
                         {right, BasinLabel::kWideDeep}};
  return spec;
}

namespace {

// Fixed geometry of the three-basin landscape. The confining quadratic is
// centered on the deep-sharp bump so that generic descent trajectories funnel
// into the sharp well unless captured by one of the wide bumps first.
struct Bump {
  double cx, cy;
  double amp;
  double width;
  BasinLabel label;
};

constexpr double kConfine = 0.04;
constexpr double kConfineCx = 2.2;
constexpr double kConfineCy = 2.2;

constexpr std::array<Bump, 3> kBumps = {{
    {2.2, 2.2, 3.0, 0.15, BasinLabel::kDeepSharp},
    {-2.2, 0.6, 1.5, 1.50, BasinLabel::kWideShallow},
    {0.8, -2.0, 3.3, 1.00, BasinLabel::kWideDeep},
}};

double basin_eval(const ParamVec& x) {
  const double dx0 = x[0] - kConfineCx;
  const double dy0 = x[1] - kConfineCy;
  double f = kConfine * (dx0 * dx0 + dy0 * dy0);
  for (const Bump& b : kBumps) {
    const double dx = x[0] - b.cx;
    const double dy = x[1] - b.cy;
    f -= b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
  }
  return f;
}

ParamVec basin_grad(const ParamVec& x) {
  ParamVec g(2);
  g[0] = 2.0 * kConfine * (x[0] - kConfineCx);
  g[1] = 2.0 * kConfine * (x[1] - kConfineCy);
  for (const Bump& b : kBumps) {
    const double dx = x[0] - b.cx;
    const double dy = x[1] - b.cy;
    const double w2 = b.width * b.width;
    const double e = b.amp / w2 * std::exp(-(dx * dx + dy * dy) / (2.0 * w2));
    g[0] += e * dx;
    g[1] += e * dy;
  }
  return g;
}

// Analytic 2x2 Hessian, used for Newton polish and the smoothness estimate.
Eigen::Matrix2d basin_hessian(const ParamVec& x) {
  Eigen::Matrix2d h = 2.0 * kConfine * Eigen::Matrix2d::Identity();
  for (const Bump& b : kBumps) {
    const double dx = x[0] - b.cx;
    const double dy = x[1] - b.cy;
    const double w2 = b.width * b.width;
    const double e = b.amp / w2 * std::exp(-(dx * dx + dy * dy) / (2.0 * w2));
    h(0, 0) += e * (1.0 - dx * dx / w2);
    h(1, 1) += e * (1.0 - dy * dy / w2);
    const double off = -e * dx * dy / w2;
    h(0, 1) += off;
    h(1, 0) += off;
  }
  return h;
}

double spectral_norm_2x2(const Eigen::Matrix2d& h) {
  const double mean = 0.5 * (h(0, 0) + h(1, 1));
  const double det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
  const double disc = std::sqrt(std::max(0.0, mean * mean - det));
  return std::max(std::abs(mean + disc), std::abs(mean - disc));
}

// Newton polish from a bump center down to its exact local minimum.
ParamVec polish_minimum(ParamVec x) {
  for (int it = 0; it < 60; ++it) {
    ParamVec g = basin_grad(x);
    if (g.norm() < 1e-13) break;
    Eigen::Matrix2d h = basin_hessian(x);
    Eigen::Vector2d step = h.inverse() * Eigen::Vector2d(g[0], g[1]);
    x[0] -= step[0];
    x[1] -= step[1];
  }
  return x;
}

double basin_smoothness_estimate() {
  double worst = 0.0;
  for (double x = -5.5; x <= 5.5; x += 0.05) {
    for (double y = -5.5; y <= 5.5; y += 0.05) {
      ParamVec p(2);
      p[0] = x;
      p[1] = y;
      worst = std::max(worst, spectral_norm_2x2(basin_hessian(p)));
    }
  }
  return worst;
}

}  // namespace

ObjectiveSpec make_basin_landscape(std::uint64_t seed, double noise_sigma) {
  static const double kSmoothnessL = basin_smoothness_estimate();

  ObjectiveSpec spec;
  spec.dim = 2;
  spec.eval = basin_eval;
  spec.grad = basin_grad;
  spec.stochastic_grad = gaussian_noise_oracle(
      spec.grad, 2, noise_sigma, mix_seed(0xba51, seed));
  spec.smoothness_L = kSmoothnessL;
  spec.noise_sigma = noise_sigma;
  for (const Bump& b : kBumps) {
    ParamVec c(2);
    c[0] = b.cx;
    c[1] = b.cy;
    spec.minima_catalog.push_back({polish_minimum(c), b.label});
  }
  return spec;
}

namespace {

// Immutable network/dataset bundle shared by the MLP closures.
struct MlpData {
  int hidden = 0;
  int samples = 0;
  int minibatch = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd inputs;   // samples x 2
  Eigen::VectorXd targets;  // samples
};

constexpr int kMlpInputDim = 2;

int mlp_param_dim(int hidden) { return hidden * kMlpInputDim + 2 * hidden + 1; }

// Loss over the given sample rows: mean over rows of (net(x) - y)^2.
// Gradient accumulated in reverse mode when grad_out is non-null.
double mlp_loss_and_grad(const MlpData& d, const ParamVec& w,
                         const std::vector<int>& rows, ParamVec* grad_out) {
  const int H = d.hidden;
  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> w1(w.data(), H, kMlpInputDim);
  Eigen::Map<const Eigen::VectorXd> b1(w.data() + H * kMlpInputDim, H);
  Eigen::Map<const Eigen::VectorXd> w2(w.data() + H * (kMlpInputDim + 1), H);
  const double b2 = w[mlp_param_dim(H) - 1];

  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd xb(n, kMlpInputDim);
  Eigen::VectorXd yb(n);
  for (int i = 0; i < n; ++i) {
    xb.row(i) = d.inputs.row(rows[i]);
    yb[i] = d.targets[rows[i]];
  }

  Eigen::MatrixXd z = (xb * w1.transpose()).rowwise() + b1.transpose();
  Eigen::MatrixXd a = z.array().tanh().matrix();
  Eigen::VectorXd out = (a * w2).array() + b2;
  Eigen::VectorXd r = out - yb;
  const double loss = r.squaredNorm() / n;

  if (grad_out) {
    Eigen::VectorXd dout = (2.0 / n) * r;
    Eigen::MatrixXd da = dout * w2.transpose();
    Eigen::MatrixXd dz =
        (da.array() * (1.0 - a.array().square())).matrix();
    ParamVec& g = *grad_out;
    g.resize(mlp_param_dim(H));
    Eigen::Map<RowMat> gw1(g.data(), H, kMlpInputDim);
    Eigen::Map<Eigen::VectorXd> gb1(g.data() + H * kMlpInputDim, H);
    Eigen::Map<Eigen::VectorXd> gw2(g.data() + H * (kMlpInputDim + 1), H);
    gw1 = dz.transpose() * xb;
    gb1 = dz.colwise().sum();
    gw2 = a.transpose() * dout;
    g[mlp_param_dim(H) - 1] = dout.sum();
  }
  return loss;
}

std::vector<int> all_rows(int n) {
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

}  // namespace

ObjectiveSpec make_mlp_regression(int hidden, int samples, std::uint64_t seed,
                                  int minibatch) {
  if (hidden < 1 || hidden > 64) {
    throw ConfigError("make_mlp_regression: hidden must be in [1, 64]");
  }
  if (samples < 1 || samples > 4096) {
    throw ConfigError("make_mlp_regression: samples must be in [1, 4096]");
  }

  auto d = std::make_shared<MlpData>();
  d->hidden = hidden;
  d->samples = samples;
  d->minibatch = (minibatch <= 0 || minibatch >= samples) ? 0 : minibatch;
  d->seed = seed;
  d->inputs.resize(samples, kMlpInputDim);
  d->targets.resize(samples);
  Rng rng(derive_seed(seed, "mlp-data"));
  for (int i = 0; i < samples; ++i) {
    const double u = 4.0 * rng.uniform() - 2.0;
    const double v = 4.0 * rng.uniform() - 2.0;
    d->inputs(i, 0) = u;
    d->inputs(i, 1) = v;
    d->targets[i] = std::sin(2.0 * u) * std::cos(v) + 0.1 * u;
  }

  ObjectiveSpec spec;
  spec.dim = mlp_param_dim(hidden);
  spec.eval = [d](const ParamVec& w) {
    return mlp_loss_and_grad(*d, w, all_rows(d->samples), nullptr);
  };
  spec.grad = [d](const ParamVec& w) -> ParamVec {
    ParamVec g;
    mlp_loss_and_grad(*d, w, all_rows(d->samples), &g);
    return g;
  };
  spec.stochastic_grad = [d](const ParamVec& w,
                             std::uint64_t seed_in) -> ParamVec {
    ParamVec g;
    if (d->minibatch == 0) {
      mlp_loss_and_grad(*d, w, all_rows(d->samples), &g);
      return g;
    }
    // Minibatch sampled with replacement, i.i.d. given the seed.
    Rng rng(derive_seed(d->seed, "mlp-batch", seed_in));
    std::vector<int> rows(d->minibatch);
    for (int& r : rows) r = rng.uniform_int(0, d->samples - 1);
    mlp_loss_and_grad(*d, w, rows, &g);
    return g;
  };

  // Variance bound for the minibatch oracle, estimated over a probe ball of
  // weight vectors and inflated by a safety margin. Exact per-point variance
  // comes from the full per-sample gradient spread.
  if (d->minibatch > 0) {
    double worst_var = 0.0;
    Rng probe(derive_seed(seed, "mlp-sigma"));
    for (int p = 0; p < 24; ++p) {
      ParamVec w = probe.normal_vec(spec.dim);
      ParamVec mean;
      mlp_loss_and_grad(*d, w, all_rows(samples), &mean);
      double second = 0.0;
      ParamVec gi;
      for (int i = 0; i < samples; ++i) {
        mlp_loss_and_grad(*d, w, {i}, &gi);
        second += (gi - mean).squaredNorm();
      }
      worst_var = std::max(worst_var, second / samples / d->minibatch);
    }
    spec.noise_sigma = 1.5 * std::sqrt(worst_var);
  } else {
    spec.noise_sigma = 0.0;
  }
  return spec;
}

std::size_t classify_basin(const ObjectiveSpec& obj, const ParamVec& query,
                           int descent_steps) {
  if (obj.minima_catalog.empty()) {
    throw ConfigError("classify_basin: objective has no cataloged minima");
  }
  const double step =
      obj.smoothness_L ? 1.0 / *obj.smoothness_L : 1e-2;
  ParamVec x = query;
  for (int t = 0; t < descent_steps; ++t) {
    x -= step * obj.grad(x);
  }
  std::size_t best = 0;
  double best_dist = (x - obj.minima_catalog[0].location).norm();
  for (std::size_t i = 1; i < obj.minima_catalog.size(); ++i) {
    const double dist = (x - obj.minima_catalog[i].location).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

double effective_grad_bound(const ObjectiveSpec& obj, double radius) {
  if (!obj.smoothness_L) {
    throw ConfigError("effective_grad_bound: smoothness constant unknown");
  }
  return *obj.smoothness_L * radius +
         obj.noise_sigma * std::sqrt(static_cast<double>(obj.dim));
}

}  // namespace lsam
