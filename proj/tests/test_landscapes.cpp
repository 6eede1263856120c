#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lsam/errors.hpp"
#include "lsam/landscapes.hpp"
#include "lsam/rng.hpp"
#include "oracles.hpp"

using namespace lsam;

namespace {

ParamVec vec2(double a, double b) {
  ParamVec v(2);
  v << a, b;
  return v;
}

// Shared oracle-backed invariants for every objective: unbiasedness of the
// stochastic gradient, the (C1) variance bound, and finite-difference
// agreement of the exact gradient.
void check_oracle_invariants(const ObjectiveSpec& obj, std::uint64_t seed,
                             double point_scale, int points = 20,
                             int draws = 10000) {
  Rng rng(derive_seed(seed, "invariant-points"));
  for (int p = 0; p < points; ++p) {
    ParamVec x = point_scale * rng.normal_vec(obj.dim);

    ParamVec g = obj.grad(x);
    ParamVec gfd = testing::fd_gradient(obj.eval, x);
    CHECK((g - gfd).norm() / std::max(gfd.norm(), 1e-12) < 1e-5);

    if (p >= 3) continue;  // Monte Carlo on a few points only, for speed
    ParamVec mean = ParamVec::Zero(obj.dim);
    double second = 0.0;
    for (int k = 0; k < draws; ++k) {
      ParamVec gs = obj.stochastic_grad(x, derive_seed(seed, "draw", k));
      mean += gs;
      second += (gs - g).squaredNorm();
    }
    mean /= draws;
    second /= draws;
    // Unbiasedness within 3 sigma / sqrt(N).
    const double tol =
        3.0 * std::max(obj.noise_sigma, 1e-12) / std::sqrt(double(draws));
    CHECK((mean - g).norm() <= tol + 1e-12);
    // Variance bound (C1), with Monte Carlo slack.
    CHECK(second <=
          obj.noise_sigma * obj.noise_sigma * (1.0 + 6.0 / std::sqrt(double(draws))) +
              1e-12);
  }
}

}  // namespace

TEST_CASE("quadratic: closed-form values") {
  ParamVec h = vec2(1.0, 1.0);
  ObjectiveSpec obj = make_quadratic(2, h, 0.0);
  CHECK(obj.eval(vec2(3.0, 4.0)) == doctest::Approx(12.5).epsilon(1e-15));

  ObjectiveSpec obj2 = make_quadratic(2, vec2(2.0, 2.0), 0.0);
  ParamVec g = obj2.grad(vec2(1.0, 0.0));
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == 0.0);
  CHECK(*obj2.smoothness_L == 2.0);
  REQUIRE(obj.minima_catalog.size() == 1);
  CHECK(obj.minima_catalog[0].location.norm() == 0.0);
  CHECK(obj.minima_catalog[0].basin == BasinLabel::kWideDeep);
}

TEST_CASE("quadratic: rejects nonpositive curvature") {
  CHECK_THROWS_AS(make_quadratic(2, vec2(1.0, 0.0), 0.0), ConfigError);
  CHECK_THROWS_AS(make_quadratic(2, vec2(-1.0, 1.0), 0.0), ConfigError);
}

TEST_CASE("quadratic: stochastic oracle second moment") {
  ObjectiveSpec obj = make_quadratic(2, vec2(1.0, 1.0), 0.5);
  ParamVec x = vec2(0.3, -0.7);
  ParamVec g = obj.grad(x);
  const int n = 100000;
  double second = 0.0;
  for (int k = 0; k < n; ++k) {
    second += (obj.stochastic_grad(x, derive_seed(5, "mc", k)) - g).squaredNorm();
  }
  second /= n;
  // sigma^2 = 0.25; chi-square MC tolerance.
  CHECK(second == doctest::Approx(0.25).epsilon(0.03));
}

TEST_CASE("quadratic: oracle invariants") {
  check_oracle_invariants(make_quadratic(2, vec2(1.0, 3.0), 0.5), 11, 2.0);
}

TEST_CASE("quadratic: gradient descent with eta < 2/L descends monotonically") {
  ObjectiveSpec obj = make_quadratic(2, vec2(1.0, 3.0), 0.0);
  ParamVec x = vec2(2.0, -1.5);
  const double eta = 1.9 / *obj.smoothness_L;
  double prev = obj.eval(x);
  for (int t = 0; t < 200; ++t) {
    x -= eta * obj.grad(x);
    const double cur = obj.eval(x);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
  CHECK(x.norm() < 1e-3);
}

TEST_CASE("double well: minima and gradient") {
  ObjectiveSpec obj = make_double_well(0.0);
  ParamVec x(1);
  x[0] = 1.0;
  CHECK(obj.eval(x) == 0.0);
  CHECK(obj.grad(x)[0] == 0.0);
  x[0] = 0.0;
  CHECK(obj.eval(x) == 1.0);
  check_oracle_invariants(make_double_well(0.3), 13, 1.5);
}

TEST_CASE("basin landscape: exactly three minima, one per label") {
  ObjectiveSpec obj = make_basin_landscape(0, 0.0);
  REQUIRE(obj.minima_catalog.size() == 3);

  bool seen[3] = {false, false, false};
  for (const Minimum& m : obj.minima_catalog) {
    seen[static_cast<int>(m.basin)] = true;
    // Cataloged minima are polished to near-zero gradient.
    CHECK(obj.grad(m.location).norm() < 1e-6);
  }
  CHECK(seen[0]);
  CHECK(seen[1]);
  CHECK(seen[2]);

  // Grid search oracle: count strict local minima of the landscape on a
  // dense grid over [-5, 5]^2 and check their values' ordering.
  const int n = 501;
  const double h = 10.0 / (n - 1);
  std::vector<double> f(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ParamVec p = vec2(-5.0 + i * h, -5.0 + j * h);
      f[i * n + j] = obj.eval(p);
    }
  }
  int count = 0;
  for (int i = 1; i < n - 1; ++i) {
    for (int j = 1; j < n - 1; ++j) {
      const double c = f[i * n + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (f[(i + di) * n + (j + dj)] <= c) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) ++count;
    }
  }
  CHECK(count == 3);

  double f_by_label[3];
  for (const Minimum& m : obj.minima_catalog) {
    f_by_label[static_cast<int>(m.basin)] = obj.eval(m.location);
  }
  CHECK(f_by_label[static_cast<int>(BasinLabel::kWideDeep)] <
        f_by_label[static_cast<int>(BasinLabel::kWideShallow)]);
}

TEST_CASE("basin landscape: smoothness constant dominates sampled Hessians") {
  ObjectiveSpec obj = make_basin_landscape(0, 0.0);
  REQUIRE(obj.smoothness_L.has_value());
  // Gradient Lipschitz check along random segments.
  Rng rng(derive_seed(3, "lipschitz"));
  for (int k = 0; k < 200; ++k) {
    ParamVec a = 4.0 * rng.normal_vec(2);
    ParamVec b = a + 0.1 * rng.normal_vec(2);
    const double lhs = (obj.grad(a) - obj.grad(b)).norm();
    CHECK(lhs <= *obj.smoothness_L * (a - b).norm() * (1.0 + 1e-6));
  }
}

TEST_CASE("basin landscape: classification is deterministic and sane") {
  ObjectiveSpec obj = make_basin_landscape(7, 0.0);
  for (std::size_t i = 0; i < obj.minima_catalog.size(); ++i) {
    // A point near each minimum classifies to it.
    ParamVec q = obj.minima_catalog[i].location + vec2(0.05, -0.03);
    CHECK(classify_basin(obj, q) == i);
    CHECK(classify_basin(obj, q) == classify_basin(obj, q));
  }
}

TEST_CASE("basin landscape: oracle invariants") {
  check_oracle_invariants(make_basin_landscape(1, 0.5), 17, 3.0);
}

TEST_CASE("mlp: desk-scale limits enforced") {
  CHECK_THROWS_AS(make_mlp_regression(65, 100, 0), ConfigError);
  CHECK_THROWS_AS(make_mlp_regression(8, 5000, 0), ConfigError);
}

TEST_CASE("mlp: gradient matches finite differences") {
  ObjectiveSpec obj = make_mlp_regression(8, 64, 21, 16);
  Rng rng(derive_seed(23, "mlp-points"));
  for (int p = 0; p < 20; ++p) {
    ParamVec w = rng.normal_vec(obj.dim);
    ParamVec g = obj.grad(w);
    ParamVec gfd = testing::fd_gradient(obj.eval, w);
    CHECK((g - gfd).norm() / std::max(gfd.norm(), 1e-12) < 1e-5);
  }
}

TEST_CASE("mlp: full-batch stochastic gradient equals the exact gradient") {
  ObjectiveSpec obj = make_mlp_regression(8, 64, 21, 0);
  Rng rng(derive_seed(29, "mlp-full"));
  ParamVec w = rng.normal_vec(obj.dim);
  ParamVec g = obj.grad(w);
  ParamVec gs = obj.stochastic_grad(w, 123);
  CHECK((g - gs).norm() == 0.0);
  CHECK(obj.noise_sigma == 0.0);
}

TEST_CASE("mlp: loss at zero weights equals mean squared target norm") {
  const int samples = 64;
  ObjectiveSpec obj = make_mlp_regression(8, samples, 21, 0);
  // Recompute the targets from the generator contract: the dataset is a
  // deterministic function of the seed, so probing the network at zero
  // weights must reproduce the mean squared target.
  ParamVec zero = ParamVec::Zero(obj.dim);
  const double loss0 = obj.eval(zero);

  // Independent derivation: with all weights zero the prediction is zero,
  // so the loss is the mean of y_i^2. Recover y_i^2 by probing eval with
  // only the output bias set: loss(b2) = mean((b2 - y_i)^2) is a parabola
  // whose coefficients identify mean(y) and mean(y^2).
  ParamVec b2_only = ParamVec::Zero(obj.dim);
  b2_only[obj.dim - 1] = 1.0;
  const double loss1 = obj.eval(b2_only);
  b2_only[obj.dim - 1] = -1.0;
  const double lossm1 = obj.eval(b2_only);
  // loss(b) = b^2 - 2 b mean(y) + mean(y^2)
  const double mean_y_sq = (loss1 + lossm1) / 2.0 - 1.0;
  CHECK(loss0 == doctest::Approx(mean_y_sq).epsilon(1e-12));
}

TEST_CASE("mlp: minibatch oracle invariants") {
  check_oracle_invariants(make_mlp_regression(6, 48, 31, 12), 37, 1.0, 6,
                          20000);
}

TEST_CASE("effective grad bound") {
  ObjectiveSpec obj = make_quadratic(2, vec2(1.0, 2.0), 0.5);
  CHECK(effective_grad_bound(obj, 3.0) ==
        doctest::Approx(2.0 * 3.0 + 0.5 * std::sqrt(2.0)));
}
