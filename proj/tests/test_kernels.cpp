#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lsam/conditional_sampler.hpp"
#include "lsam/errors.hpp"
#include "lsam/kernels.hpp"
#include "lsam/rng.hpp"
#include "oracles.hpp"

using namespace lsam;

namespace {

ParamVec vec1(double a) {
  ParamVec v(1);
  v << a;
  return v;
}

ParamVec fd_grad_phi(const KernelSpec& k, const ParamVec& z, double h = 1e-6) {
  ParamVec g(z.size());
  ParamVec p = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    p[i] = zi + h;
    const double fp = k.phi(p);
    p[i] = zi - h;
    const double fm = k.phi(p);
    p[i] = zi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("gaussian kernel: basic values") {
  KernelSpec k = gaussian_kernel(1.0, 1);
  CHECK(k.phi(ParamVec::Zero(1)) == 0.0);
  CHECK(k.tail_class == TailClass::kPolyExpGrowth);
  REQUIRE(k.normalizer_Z.has_value());
  CHECK(*k.normalizer_Z ==
        doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));

  // Quadrature of exp(-phi) over [-10, 10] agrees with the closed form.
  const double quad = testing::trapezoid_1d(
      [&](double z) { return std::exp(-k.phi(vec1(z))); }, -10.0, 10.0, 4001);
  CHECK(std::abs(quad - *k.normalizer_Z) < 1e-8);
}

TEST_CASE("gaussian kernel: gradient matches finite differences") {
  KernelSpec k = gaussian_kernel(0.7, 2);
  Rng rng(derive_seed(7, "gk"));
  for (int i = 0; i < 50; ++i) {
    ParamVec z = 2.0 * rng.normal_vec(2);
    ParamVec g = k.grad_phi(z);
    ParamVec gfd = fd_grad_phi(k, z);
    CHECK((g - gfd).norm() / std::max(gfd.norm(), 1e-12) < 1e-6);
  }
}

TEST_CASE("exp-power kernel: alpha = 2 reduces to the Gaussian pointwise") {
  const double s = 0.8;
  KernelSpec g = gaussian_kernel(s, 1);
  KernelSpec e = exp_power_kernel(1.0 / (2.0 * s * s), 2.0, 1);
  Rng rng(derive_seed(9, "ep"));
  for (int i = 0; i < 100; ++i) {
    ParamVec z = 3.0 * rng.normal_vec(1);
    CHECK(e.phi(z) == doctest::Approx(g.phi(z)).epsilon(1e-14));
    CHECK(e.grad_phi(z)[0] == doctest::Approx(g.grad_phi(z)[0]).epsilon(1e-12));
  }
}

TEST_CASE("exp-power kernel: Laplace integral") {
  // The kink at zero limits trapezoid accuracy to O(h^2); h = 1.25e-4 gives
  // a few 1e-9 of error against the exact value 2.
  KernelSpec k = exp_power_kernel(1.0, 1.0, 1);
  const double logz = kernel_log_normalizer(k, 1, 25.0, 400001);
  CHECK(std::abs(std::exp(logz) - 2.0) < 1e-8);
}

TEST_CASE("exp-power kernel: gradient matches finite differences away from 0") {
  KernelSpec k = exp_power_kernel(0.5, 1.5, 2);
  Rng rng(derive_seed(11, "epg"));
  for (int i = 0; i < 50; ++i) {
    ParamVec z = rng.normal_vec(2);
    if (z.norm() < 0.1) continue;
    ParamVec g = k.grad_phi(z);
    ParamVec gfd = fd_grad_phi(k, z);
    CHECK((g - gfd).norm() / std::max(gfd.norm(), 1e-12) < 1e-6);
  }
}

TEST_CASE("exp-power kernel: invalid shape parameters rejected") {
  CHECK_THROWS_AS(exp_power_kernel(1.0, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(exp_power_kernel(1.0, -1.0, 1), ConfigError);
  CHECK_THROWS_AS(exp_power_kernel(0.0, 2.0, 1), ConfigError);
}

TEST_CASE("inadmissible sub-logarithmic kernel is rejected by tail gating") {
  // phi(z) = log(1 + |z|): exp(-phi) = 1/(1+|z|) is not integrable.
  KernelSpec bad;
  bad.phi = [](const ParamVec& z) { return std::log1p(z.norm()); };
  bad.grad_phi = [](const ParamVec& z) -> ParamVec {
    const double r = z.norm();
    if (r == 0.0) return ParamVec::Zero(z.size());
    return ParamVec(z / (r * (1.0 + r)));
  };
  bad.tail_class = TailClass::kNone;

  ObjectiveSpec obj = make_quadratic(1, vec1(1.0), 0.0);
  SamParams p{0.0, 1e-8};
  auto grid = QuadratureGrid::uniform_1d(-10.0, 10.0, 1001);
  CHECK_THROWS_AS(lsam_density_quadrature(obj, p, bad, vec1(0.0), grid),
                  ConfigError);
  ConditionalSamplerConfig cfg;
  cfg.chain_len = 10;
  CHECK_THROWS_AS(sample_conditional(obj, p, bad, vec1(0.0), cfg),
                  ConfigError);
}

TEST_CASE("quadrature grids validate their shape") {
  CHECK_THROWS_AS(QuadratureGrid::uniform_1d(-1.0, 1.0, 100).validate(1),
                  ConfigError);  // even point count
  CHECK_THROWS_AS(QuadratureGrid::uniform_1d(1.0, -1.0, 101).validate(1),
                  ConfigError);
  CHECK_THROWS_AS(QuadratureGrid::uniform_1d(-1.0, 1.0, 101).validate(2),
                  ConfigError);
}
