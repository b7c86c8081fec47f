#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "se3grasp/schedule.hpp"
#include "support/oracles.hpp"

using namespace sg;

TEST_CASE("sigma and eps arithmetic") {
  NoiseSchedule s;
  CHECK(sigma_t(s, 1.0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(eps_t(s, 1.0) == doctest::Approx(2.0).epsilon(1e-15));

  double prev_sigma = 0.0, prev_eps = 0.0;
  for (double t = 0.05; t <= 1.0; t += 0.05) {
    CHECK(sigma_t(s, t) > prev_sigma);
    CHECK(eps_t(s, t) > prev_eps);
    prev_sigma = sigma_t(s, t);
    prev_eps = eps_t(s, t);
  }

  CHECK_THROWS_AS(sigma_t(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(eps_t(s, -0.5), std::invalid_argument);
}

TEST_CASE("beta shape") {
  NoiseSchedule s;
  s.alpha_p = 1.0;
  s.alpha_t = 1.0;
  CHECK(beta_x(s, 1.0, Channel::translation) ==
        doctest::Approx(0.5).epsilon(1e-15));

  // With time exponent 2 the rate at t = 1/sqrt(2) is half its t = 1 value.
  NoiseSchedule s2 = s;
  s2.alpha_t = 2.0;
  const double t = 1.0 / std::sqrt(2.0);
  CHECK(beta_x(s2, t, Channel::translation) ==
        doctest::Approx(0.5 * beta_x(s2, 1.0, Channel::translation))
            .epsilon(1e-12));
  CHECK(beta_x(s2, t, Channel::translation) == doctest::Approx(0.25));
  CHECK(beta_x(s, t, Channel::translation) ==
        doctest::Approx(0.5 * t).epsilon(1e-12));

  double prev = 0.0;
  for (double tt = 0.1; tt <= 1.0; tt += 0.1) {
    const double b = beta_x(s, tt, Channel::rotation);
    CHECK(b > prev);
    prev = b;
  }
}

TEST_CASE("perturb at vanishing t stays near the clean pose") {
  NoiseSchedule s;
  Rng rng(41);
  Pose g0 = oracle::random_pose(rng);
  for (int i = 0; i < 20; ++i) {
    PerturbSample ps = perturb(g0, 1e-6, s, rng);
    CHECK(geodesic_dist(ps.g_t, g0, 0.1) < 1e-2 * sigma_t(s, 1.0));
  }
}

TEST_CASE("perturb translation statistics at t = 1") {
  NoiseSchedule s;
  Rng rng(42);
  Pose g0;
  const int n = 100000;
  Vec3 mean = Vec3::Zero();
  Vec3 sq = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    PerturbSample ps = perturb(g0, 1.0, s, rng);
    mean += ps.dp;
    sq += ps.dp.cwiseProduct(ps.dp);
  }
  mean /= n;
  const double sigma_ref = std::sqrt(s.alpha_p);
  for (int k = 0; k < 3; ++k) {
    const double std_k = std::sqrt(sq[k] / n - mean[k] * mean[k]);
    CHECK(std::abs(mean[k]) < 0.01 * sigma_ref);
    CHECK(std::abs(std_k - sigma_ref) / sigma_ref < 0.02);
  }
}

TEST_CASE("perturb targets match finite-difference log densities") {
  NoiseSchedule s;
  Rng rng(43);
  Pose g0 = oracle::random_pose(rng);
  const double t = 0.37;
  const double sigma = sigma_t(s, t);
  const double eps = igso3_quantize_eps(eps_t(s, t));
  for (int i = 0; i < 30; ++i) {
    PerturbSample ps = perturb(g0, t, s, rng);
    // Translation: -dp/sigma^2 against the Gaussian log density.
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = 1e-6;
      const double up = -0.5 * (ps.dp + e).squaredNorm() / (sigma * sigma);
      const double dn = -0.5 * (ps.dp - e).squaredNorm() / (sigma * sigma);
      const double fd = (up - dn) / 2e-6;
      CHECK(ps.target_score_p[k] ==
            doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
    // Rotation: against the tabulated kernel's log density.
    if (log_so3(ps.dq).norm() < 0.02) continue;
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = 1e-5;
      const double up = std::log(
          igso3_density(log_so3(quat_mul(ps.dq, exp_so3(e))).norm(), eps));
      const double dn = std::log(
          igso3_density(log_so3(quat_mul(ps.dq, exp_so3(-e))).norm(), eps));
      const double fd = (up - dn) / 2e-5;
      CHECK(std::abs(ps.target_score_q[k] - fd) <
            1e-3 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("composing with the exact inverse increment recovers g0") {
  NoiseSchedule s;
  Rng rng(44);
  for (int i = 0; i < 200; ++i) {
    Pose g0 = oracle::random_pose(rng);
    PerturbSample ps = perturb(g0, rng.uniform(1e-3, 1.0), s, rng);
    Pose back = compose(ps.g_t, increment_inverse({ps.dp, ps.dq}));
    CHECK(geodesic_dist(back, g0, 1.0) < 1e-9);
  }
}

TEST_CASE("heteroskedastic score targets vs homoskedastic flow targets") {
  // Mean translational score-target norm scales as 1/sqrt(t).
  NoiseSchedule s;
  Rng rng(45);
  Pose g0;
  const int n = 20000;
  double means[3] = {0.0, 0.0, 0.0};
  const double ts[3] = {0.04, 0.16, 0.64};
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < n; ++i) {
      means[j] += perturb(g0, ts[j], s, rng).target_score_p.norm();
    }
    means[j] /= n;
  }
  // Ratios follow t^{-1/2}: quadrupling t halves the norm.
  CHECK(std::abs(means[0] / means[1] - 2.0) < 0.1);
  CHECK(std::abs(means[1] / means[2] - 2.0) < 0.1);
}
