#pragma once

#include "se3grasp/igso3.hpp"
#include "se3grasp/lie.hpp"
#include "se3grasp/rng.hpp"

namespace sg {

// Variance-exploding noise schedule shared by both generator branches.
// sigma_t^2 = alpha_p * t (meters^2), eps_t = alpha_q * t / 2.
struct NoiseSchedule {
  double alpha_p = 0.09;
  double alpha_q = 4.0;
  double alpha_t = 1.0;
};

enum class Channel { translation, rotation };

// Throw for t <= 0; the score targets divide by sigma_t^2.
double sigma_t(const NoiseSchedule& sched, double t);
double eps_t(const NoiseSchedule& sched, double t);

// Sampler drift rate shape: 0.5 * rate^2 * t^alpha_t, where `rate` is the
// schedule concentration of the requested channel.
double beta_x(const NoiseSchedule& sched, double t, Channel channel);
double beta_rate(double rate, double t, double alpha_t);

// One forward-perturbed training sample: the noised pose, the drawn body
// increments, and the closed-form score targets evaluated at them.
struct PerturbSample {
  Pose g_t;
  double t = 0.0;
  Vec3 target_score_p = Vec3::Zero();
  Vec3 target_score_q = Vec3::Zero();
  Vec3 dp = Vec3::Zero();
  Quat dq = Quat::Identity();
};

// Draw dp ~ N(0, sigma_t^2 I) and dq ~ IGSO3(eps_t), diffuse g0 by the body
// increment, and attach score targets. eps_t is snapped to the shared table
// bins so sampling and scoring use the identical concentration.
PerturbSample perturb(const Pose& g0, double t, const NoiseSchedule& sched,
                      Rng& rng);

}  // namespace sg
