#include "se3grasp/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace sg {

namespace {
void require_time(double t) {
  if (!(t > 0.0) || t > 1.0) {
    throw std::invalid_argument("schedule: t must be in (0, 1]");
  }
}
}  // namespace

double sigma_t(const NoiseSchedule& sched, double t) {
  require_time(t);
  return std::sqrt(sched.alpha_p * t);
}

double eps_t(const NoiseSchedule& sched, double t) {
  require_time(t);
  return 0.5 * sched.alpha_q * t;
}

double beta_rate(double rate, double t, double alpha_t) {
  return 0.5 * rate * rate * std::pow(t, alpha_t);
}

double beta_x(const NoiseSchedule& sched, double t, Channel channel) {
  const double rate =
      channel == Channel::translation ? sched.alpha_p : sched.alpha_q;
  return beta_rate(rate, t, sched.alpha_t);
}

PerturbSample perturb(const Pose& g0, double t, const NoiseSchedule& sched,
                      Rng& rng) {
  PerturbSample out;
  out.t = t;
  const double sigma = sigma_t(sched, t);
  const double eps = igso3_quantize_eps(eps_t(sched, t));

  out.dp = rng.normal3(sigma);
  out.dq = igso3_sample(eps, rng);
  out.g_t = compose(g0, {out.dp, out.dq});
  out.target_score_p = gauss_score(out.dp, sigma);
  out.target_score_q = igso3_score(out.dq, eps);
  return out;
}

}  // namespace sg
