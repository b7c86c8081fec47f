#include "se3grasp/diff.hpp"

#include <cmath>
#include <stdexcept>

namespace sg {

namespace {
// Contraction budget of the annealing dynamics: with beta(t) = 0.5 r^2 t and
// level variance alpha t, the drift shrinks the residual by
// exp(-r^2 / (2 alpha)). A budget of 6 keeps the endpoint residual below the
// t_min noise floor.
constexpr double kContraction = 6.0;
}  // namespace

double derived_beta_rate_p(const SdeSamplerConfig& cfg) {
  if (cfg.beta_rate_p > 0.0) return cfg.beta_rate_p;
  return std::sqrt(2.0 * kContraction * cfg.schedule.alpha_p);
}

double derived_beta_rate_q(const SdeSamplerConfig& cfg) {
  if (cfg.beta_rate_q > 0.0) return cfg.beta_rate_q;
  return std::sqrt(2.0 * kContraction * cfg.schedule.alpha_q);
}

PerturbSample score_training_pair(const Pose& g1, const NoiseSchedule& sched,
                                  Rng& rng) {
  return perturb(g1, rng.uniform(1e-3, 1.0), sched, rng);
}

std::vector<Pose> sample_reverse_sde(const BatchFieldFn& score_field, int n,
                                     const SdeSamplerConfig& cfg, Rng& rng) {
  if (cfg.steps < 1) throw std::invalid_argument("sde sampler: steps < 1");
  const NoiseSchedule& sched = cfg.schedule;
  const double rate_p = derived_beta_rate_p(cfg);
  const double rate_q = derived_beta_rate_q(cfg);

  std::vector<Pose> g(n);
  std::vector<Rng> streams;
  streams.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng s = rng.fork(i);
    g[i].p = s.normal3(sigma_t(sched, 1.0));
    g[i].q = igso3_sample(eps_t(sched, 1.0), s);
    streams.push_back(s);
  }

  const double dt = (1.0 - cfg.t_min) / cfg.steps;
  Eigen::MatrixXd sp, sq;
  for (int k = 0; k < cfg.steps; ++k) {
    const double t = 1.0 - k * dt;
    score_field(g, t, &sp, &sq);
    if (!sp.allFinite() || !sq.allFinite()) {
      throw std::runtime_error("sde sampler: non-finite score at t=" +
                               std::to_string(t));
    }
    const double bp = beta_rate(rate_p, t, sched.alpha_t);
    const double bq = beta_rate(rate_q, t, sched.alpha_t);
    const double np = cfg.stochasticity_scale * std::sqrt(2.0 * bp * dt);
    const double nq = cfg.stochasticity_scale * std::sqrt(2.0 * bq * dt);
    for (int i = 0; i < n; ++i) {
      const Vec3 dx_p =
          bp * dt * Vec3(sp.row(i).transpose()) + np * streams[i].normal3();
      const Vec3 dx_q =
          bq * dt * Vec3(sq.row(i).transpose()) + nq * streams[i].normal3();
      g[i] = compose(g[i], {dx_p, exp_so3(dx_q)});
    }
  }

  if (cfg.final_denoise) {
    score_field(g, cfg.t_min, &sp, &sq);
    if (!sp.allFinite() || !sq.allFinite()) {
      throw std::runtime_error("sde sampler: non-finite score at t_min");
    }
    const double bp = beta_rate(rate_p, cfg.t_min, sched.alpha_t);
    const double bq = beta_rate(rate_q, cfg.t_min, sched.alpha_t);
    for (int i = 0; i < n; ++i) {
      const Vec3 dx_p = bp * dt * Vec3(sp.row(i).transpose());
      const Vec3 dx_q = bq * dt * Vec3(sq.row(i).transpose());
      g[i] = compose(g[i], {dx_p, exp_so3(dx_q)});
    }
  }
  return g;
}

}  // namespace sg
