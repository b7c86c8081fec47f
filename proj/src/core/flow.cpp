#include "se3grasp/flow.hpp"

#include <cmath>
#include <stdexcept>

namespace sg {

std::pair<Vec3, Vec3> flow_targets(const Pose& g0, const Pose& g1) {
  const Mat3 r0t = g0.q.toRotationMatrix().transpose();
  return {r0t * (g1.p - g0.p), log_so3(quat_mul(g0.q.conjugate(), g1.q))};
}

Pose path_point(const Pose& g0, const Vec3& dp, const Vec3& dphi, double t) {
  Pose g;
  g.p = g0.p + t * (g0.q.toRotationMatrix() * dp);
  g.q = quat_mul(g0.q, exp_so3(t * dphi));
  return g;
}

FlowPair flow_training_pair(const Pose& g1, const NoiseSchedule& sched,
                            Rng& rng) {
  FlowPair pair;
  pair.g1 = g1;
  pair.g0.p = rng.normal3(std::sqrt(sched.alpha_p));
  pair.g0.q = igso3_sample(0.5 * sched.alpha_q, rng);
  pair.t = rng.uniform();
  std::tie(pair.dp, pair.dphi) = flow_targets(pair.g0, pair.g1);
  pair.g_t = path_point(pair.g0, pair.dp, pair.dphi, pair.t);
  return pair;
}

Vec3 flow_translation_target(const FlowPair& pair) {
  return pair.g_t.q.toRotationMatrix().transpose() * (pair.g1.p - pair.g0.p);
}

namespace {

void check_finite(const Eigen::MatrixXd& fp, const Eigen::MatrixXd& fq,
                  double t) {
  if (!fp.allFinite() || !fq.allFinite()) {
    throw std::runtime_error("flow sampler: non-finite field at t=" +
                             std::to_string(t));
  }
}

void euler_steps(const BatchFieldFn& field, std::vector<Pose>* g, int steps) {
  const int n = static_cast<int>(g->size());
  const double dt = 1.0 / steps;
  Eigen::MatrixXd fp, fq;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    field(*g, t, &fp, &fq);
    check_finite(fp, fq, t);
    for (int i = 0; i < n; ++i) {
      Pose& gi = (*g)[i];
      gi.p += dt * (gi.q.toRotationMatrix() * Vec3(fp.row(i).transpose()));
      gi.q = quat_mul(gi.q, exp_so3(dt * Vec3(fq.row(i).transpose())));
    }
  }
}

// Product-manifold RK4: classical stages for the position in world frame,
// Munthe-Kaas stages for the orientation. sigma tracks the accumulated body
// rotation of each stage; the dexpinv correction for right increments is
// k + [sigma, k]/2 + [sigma, [sigma, k]]/12.
void rk4_steps(const BatchFieldFn& field, std::vector<Pose>* g, int steps) {
  const int n = static_cast<int>(g->size());
  const double dt = 1.0 / steps;
  Eigen::MatrixXd fp, fq;

  std::vector<Pose> stage(n);
  std::vector<Vec3> vp1(n), vp2(n), vp3(n), vp4(n);
  std::vector<Vec3> k1(n), k2(n), k3(n), k4(n), sig(n);

  auto correct = [](const Vec3& sigma, const Vec3& k) {
    const Vec3 c1 = sigma.cross(k);
    return Vec3(k + 0.5 * c1 + sigma.cross(c1) / 12.0);
  };

  for (int s = 0; s < steps; ++s) {
    const double t = s * dt;
    std::vector<Pose>& base = *g;

    field(base, t, &fp, &fq);
    check_finite(fp, fq, t);
    for (int i = 0; i < n; ++i) {
      vp1[i] = base[i].q.toRotationMatrix() * Vec3(fp.row(i).transpose());
      k1[i] = fq.row(i).transpose();
      sig[i] = 0.5 * dt * k1[i];
      stage[i].p = base[i].p + 0.5 * dt * vp1[i];
      stage[i].q = quat_mul(base[i].q, exp_so3(sig[i]));
    }

    field(stage, t + 0.5 * dt, &fp, &fq);
    check_finite(fp, fq, t);
    for (int i = 0; i < n; ++i) {
      vp2[i] = stage[i].q.toRotationMatrix() * Vec3(fp.row(i).transpose());
      k2[i] = correct(sig[i], fq.row(i).transpose());
      sig[i] = 0.5 * dt * k2[i];
      stage[i].p = base[i].p + 0.5 * dt * vp2[i];
      stage[i].q = quat_mul(base[i].q, exp_so3(sig[i]));
    }

    field(stage, t + 0.5 * dt, &fp, &fq);
    check_finite(fp, fq, t);
    for (int i = 0; i < n; ++i) {
      vp3[i] = stage[i].q.toRotationMatrix() * Vec3(fp.row(i).transpose());
      k3[i] = correct(sig[i], fq.row(i).transpose());
      sig[i] = dt * k3[i];
      stage[i].p = base[i].p + dt * vp3[i];
      stage[i].q = quat_mul(base[i].q, exp_so3(sig[i]));
    }

    field(stage, t + dt, &fp, &fq);
    check_finite(fp, fq, t);
    for (int i = 0; i < n; ++i) {
      vp4[i] = stage[i].q.toRotationMatrix() * Vec3(fp.row(i).transpose());
      k4[i] = correct(sig[i], fq.row(i).transpose());

      base[i].p += dt / 6.0 * (vp1[i] + 2.0 * vp2[i] + 2.0 * vp3[i] + vp4[i]);
      const Vec3 sigma =
          dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      base[i].q = quat_mul(base[i].q, exp_so3(sigma));
    }
  }
}

}  // namespace

void integrate_flow(const BatchFieldFn& velocity_field,
                    std::vector<Pose>* states, int steps, OdeSolver solver) {
  if (steps < 1) throw std::invalid_argument("flow sampler: steps < 1");
  if (solver == OdeSolver::euler) {
    euler_steps(velocity_field, states, steps);
  } else {
    rk4_steps(velocity_field, states, steps);
  }
}

std::vector<Pose> sample_flow(const BatchFieldFn& velocity_field, int n,
                              const FlowSamplerConfig& cfg, Rng& rng) {
  std::vector<Pose> g(n);
  for (int i = 0; i < n; ++i) {
    Rng s = rng.fork(i);
    g[i].p = s.normal3(std::sqrt(cfg.schedule.alpha_p));
    g[i].q = igso3_sample(0.5 * cfg.schedule.alpha_q, s);
  }
  integrate_flow(velocity_field, &g, cfg.steps, cfg.solver);
  return g;
}

}  // namespace sg
