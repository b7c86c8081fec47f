#pragma once

#include <utility>
#include <vector>

#include "se3grasp/field.hpp"
#include "se3grasp/schedule.hpp"

namespace sg {

// One conditional flow pair: prior draw, data pose, interpolation point, and
// the constant geodesic targets of the decoupled product-manifold bridge.
struct FlowPair {
  Pose g0;
  Pose g1;
  Pose g_t;
  double t = 0.0;
  Vec3 dp = Vec3::Zero();    // R_{q0}^T (p1 - p0)
  Vec3 dphi = Vec3::Zero();  // Log(q0^{-1} q1)
};

// Decoupled geodesic targets between two poses.
std::pair<Vec3, Vec3> flow_targets(const Pose& g0, const Pose& g1);

// Closed-form bridge point: p0 + t R_{q0} dp, q0 (x) Exp(t dphi).
Pose path_point(const Pose& g0, const Vec3& dp, const Vec3& dphi, double t);

// Draw the prior at the t=1 concentrations, pick t ~ U(0,1), and build the
// interpolation point with its targets.
FlowPair flow_training_pair(const Pose& g1, const NoiseSchedule& sched,
                            Rng& rng);

// Translational regression target expressed in the frame of the bridge point
// (the sampler rotates predictions by the current orientation, so training
// states the target the same way).
Vec3 flow_translation_target(const FlowPair& pair);

enum class OdeSolver { euler, rk4 };

struct FlowSamplerConfig {
  int steps = 40;
  OdeSolver solver = OdeSolver::euler;
  NoiseSchedule schedule;
  double cfg_weight = 1.0;
};

// Advance the given states over t in [0, 1] under the velocity field.
void integrate_flow(const BatchFieldFn& velocity_field,
                    std::vector<Pose>* states, int steps, OdeSolver solver);

// Integrate the learned velocity field from the prior over t in [0, 1].
// Each trajectory owns an rng stream; results are batching-invariant.
std::vector<Pose> sample_flow(const BatchFieldFn& velocity_field, int n,
                              const FlowSamplerConfig& cfg, Rng& rng);

}  // namespace sg
