#pragma once

#include "se3grasp/lie.hpp"

namespace sg {

// Palm-axis alignment guidance on the rotational field.
struct GuidanceConfig {
  Vec3 e_app{0.0, 1.0, 0.0};   // approach direction in the wrist frame
  double theta_thr = 0.8;      // cosine gate: guide only when c < theta_thr
  double lambda_gd = 1e-3;
  int gripper_axis_index = 1;  // body axis of the grasp frame to align
  bool enabled = false;
};

// Cosine similarity between the rotated gripper axis and e_app.
double alignment(const Quat& q, const GuidanceConfig& cfg);

// Left-trivialized gradient of the alignment, hard-gated to zero on
// {c >= theta_thr}.
Vec3 guidance_term(const Quat& q, const GuidanceConfig& cfg);

// field + lambda * xi.
Vec3 apply_guidance(const Vec3& field_q, const Vec3& xi, double lambda_gd);

// Classifier-free guidance: uncond + w (cond - uncond), per channel.
struct FieldPair {
  Vec3 p = Vec3::Zero();
  Vec3 q = Vec3::Zero();
};
FieldPair cfg_mix(const FieldPair& cond, const FieldPair& uncond, double w);

}  // namespace sg
