#include "se3grasp/guidance.hpp"

namespace sg {

namespace {
Vec3 gripper_axis(const GuidanceConfig& cfg) {
  Vec3 a = Vec3::Zero();
  a[cfg.gripper_axis_index] = 1.0;
  return a;
}
}  // namespace

double alignment(const Quat& q, const GuidanceConfig& cfg) {
  return (q.toRotationMatrix() * gripper_axis(cfg)).dot(cfg.e_app);
}

Vec3 guidance_term(const Quat& q, const GuidanceConfig& cfg) {
  if (alignment(q, cfg) >= cfg.theta_thr) return Vec3::Zero();
  // d/ds <R(q Exp(s e_i)) a, e_app>|_0 = <R_q (e_i x a), e_app>
  //                                    = <e_i, a x (R_q^T e_app)>.
  const Vec3 a = gripper_axis(cfg);
  const Vec3 back = q.toRotationMatrix().transpose() * cfg.e_app;
  return a.cross(back);
}

Vec3 apply_guidance(const Vec3& field_q, const Vec3& xi, double lambda_gd) {
  return field_q + lambda_gd * xi;
}

FieldPair cfg_mix(const FieldPair& cond, const FieldPair& uncond, double w) {
  // Affine form so w = 0 and w = 1 reproduce the inputs exactly.
  FieldPair out;
  out.p = (1.0 - w) * uncond.p + w * cond.p;
  out.q = (1.0 - w) * uncond.q + w * cond.q;
  return out;
}

}  // namespace sg
