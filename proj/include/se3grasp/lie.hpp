#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
// Scalar-first (w, x, y, z) unit quaternion. Every operation below returns a
// renormalized value; serialization canonicalizes the double cover to w >= 0.
using Quat = Eigen::Quaterniond;

// Rigid pose: position in meters plus unit orientation quaternion.
struct Pose {
  Vec3 p{0.0, 0.0, 0.0};
  Quat q{1.0, 0.0, 0.0, 0.0};

  static Pose identity() { return {}; }
};

Mat3 skew(const Vec3& v);

// Hamilton product, renormalized.
Quat quat_mul(const Quat& a, const Quat& b);

// Canonical representative of the double cover: w >= 0, unit norm.
Quat quat_canonical(const Quat& q);

// Exp: so(3) -> SO(3) as a quaternion; Taylor branch below 1e-6 rad.
Quat exp_so3(const Vec3& phi);

// Log: SO(3) -> so(3), returned angle in [0, pi]. At exactly pi the axis sign
// is fixed so its first nonzero component is positive.
Vec3 log_so3(const Quat& q);

// Left Jacobian of SO(3); Taylor branch below 1e-6 rad.
Mat3 left_jacobian(const Vec3& phi);

// Body-frame increment product: dg = (dp, dq) is applied as the exponential
// twist (dp in the Jacobian-coupled translation sense),
//   p' = p + R_q J(Log dq) dp,   q' = q (x) dq.
Pose compose(const Pose& g, const Pose& dg);

// Inverse of an increment under `compose`: compose(compose(g, dg),
// increment_inverse(dg)) == g.
Pose increment_inverse(const Pose& dg);

// Weighted SE(3) geodesic distance in meters: ||pa - pb|| +
// lambda_rot * angle(qa, qb), lambda_rot in m/rad.
double geodesic_dist(const Pose& a, const Pose& b, double lambda_rot);

// Plain rigid frame change: returns world o g (no Jacobian coupling).
Pose apply_global(const Pose& g_wrist, const Pose& world);

// Inverse under the plain rigid product (apply_global(g, rigid_inverse(g))
// is the identity).
Pose rigid_inverse(const Pose& g);

// Rotation angle between two unit quaternions, in [0, pi].
double quat_angle(const Quat& a, const Quat& b);

}  // namespace sg
