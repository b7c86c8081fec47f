#include "se3grasp/lie.hpp"

#include <cmath>

namespace sg {

namespace {
constexpr double kTaylorAngle = 1e-6;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

Quat quat_mul(const Quat& a, const Quat& b) {
  Quat r = a * b;
  r.normalize();
  return r;
}

Quat quat_canonical(const Quat& q) {
  Quat r = q.normalized();
  if (r.w() < 0.0) r.coeffs() = -r.coeffs();
  return r;
}

Quat exp_so3(const Vec3& phi) {
  const double theta = phi.norm();
  double w, k;
  if (theta < kTaylorAngle) {
    const double t2 = theta * theta;
    w = 1.0 - t2 / 8.0;
    k = 0.5 - t2 / 48.0;
  } else {
    w = std::cos(0.5 * theta);
    k = std::sin(0.5 * theta) / theta;
  }
  Quat q(w, k * phi.x(), k * phi.y(), k * phi.z());
  q.normalize();
  return q;
}

Vec3 log_so3(const Quat& q) {
  const Quat c = quat_canonical(q);
  const Vec3 v = c.vec();
  const double vn = v.norm();
  const double w = c.w();
  if (vn < kTaylorAngle) {
    // theta ~ 2 vn / w; factor = theta / sin(theta/2) expanded around 0.
    const double f = (2.0 / w) * (1.0 - vn * vn / (3.0 * w * w));
    return f * v;
  }
  if (w == 0.0) {
    // Angle exactly pi: pick the axis whose first nonzero component is
    // positive so the result is deterministic.
    Vec3 axis = v / vn;
    for (int i = 0; i < 3; ++i) {
      if (axis[i] != 0.0) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
    return M_PI * axis;
  }
  const double theta = 2.0 * std::atan2(vn, w);
  return (theta / vn) * v;
}

Mat3 left_jacobian(const Vec3& phi) {
  const double theta = phi.norm();
  double a, b;
  if (theta < kTaylorAngle) {
    const double t2 = theta * theta;
    a = 0.5 - t2 / 24.0;
    b = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double t2 = theta * theta;
    a = (1.0 - std::cos(theta)) / t2;
    b = (theta - std::sin(theta)) / (t2 * theta);
  }
  const Mat3 s = skew(phi);
  return Mat3::Identity() + a * s + b * s * s;
}

Pose compose(const Pose& g, const Pose& dg) {
  const Vec3 phi = log_so3(dg.q);
  Pose out;
  out.p = g.p + g.q.toRotationMatrix() * (left_jacobian(phi) * dg.p);
  out.q = quat_mul(g.q, dg.q);
  return out;
}

Pose increment_inverse(const Pose& dg) {
  return {-dg.p, dg.q.conjugate()};
}

double quat_angle(const Quat& a, const Quat& b) {
  return log_so3(quat_mul(a.conjugate(), b)).norm();
}

double geodesic_dist(const Pose& a, const Pose& b, double lambda_rot) {
  return (a.p - b.p).norm() + lambda_rot * quat_angle(a.q, b.q);
}

Pose apply_global(const Pose& g_wrist, const Pose& world) {
  Pose out;
  out.p = world.p + world.q.toRotationMatrix() * g_wrist.p;
  out.q = quat_mul(world.q, g_wrist.q);
  return out;
}

Pose rigid_inverse(const Pose& g) {
  Pose out;
  out.q = g.q.conjugate();
  out.p = -(out.q.toRotationMatrix() * g.p);
  return out;
}

}  // namespace sg
