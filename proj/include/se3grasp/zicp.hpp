#pragma once

#include <vector>

#include "se3grasp/lie.hpp"

namespace sg {

// Ray-constrained ICP: the only degree of freedom is a scalar offset of the
// source cloud along a fixed ray direction.
struct ZIcpConfig {
  double max_offset = 0.2;      // |s| bound in meters
  double reject_dist = 0.05;    // correspondence rejection radius
  int max_iters = 20;
  double tol = 1e-5;            // convergence threshold on the offset step
};

struct ZIcpResult {
  double offset = 0.0;
  double rms_before = 0.0;
  double rms_after = 0.0;
  bool flagged = false;  // no usable correspondences; offset left at zero
  int iters = 0;
};

// Alternate nearest-neighbor correspondences (grid-hash lookup) with the
// closed-form 1-D least-squares update s = mean <q_i - p_i, ray>.
ZIcpResult z_only_icp(const std::vector<Vec3>& source,
                      const std::vector<Vec3>& target, const Vec3& ray_dir,
                      const ZIcpConfig& cfg = {});

}  // namespace sg
