#include "se3grasp/zicp.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace sg {

namespace {

// Uniform grid hash over the target cloud; cell size equals the rejection
// radius so a 27-cell probe covers every admissible neighbor.
class GridIndex {
 public:
  GridIndex(const std::vector<Vec3>& points, double cell)
      : points_(points), cell_(cell) {
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      cells_[key(points[i])].push_back(static_cast<int>(i));
    }
  }

  // Index of the nearest point within `radius`, or -1.
  int nearest(const Vec3& query, double radius) const {
    const std::int64_t cx = coord(query.x());
    const std::int64_t cy = coord(query.y());
    const std::int64_t cz = coord(query.z());
    int best = -1;
    double best_d2 = radius * radius;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
          if (it == cells_.end()) continue;
          for (int idx : it->second) {
            const double d2 = (points_[idx] - query).squaredNorm();
            if (d2 < best_d2) {
              best_d2 = d2;
              best = idx;
            }
          }
        }
    return best;
  }

 private:
  std::int64_t coord(double v) const {
    return static_cast<std::int64_t>(std::floor(v / cell_));
  }
  static std::uint64_t pack(std::int64_t x, std::int64_t y, std::int64_t z) {
    const std::uint64_t a = static_cast<std::uint64_t>(x) * 73856093ULL;
    const std::uint64_t b = static_cast<std::uint64_t>(y) * 19349669ULL;
    const std::uint64_t c = static_cast<std::uint64_t>(z) * 83492791ULL;
    return a ^ b ^ c;
  }
  std::uint64_t key(const Vec3& p) const {
    return pack(coord(p.x()), coord(p.y()), coord(p.z()));
  }

  const std::vector<Vec3>& points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

double rms_at(const std::vector<Vec3>& source, const GridIndex& index,
              const std::vector<Vec3>& target, const Vec3& dir, double s,
              double reject) {
  double acc = 0.0;
  int count = 0;
  for (const Vec3& p : source) {
    const int j = index.nearest(p + s * dir, reject);
    if (j < 0) continue;
    acc += (target[j] - (p + s * dir)).squaredNorm();
    ++count;
  }
  return count > 0 ? std::sqrt(acc / count) : 0.0;
}

}  // namespace

ZIcpResult z_only_icp(const std::vector<Vec3>& source,
                      const std::vector<Vec3>& target, const Vec3& ray_dir,
                      const ZIcpConfig& cfg) {
  if (source.empty() || target.empty()) {
    throw std::invalid_argument("z_only_icp: empty cloud");
  }
  if (std::abs(ray_dir.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("z_only_icp: ray_dir must be unit length");
  }

  const GridIndex index(target, cfg.reject_dist);
  ZIcpResult res;
  res.rms_before = rms_at(source, index, target, ray_dir, 0.0,
                          cfg.reject_dist);

  double s = 0.0;
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iters = it + 1;
    double acc = 0.0;
    int count = 0;
    for (const Vec3& p : source) {
      const Vec3 moved = p + s * ray_dir;
      const int j = index.nearest(moved, cfg.reject_dist);
      if (j < 0) continue;
      acc += (target[j] - p).dot(ray_dir);
      ++count;
    }
    if (count == 0) {
      res.flagged = true;
      res.offset = 0.0;
      res.rms_after = res.rms_before;
      return res;
    }
    double s_new = acc / count;
    s_new = std::clamp(s_new, -cfg.max_offset, cfg.max_offset);
    const double step = std::abs(s_new - s);
    s = s_new;
    if (step < cfg.tol) break;
  }
  res.offset = s;
  res.rms_after = rms_at(source, index, target, ray_dir, s, cfg.reject_dist);
  return res;
}

}  // namespace sg
