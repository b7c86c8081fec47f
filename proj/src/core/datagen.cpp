#include "se3grasp/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "se3grasp/util.hpp"

namespace sg {

std::string to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::box: return "box";
    case PrimitiveKind::cylinder: return "cylinder";
    case PrimitiveKind::sphere: return "sphere";
  }
  return "box";
}

PrimitiveKind primitive_from_string(const std::string& s) {
  if (s == "box") return PrimitiveKind::box;
  if (s == "cylinder") return PrimitiveKind::cylinder;
  if (s == "sphere") return PrimitiveKind::sphere;
  throw std::invalid_argument("unknown primitive kind: " + s);
}

namespace {

void push_tri(TriMesh* m, int a, int b, int c) {
  m->tris.push_back({a, b, c});
}

void finalize(TriMesh* m) {
  m->normals.resize(m->tris.size());
  m->areas.resize(m->tris.size());
  m->total_area = 0.0;
  for (size_t i = 0; i < m->tris.size(); ++i) {
    const Vec3& a = m->vertices[m->tris[i][0]];
    const Vec3& b = m->vertices[m->tris[i][1]];
    const Vec3& c = m->vertices[m->tris[i][2]];
    const Vec3 cr = (b - a).cross(c - a);
    const double n = cr.norm();
    m->normals[i] = cr / n;
    m->areas[i] = 0.5 * n;
    m->total_area += m->areas[i];
  }
}

TriMesh make_box(const Vec3& d) {
  TriMesh m;
  const double x = 0.5 * d.x(), y = 0.5 * d.y(), z = 0.5 * d.z();
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) m.vertices.push_back({sx * x, sy * y, sz * z});
  // Vertex index = sx*4 + sy*2 + sz with negative => 0.
  auto idx = [](int sx, int sy, int sz) { return sx * 4 + sy * 2 + sz; };
  auto quad = [&](int a, int b, int c, int dd) {
    push_tri(&m, a, b, c);
    push_tri(&m, a, c, dd);
  };
  quad(idx(1, 0, 0), idx(1, 1, 0), idx(1, 1, 1), idx(1, 0, 1));  // +x
  quad(idx(0, 0, 0), idx(0, 0, 1), idx(0, 1, 1), idx(0, 1, 0));  // -x
  quad(idx(0, 1, 0), idx(0, 1, 1), idx(1, 1, 1), idx(1, 1, 0));  // +y
  quad(idx(0, 0, 0), idx(1, 0, 0), idx(1, 0, 1), idx(0, 0, 1));  // -y
  quad(idx(0, 0, 1), idx(1, 0, 1), idx(1, 1, 1), idx(0, 1, 1));  // +z
  quad(idx(0, 0, 0), idx(0, 1, 0), idx(1, 1, 0), idx(1, 0, 0));  // -z
  finalize(&m);
  return m;
}

TriMesh make_cylinder(double radius, double height, int segments = 48) {
  TriMesh m;
  const double hz = 0.5 * height;
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), -hz});
    m.vertices.push_back({radius * std::cos(a), radius * std::sin(a), hz});
  }
  const int bottom_center = static_cast<int>(m.vertices.size());
  m.vertices.push_back({0, 0, -hz});
  const int top_center = bottom_center + 1;
  m.vertices.push_back({0, 0, hz});
  for (int i = 0; i < segments; ++i) {
    const int j = (i + 1) % segments;
    const int b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    push_tri(&m, b0, b1, t1);
    push_tri(&m, b0, t1, t0);
    push_tri(&m, bottom_center, b1, b0);
    push_tri(&m, top_center, t0, t1);
  }
  finalize(&m);
  return m;
}

TriMesh make_icosphere(double radius, int subdivisions = 2) {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::vector<std::array<int, 3>> nf;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back(((v[a] + v[b]) * 0.5).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    for (const auto& t : f) {
      const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      nf.push_back({t[0], ab, ca});
      nf.push_back({t[1], bc, ab});
      nf.push_back({t[2], ca, bc});
      nf.push_back({ab, bc, ca});
    }
    f = std::move(nf);
  }
  TriMesh m;
  for (const auto& p : v) m.vertices.push_back(radius * p);
  m.tris = f;
  finalize(&m);
  return m;
}

}  // namespace

TriMesh make_mesh(const PrimitiveShape& shape) {
  switch (shape.kind) {
    case PrimitiveKind::box: return make_box(shape.dims);
    case PrimitiveKind::cylinder:
      return make_cylinder(shape.dims[0], shape.dims[1]);
    case PrimitiveKind::sphere: return make_icosphere(shape.dims[0]);
  }
  throw std::logic_error("make_mesh: bad kind");
}

Vec3 analytic_normal(const PrimitiveShape& shape, const Vec3& p) {
  switch (shape.kind) {
    case PrimitiveKind::sphere:
      return p.normalized();
    case PrimitiveKind::cylinder: {
      const double hz = 0.5 * shape.dims[1];
      // Nearest feature: side wall or cap.
      const double radial = std::hypot(p.x(), p.y());
      const double side_gap = std::abs(shape.dims[0] - radial);
      const double cap_gap = hz - std::abs(p.z());
      if (cap_gap < side_gap) return {0.0, 0.0, p.z() > 0 ? 1.0 : -1.0};
      return Vec3(p.x(), p.y(), 0.0).normalized();
    }
    case PrimitiveKind::box: {
      const Vec3 h = 0.5 * shape.dims;
      int best = 0;
      double best_gap = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 3; ++k) {
        const double gap = h[k] - std::abs(p[k]);
        if (gap < best_gap) {
          best_gap = gap;
          best = k;
        }
      }
      Vec3 n = Vec3::Zero();
      n[best] = p[best] > 0 ? 1.0 : -1.0;
      return n;
    }
  }
  throw std::logic_error("analytic_normal: bad kind");
}

bool raycast_exit(const TriMesh& mesh, const Vec3& origin, const Vec3& dir,
                  double t_min, RayHit* hit) {
  bool found = false;
  double best_t = t_min;
  int best_tri = -1;
  for (size_t i = 0; i < mesh.tris.size(); ++i) {
    const Vec3& v0 = mesh.vertices[mesh.tris[i][0]];
    const Vec3& v1 = mesh.vertices[mesh.tris[i][1]];
    const Vec3& v2 = mesh.vertices[mesh.tris[i][2]];
    const Vec3 e1 = v1 - v0, e2 = v2 - v0;
    const Vec3 pv = dir.cross(e2);
    const double det = e1.dot(pv);
    if (std::abs(det) < 1e-14) continue;
    const double inv = 1.0 / det;
    const Vec3 tv = origin - v0;
    const double u = tv.dot(pv) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) continue;
    const Vec3 qv = tv.cross(e1);
    const double v = dir.dot(qv) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) continue;
    const double t = e2.dot(qv) * inv;
    if (t > best_t || (t == best_t && static_cast<int>(i) < best_tri)) {
      best_t = t;
      best_tri = static_cast<int>(i);
      found = true;
    }
  }
  if (found && hit) {
    hit->t = best_t;
    hit->point = origin + best_t * dir;
    hit->normal = mesh.normals[best_tri];
    hit->tri = best_tri;
  }
  return found;
}

bool analytic_raycast_exit(const PrimitiveShape& shape, const Vec3& origin,
                           const Vec3& dir, double t_min, RayHit* hit) {
  double best_t = -1.0;
  Vec3 normal = Vec3::Zero();
  switch (shape.kind) {
    case PrimitiveKind::sphere: {
      const double r = shape.dims[0];
      const double b = origin.dot(dir);
      const double c = origin.squaredNorm() - r * r;
      const double disc = b * b - c;
      if (disc < 0) return false;
      const double t = -b + std::sqrt(disc);
      if (t > t_min) {
        best_t = t;
        normal = (origin + t * dir).normalized();
      }
      break;
    }
    case PrimitiveKind::box: {
      const Vec3 h = 0.5 * shape.dims;
      for (int k = 0; k < 3; ++k) {
        for (int s : {-1, 1}) {
          if (std::abs(dir[k]) < 1e-14) continue;
          const double t = (s * h[k] - origin[k]) / dir[k];
          if (t <= t_min || t <= best_t) continue;
          const Vec3 p = origin + t * dir;
          bool inside = true;
          for (int j = 0; j < 3; ++j) {
            if (j != k && std::abs(p[j]) > h[j] + 1e-12) inside = false;
          }
          if (inside) {
            best_t = t;
            normal = Vec3::Zero();
            normal[k] = s;
          }
        }
      }
      break;
    }
    case PrimitiveKind::cylinder: {
      const double r = shape.dims[0], hz = 0.5 * shape.dims[1];
      const double a = dir.x() * dir.x() + dir.y() * dir.y();
      if (a > 1e-14) {
        const double b = origin.x() * dir.x() + origin.y() * dir.y();
        const double c = origin.x() * origin.x() + origin.y() * origin.y() -
                         r * r;
        const double disc = b * b - a * c;
        if (disc >= 0) {
          for (double t : {(-b - std::sqrt(disc)) / a,
                           (-b + std::sqrt(disc)) / a}) {
            if (t <= t_min || t <= best_t) continue;
            const Vec3 p = origin + t * dir;
            if (std::abs(p.z()) <= hz + 1e-12) {
              best_t = t;
              normal = Vec3(p.x(), p.y(), 0.0).normalized();
            }
          }
        }
      }
      if (std::abs(dir.z()) > 1e-14) {
        for (int s : {-1, 1}) {
          const double t = (s * hz - origin.z()) / dir.z();
          if (t <= t_min || t <= best_t) continue;
          const Vec3 p = origin + t * dir;
          if (p.x() * p.x() + p.y() * p.y() <= r * r + 1e-12) {
            best_t = t;
            normal = Vec3(0, 0, s);
          }
        }
      }
      break;
    }
  }
  if (best_t <= t_min) return false;
  if (hit) {
    hit->t = best_t;
    hit->point = origin + best_t * dir;
    hit->normal = normal;
    hit->tri = -1;
  }
  return true;
}

namespace {

double cone_cos(double mu) { return 1.0 / std::sqrt(1.0 + mu * mu); }

Pose grasp_frame(const Vec3& c1, const Vec3& c2, double roll) {
  const Vec3 x = (c2 - c1).normalized();
  Vec3 ref = std::abs(x.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  const Vec3 b = (ref - ref.dot(x) * x).normalized();
  Vec3 y = std::cos(roll) * b + std::sin(roll) * x.cross(b);
  // Approach axis points away from the body when the midpoint is off-center.
  const Vec3 mid = 0.5 * (c1 + c2);
  const Vec3 out = mid - mid.dot(x) * x;
  if (out.norm() > 1e-6 && y.dot(out) < 0.0) y = -y;
  const Vec3 z = x.cross(y);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  Pose g;
  g.p = mid;
  g.q = Quat(r);
  g.q.normalize();
  return g;
}

}  // namespace

std::optional<GraspCandidate> sample_antipodal(const TriMesh& mesh,
                                               const PrimitiveShape& shape,
                                               const AntipodalConfig& cfg,
                                               Rng& rng) {
  // Area-weighted surface point.
  double pick = rng.uniform() * mesh.total_area;
  size_t tri = 0;
  for (; tri + 1 < mesh.areas.size(); ++tri) {
    if (pick < mesh.areas[tri]) break;
    pick -= mesh.areas[tri];
  }
  double u = rng.uniform(), v = rng.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  const auto& t = mesh.tris[tri];
  const Vec3 p1 = mesh.vertices[t[0]] +
                  u * (mesh.vertices[t[1]] - mesh.vertices[t[0]]) +
                  v * (mesh.vertices[t[2]] - mesh.vertices[t[0]]);
  const double roll = rng.uniform(0.0, 2.0 * M_PI);

  const Vec3 dir = -analytic_normal(shape, p1);
  RayHit hit;
  if (!raycast_exit(mesh, p1, dir, 1e-7, &hit)) return std::nullopt;

  GraspCandidate cand;
  cand.c1 = p1;
  cand.c2 = hit.point;
  cand.n1 = mesh.normals[tri];
  cand.n2 = hit.normal;
  cand.width = hit.t;
  if (cand.width > cfg.max_width) return std::nullopt;

  const Vec3 d = (cand.c2 - cand.c1).normalized();
  const double thr = cone_cos(cfg.mu);
  if (-(cand.n1.dot(d)) < thr) return std::nullopt;
  if (cand.n2.dot(d) < thr) return std::nullopt;

  cand.pose = grasp_frame(cand.c1, cand.c2, roll);
  return cand;
}

bool validate_antipodal(const TriMesh& mesh, const Pose& grasp,
                        const AntipodalConfig& cfg, GraspCandidate* out) {
  const Vec3 x = grasp.q.toRotationMatrix().col(0);
  RayHit fwd, back;
  if (!raycast_exit(mesh, grasp.p, x, 1e-9, &fwd)) return false;
  if (!raycast_exit(mesh, grasp.p, -x, 1e-9, &back)) return false;

  GraspCandidate cand;
  cand.pose = grasp;
  cand.c1 = back.point;
  cand.c2 = fwd.point;
  cand.n1 = back.normal;
  cand.n2 = fwd.normal;
  cand.width = fwd.t + back.t;
  if (cand.width > cfg.max_width) return false;

  const Vec3 d = (cand.c2 - cand.c1).normalized();
  const double thr = cone_cos(cfg.mu);
  if (-(cand.n1.dot(d)) < thr) return false;
  if (cand.n2.dot(d) < thr) return false;
  if (out) *out = cand;
  return true;
}

HandProxy hand_proxy_for_class(int cls, double region_radius) {
  // Per-class layout constants: finger spread, curl, length scale, thumb
  // opposition. Chosen so the eight classes produce visibly different
  // region clouds.
  static constexpr double kSpread[8] = {0.6, 0.9, 1.2, 1.5, 0.7, 1.1, 1.4, 0.8};
  static constexpr double kCurl[8] = {0.9, 0.3, 0.6, 0.2, 1.2, 0.8, 0.4, 1.0};
  static constexpr double kLen[8] = {1.0, 1.15, 0.85, 1.05, 0.9, 1.2, 1.0, 0.8};
  static constexpr double kThumb[8] = {1.0, 0.6, 1.3, 0.8, 1.1, 0.7, 1.2, 0.9};
  const int c = ((cls % 8) + 8) % 8;

  HandProxy hand;
  hand.region_radius = region_radius;
  hand.region_centers[0] = {0.0, 0.030, 0.0};  // palm

  int idx = 1;
  for (int f = 0; f < 5; ++f) {
    Vec3 base, dir;
    double seg;
    if (f == 0) {
      base = {-0.030, 0.030, -0.008};
      dir = Vec3(-0.75 * kThumb[c], 0.65, -0.2).normalized();
      seg = 0.026 * kLen[c];
    } else {
      const double lateral = (f - 2.5) * 0.016 * kSpread[c];
      base = {lateral, 0.055, 0.0};
      dir = Vec3(lateral * 0.8, 1.0, 0.0).normalized();
      seg = 0.024 * kLen[c];
    }
    Vec3 pos = base;
    Vec3 d = dir;
    for (int s = 0; s < 3; ++s) {
      // Curl bends successive segments toward the -z (grip) side.
      const double bend = kCurl[c] * 0.38 * s;
      Vec3 ds = (std::cos(bend) * d - std::sin(bend) * Vec3(0, 0, 1));
      ds.normalize();
      pos += seg * ds;
      hand.region_centers[idx++] = pos;
    }
  }
  return hand;
}

RegionMatch region_match(const GraspCandidate& grasp, const HandProxy& hand) {
  const Pose inv = rigid_inverse(hand.pose);
  const Mat3 r = inv.q.toRotationMatrix();
  auto assign = [&](const Vec3& contact) {
    const Vec3 local = r * contact + inv.p;
    int best = -1;
    double best_d = hand.region_radius;
    for (int k = 0; k < 16; ++k) {
      const double d = (local - hand.region_centers[k]).norm();
      if (d <= best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };
  RegionMatch m;
  m.r1 = assign(grasp.c1);
  m.r2 = assign(grasp.c2);
  m.accept = m.r1 >= 0 && m.r2 >= 0 && m.r1 != m.r2;
  return m;
}

int condition_dim(const DatagenSpec& spec) {
  return spec.classes + 48 + spec.cond_noise_dim;
}

namespace {

PrimitiveShape seeded_shape(const DatagenSpec& spec, Rng& rng) {
  const double total =
      spec.mesh_mix[0] + spec.mesh_mix[1] + spec.mesh_mix[2];
  const double pick = rng.uniform() * total;
  PrimitiveShape shape;
  // Dimensions keep at least one graspable extent under max_width.
  const double graspable = std::min(0.08, spec.max_width - 0.003);
  if (pick < spec.mesh_mix[0]) {
    shape.kind = PrimitiveKind::box;
    shape.dims = {rng.uniform(0.025, graspable), rng.uniform(0.04, 0.16),
                  rng.uniform(0.04, 0.16)};
  } else if (pick < spec.mesh_mix[0] + spec.mesh_mix[1]) {
    shape.kind = PrimitiveKind::cylinder;
    shape.dims = {rng.uniform(0.015, 0.5 * graspable),
                  rng.uniform(0.05, 0.18), 0.0};
  } else {
    shape.kind = PrimitiveKind::sphere;
    shape.dims = {rng.uniform(0.02, 0.5 * graspable), 0.0, 0.0};
  }
  return shape;
}

double bounding_radius(const PrimitiveShape& shape) {
  switch (shape.kind) {
    case PrimitiveKind::box: return 0.5 * shape.dims.norm();
    case PrimitiveKind::cylinder:
      return std::hypot(shape.dims[0], 0.5 * shape.dims[1]);
    case PrimitiveKind::sphere: return shape.dims[0];
  }
  return 0.1;
}

Pose seeded_hand_pose(const PrimitiveShape& shape, Rng& rng) {
  const Vec3 dir = rng.unit_vector();
  const double dist = bounding_radius(shape) + rng.uniform(0.02, 0.05);
  Pose pose;
  pose.p = dist * dir;
  // Palm axis (+y in the wrist frame) faces the object center.
  Quat align = Quat::FromTwoVectors(Vec3(0, 1, 0), -dir);
  const double roll = rng.uniform(0.0, 2.0 * M_PI);
  pose.q = quat_mul(exp_so3(roll * -dir), align);
  return pose;
}

SceneRecord build_scene(const DatagenSpec& spec, int scene_id, bool* kept) {
  Rng base(spec.seed, static_cast<std::uint64_t>(scene_id), 0xDA7A);
  Rng shape_rng = base.fork(1);
  Rng hand_rng = base.fork(2);
  Rng grasp_rng = base.fork(3);
  Rng cond_rng = base.fork(4);

  SceneRecord scene;
  scene.scene_id = scene_id;
  scene.class_label = scene_id % spec.classes;
  scene.shape = seeded_shape(spec, shape_rng);
  const TriMesh mesh = make_mesh(scene.shape);

  HandProxy hand =
      hand_proxy_for_class(scene.class_label, spec.region_radius);
  hand.pose = seeded_hand_pose(scene.shape, hand_rng);
  scene.hand_pose = hand.pose;

  AntipodalConfig acfg;
  acfg.mu = spec.mu;
  acfg.max_width = spec.max_width;

  Eigen::VectorXd region_hits = Eigen::VectorXd::Zero(16);
  const Pose hand_inv = rigid_inverse(hand.pose);
  for (int attempt = 0;
       attempt < spec.candidate_budget &&
       static_cast<int>(scene.grasps.size()) < spec.max_grasps;
       ++attempt) {
    auto cand = sample_antipodal(mesh, scene.shape, acfg, grasp_rng);
    if (!cand) continue;
    GraspCandidate checked;
    if (!validate_antipodal(mesh, cand->pose, acfg, &checked)) continue;
    const RegionMatch rm = region_match(checked, hand);
    if (!rm.accept) continue;
    scene.grasps.push_back(apply_global(checked.pose, hand_inv));
    scene.engaged.push_back({rm.r1, rm.r2});
    region_hits[rm.r1] += 1.0;
    region_hits[rm.r2] += 1.0;
  }
  *kept = static_cast<int>(scene.grasps.size()) >= spec.min_grasps;
  if (!*kept) return scene;

  ConditionBundle cond;
  cond.class_label = scene.class_label;
  cond.feature = Eigen::VectorXd::Zero(condition_dim(spec));
  cond.feature[scene.class_label] = 1.0;
  for (int k = 0; k < 16; ++k) {
    cond.feature.segment<3>(spec.classes + 3 * k) = hand.region_centers[k];
  }
  for (int k = 0; k < spec.cond_noise_dim; ++k) {
    cond.feature[spec.classes + 48 + k] =
        spec.cond_noise_scale * cond_rng.normal();
  }
  cond.contact_target =
      region_hits / static_cast<double>(scene.grasps.size());
  scene.condition = cond;
  return scene;
}

}  // namespace

GraspDataset build_dataset(const DatagenSpec& spec, int workers) {
  GraspDataset ds;
  ds.spec = spec;
  std::vector<SceneRecord> slots(spec.scenes);
  std::vector<char> kept(spec.scenes, 0);
  parallel_for(spec.scenes, workers, [&](int i) {
    bool ok = false;
    slots[i] = build_scene(spec, i, &ok);
    kept[i] = ok ? 1 : 0;
  });
  for (int i = 0; i < spec.scenes; ++i) {
    if (kept[i]) {
      ds.scenes.push_back(std::move(slots[i]));
    } else {
      ++ds.scenes_dropped;
    }
  }
  return ds;
}

bool revalidate_dataset(const GraspDataset& ds, std::string* reason) {
  AntipodalConfig acfg;
  acfg.mu = ds.spec.mu;
  acfg.max_width = ds.spec.max_width;
  for (const SceneRecord& scene : ds.scenes) {
    const TriMesh mesh = make_mesh(scene.shape);
    HandProxy hand =
        hand_proxy_for_class(scene.class_label, ds.spec.region_radius);
    hand.pose = scene.hand_pose;
    for (size_t k = 0; k < scene.grasps.size(); ++k) {
      const Pose g_obj = apply_global(scene.grasps[k], hand.pose);
      GraspCandidate checked;
      if (!validate_antipodal(mesh, g_obj, acfg, &checked)) {
        if (reason) {
          *reason = "scene " + std::to_string(scene.scene_id) + " grasp " +
                    std::to_string(k) + " fails the antipodal check";
        }
        return false;
      }
      const RegionMatch rm = region_match(checked, hand);
      if (!rm.accept || rm.r1 != scene.engaged[k][0] ||
          rm.r2 != scene.engaged[k][1]) {
        if (reason) {
          *reason = "scene " + std::to_string(scene.scene_id) + " grasp " +
                    std::to_string(k) + " fails the region filter";
        }
        return false;
      }
    }
  }
  return true;
}

}  // namespace sg
