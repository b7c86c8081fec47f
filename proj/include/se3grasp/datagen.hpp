#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "se3grasp/lie.hpp"
#include "se3grasp/net.hpp"
#include "se3grasp/rng.hpp"

namespace sg {

enum class PrimitiveKind { box, cylinder, sphere };

std::string to_string(PrimitiveKind kind);
PrimitiveKind primitive_from_string(const std::string& s);

// Primitive described by up to three scalars:
//   box: full extents (x, y, z); cylinder: (radius, height, -);
//   sphere: (radius, -, -). Centered at the origin, cylinder axis = z.
struct PrimitiveShape {
  PrimitiveKind kind = PrimitiveKind::box;
  Vec3 dims{0.05, 0.05, 0.05};
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> tris;
  std::vector<Vec3> normals;  // unit, outward, per triangle
  std::vector<double> areas;
  double total_area = 0.0;
};

TriMesh make_mesh(const PrimitiveShape& shape);

// Outward normal of the analytic surface at a point on (or near) it.
Vec3 analytic_normal(const PrimitiveShape& shape, const Vec3& point);

struct RayHit {
  double t = 0.0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
  int tri = -1;
};

// Farthest Moller-Trumbore intersection with t > t_min; for the convex
// meshes here that is the exit point of an inward ray. Ties break on the
// lower triangle index so recomputation is deterministic.
bool raycast_exit(const TriMesh& mesh, const Vec3& origin, const Vec3& dir,
                  double t_min, RayHit* hit);

// Analytic counterpart used as a cross-check oracle in tests.
bool analytic_raycast_exit(const PrimitiveShape& shape, const Vec3& origin,
                           const Vec3& dir, double t_min, RayHit* hit);

struct AntipodalConfig {
  double mu = 0.5;          // friction coefficient
  double max_width = 0.085;  // jaw stroke in meters
};

struct GraspCandidate {
  Pose pose;  // object frame: x = closing line, y = approach
  Vec3 c1 = Vec3::Zero(), c2 = Vec3::Zero();  // jaw contacts
  Vec3 n1 = Vec3::Zero(), n2 = Vec3::Zero();  // outward contact normals
  double width = 0.0;
};

// Sample a surface point, shoot the inward analytic-normal ray, and accept
// when both contacts satisfy the friction-cone and width constraints.
// Returns nullopt when the candidate fails (caller resamples).
std::optional<GraspCandidate> sample_antipodal(const TriMesh& mesh,
                                               const PrimitiveShape& shape,
                                               const AntipodalConfig& cfg,
                                               Rng& rng);

// Recompute both contacts from the pose alone (casts along the closing axis
// from the midpoint) and re-run every acceptance check. Used as the final
// gate at generation time and again on reload.
bool validate_antipodal(const TriMesh& mesh, const Pose& grasp,
                        const AntipodalConfig& cfg,
                        GraspCandidate* out = nullptr);

// 16-region hand stand-in: one palm region plus five fingers of three
// segments, laid out per taxonomy class. pose places the wrist frame in the
// object frame.
struct HandProxy {
  std::array<Vec3, 16> region_centers;  // wrist frame
  double region_radius = 0.015;
  Pose pose;
};

HandProxy hand_proxy_for_class(int cls, double region_radius);

struct RegionMatch {
  bool accept = false;
  int r1 = -1, r2 = -1;
};

// Assign each jaw contact (object frame) to its nearest region center within
// region_radius; accept iff both assign and the regions differ.
RegionMatch region_match(const GraspCandidate& grasp, const HandProxy& hand);

// ------------------------------------------------------------------ dataset

struct DatagenSpec {
  int scenes = 64;
  int classes = 8;
  int min_grasps = 32;
  int max_grasps = 48;
  int candidate_budget = 40000;
  double mu = 0.5;
  double max_width = 0.085;
  double region_radius = 0.015;
  int cond_noise_dim = 4;
  double cond_noise_scale = 0.05;
  std::array<double, 3> mesh_mix{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::uint64_t seed = 0;
};

struct SceneRecord {
  int scene_id = 0;
  int class_label = 0;
  PrimitiveShape shape;
  Pose hand_pose;  // wrist frame in object frame
  ConditionBundle condition;
  std::vector<Pose> grasps;  // wrist frame
  std::vector<std::array<int, 2>> engaged;  // matched regions per grasp
};

struct GraspDataset {
  int version = 1;
  DatagenSpec spec;
  int scenes_dropped = 0;
  std::vector<SceneRecord> scenes;
};

// Deterministic given spec.seed. Scenes that fail to reach min_grasps within
// the budget are dropped and counted.
GraspDataset build_dataset(const DatagenSpec& spec, int workers = 1);

// Every stored grasp re-passes both filters; returns false and a reason on
// the first violation.
bool revalidate_dataset(const GraspDataset& dataset, std::string* reason);

// Condition feature layout: one-hot class, flattened region centers, then
// cond_noise_dim seeded noise entries.
int condition_dim(const DatagenSpec& spec);

}  // namespace sg
