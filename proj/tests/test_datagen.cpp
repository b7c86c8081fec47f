#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "se3grasp/datagen.hpp"
#include "se3grasp/io.hpp"
#include "support/oracles.hpp"

using namespace sg;

namespace {

// Every edge of a watertight mesh is shared by exactly two triangles.
bool watertight(const TriMesh& m) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& t : m.tris) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k], b = t[(k + 1) % 3];
      ++edges[std::minmax(a, b)];
    }
  }
  for (const auto& [e, count] : edges) {
    if (count != 2) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("primitive meshes are watertight with outward normals") {
  for (const PrimitiveShape shape :
       {PrimitiveShape{PrimitiveKind::box, {0.04, 0.1, 0.2}},
        PrimitiveShape{PrimitiveKind::cylinder, {0.03, 0.12, 0.0}},
        PrimitiveShape{PrimitiveKind::sphere, {0.04, 0.0, 0.0}}}) {
    const TriMesh m = make_mesh(shape);
    CHECK(watertight(m));
    for (size_t i = 0; i < m.tris.size(); ++i) {
      const Vec3 centroid = (m.vertices[m.tris[i][0]] +
                             m.vertices[m.tris[i][1]] +
                             m.vertices[m.tris[i][2]]) /
                            3.0;
      CHECK(m.normals[i].dot(centroid) > 0.0);
      CHECK(std::abs(m.normals[i].norm() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("box surface area matches the analytic value") {
  const TriMesh m = make_mesh({PrimitiveKind::box, {0.04, 0.1, 0.2}});
  const double expect = 2 * (0.04 * 0.1 + 0.04 * 0.2 + 0.1 * 0.2);
  CHECK(m.total_area == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("mesh raycast agrees with the analytic intersectors") {
  Rng rng(91);
  // Box: the mesh is the analytic shape, so agreement is exact.
  const PrimitiveShape box{PrimitiveKind::box, {0.06, 0.08, 0.12}};
  const TriMesh mesh = make_mesh(box);
  for (int i = 0; i < 200; ++i) {
    const Vec3 origin = {rng.uniform(-0.02, 0.02), rng.uniform(-0.03, 0.03),
                         rng.uniform(-0.05, 0.05)};
    const Vec3 dir = rng.unit_vector();
    RayHit hm, ha;
    REQUIRE(raycast_exit(mesh, origin, dir, 1e-9, &hm));
    REQUIRE(analytic_raycast_exit(box, origin, dir, 1e-9, &ha));
    CHECK(std::abs(hm.t - ha.t) < 1e-10);
    CHECK((hm.normal - ha.normal).norm() < 1e-10);
  }
  // Curved shapes: the mesh is inscribed, agreement within the chord error.
  const PrimitiveShape cyl{PrimitiveKind::cylinder, {0.03, 0.12, 0.0}};
  const TriMesh cyl_mesh = make_mesh(cyl);
  const PrimitiveShape sph{PrimitiveKind::sphere, {0.04, 0.0, 0.0}};
  const TriMesh sph_mesh = make_mesh(sph);
  for (int i = 0; i < 200; ++i) {
    const Vec3 dir = rng.unit_vector();
    RayHit hm, ha;
    REQUIRE(raycast_exit(cyl_mesh, Vec3::Zero(), dir, 1e-9, &hm));
    REQUIRE(analytic_raycast_exit(cyl, Vec3::Zero(), dir, 1e-9, &ha));
    CHECK(std::abs(hm.t - ha.t) < 0.05 * 0.03);
    REQUIRE(raycast_exit(sph_mesh, Vec3::Zero(), dir, 1e-9, &hm));
    REQUIRE(analytic_raycast_exit(sph, Vec3::Zero(), dir, 1e-9, &ha));
    CHECK(std::abs(hm.t - ha.t) < 0.02 * 0.04);
  }
}

TEST_CASE("sphere grasps pass through the center") {
  const PrimitiveShape sph{PrimitiveKind::sphere, {1.0, 0.0, 0.0}};
  const TriMesh mesh = make_mesh(sph);
  AntipodalConfig cfg;
  cfg.max_width = 2.5;
  cfg.mu = 0.8;
  Rng rng(92);
  int accepted = 0;
  for (int i = 0; i < 500 && accepted < 100; ++i) {
    const auto cand = sample_antipodal(mesh, sph, cfg, rng);
    if (!cand) continue;
    ++accepted;
    const Vec3 d = (cand->c2 - cand->c1).normalized();
    // Distance from the closing line to the center.
    CHECK(cand->c1.cross(d).norm() < 1e-6);
  }
  CHECK(accepted >= 100);
}

TEST_CASE("jaw stroke rules out wide box grasps") {
  const PrimitiveShape box{PrimitiveKind::box, {0.04, 0.1, 0.2}};
  const TriMesh mesh = make_mesh(box);
  AntipodalConfig cfg;  // max_width 0.085
  Rng rng(93);
  int accepted = 0;
  for (int i = 0; i < 2000 && accepted < 64; ++i) {
    const auto cand = sample_antipodal(mesh, box, cfg, rng);
    if (!cand) continue;
    ++accepted;
    CHECK(cand->width <= cfg.max_width);
    const Vec3 d = (cand->c2 - cand->c1).normalized();
    // Only the 0.04 m extent is graspable.
    CHECK(std::abs(d.x()) > 0.999);
  }
  CHECK(accepted > 0);
}

TEST_CASE("accepted grasps re-pass the friction cone on recomputation") {
  const PrimitiveShape cyl{PrimitiveKind::cylinder, {0.025, 0.15, 0.0}};
  const TriMesh mesh = make_mesh(cyl);
  AntipodalConfig cfg;
  Rng rng(94);
  const double cone = std::atan(cfg.mu);
  int accepted = 0;
  for (int i = 0; i < 2000 && accepted < 64; ++i) {
    const auto cand = sample_antipodal(mesh, cyl, cfg, rng);
    if (!cand) continue;
    GraspCandidate checked;
    REQUIRE(validate_antipodal(mesh, cand->pose, cfg, &checked));
    ++accepted;
    const Vec3 d = (checked.c2 - checked.c1).normalized();
    CHECK(std::acos(std::clamp(-checked.n1.dot(d), -1.0, 1.0)) <= cone + 1e-9);
    CHECK(std::acos(std::clamp(checked.n2.dot(d), -1.0, 1.0)) <= cone + 1e-9);
    // Tall cylinder: caps are farther apart than the jaw stroke, so all
    // closings are radial.
    CHECK(std::abs(d.z()) < 0.05);
    const Vec3 mid = 0.5 * (checked.c1 + checked.c2);
    CHECK(Vec3(mid.x(), mid.y(), 0.0).cross(d).norm() < 0.02);
  }
  CHECK(accepted > 0);
}

TEST_CASE("region matching accepts two distinct regions only") {
  HandProxy hand = hand_proxy_for_class(0, 0.015);
  hand.pose = Pose::identity();

  GraspCandidate g;
  // Both contacts nearest to the same region: reject.
  g.c1 = hand.region_centers[3] + Vec3(0.002, 0, 0);
  g.c2 = hand.region_centers[3] - Vec3(0.002, 0, 0);
  CHECK_FALSE(region_match(g, hand).accept);

  // Distinct regions: accept and report them.
  g.c1 = hand.region_centers[1] + Vec3(0.001, 0, 0);
  g.c2 = hand.region_centers[5] + Vec3(0.001, 0, 0);
  const RegionMatch m = region_match(g, hand);
  CHECK(m.accept);
  CHECK(m.r1 == 1);
  CHECK(m.r2 == 5);

  // Beyond the radius of every region: reject.
  g.c1 = Vec3(0.5, 0.5, 0.5);
  CHECK_FALSE(region_match(g, hand).accept);
}

TEST_CASE("hand layouts are distinct across classes") {
  std::set<long long> signatures;
  for (int c = 0; c < 8; ++c) {
    const HandProxy h = hand_proxy_for_class(c, 0.015);
    std::set<long long> centers;
    for (const Vec3& p : h.region_centers) {
      centers.insert(llround(p.x() * 1e9) ^ llround(p.y() * 1e9) * 31 ^
                     llround(p.z() * 1e9) * 131);
    }
    CHECK(centers.size() == 16);  // distinct centers within one layout
    long long sig = 0;
    for (long long v : centers) sig ^= v * 2654435761LL;
    signatures.insert(sig);
  }
  CHECK(signatures.size() == 8);  // layouts differ between classes
}

TEST_CASE("region filter is neither vacuous nor total") {
  DatagenSpec spec;
  spec.seed = 7;
  Rng base(spec.seed, 0, 0xDA7A);
  const PrimitiveShape shape{PrimitiveKind::box, {0.05, 0.07, 0.09}};
  const TriMesh mesh = make_mesh(shape);
  HandProxy hand = hand_proxy_for_class(2, spec.region_radius);
  hand.pose.p = Vec3(0.0, -0.11, 0.0);

  AntipodalConfig acfg;
  Rng rng(95);
  int accepts = 0, rejects = 0, tried = 0;
  while (tried < 400) {
    const auto cand = sample_antipodal(mesh, shape, acfg, rng);
    if (!cand) continue;
    ++tried;
    if (region_match(*cand, hand).accept) {
      ++accepts;
    } else {
      ++rejects;
    }
  }
  CHECK(accepts > 0);
  CHECK(rejects > 0);
}

TEST_CASE("build_dataset is deterministic and revalidates") {
  DatagenSpec spec;
  spec.scenes = 6;
  spec.classes = 3;
  spec.min_grasps = 8;
  spec.max_grasps = 12;
  spec.candidate_budget = 60000;
  spec.seed = 20240817;

  const GraspDataset a = build_dataset(spec);
  const GraspDataset b = build_dataset(spec);
  CHECK(dataset_to_jsonl(a) == dataset_to_jsonl(b));
  CHECK(a.scenes.size() + a.scenes_dropped == 6);
  CHECK(a.scenes.size() >= 1);

  std::string reason;
  CHECK(revalidate_dataset(a, &reason));

  for (const SceneRecord& s : a.scenes) {
    CHECK(static_cast<int>(s.grasps.size()) >= spec.min_grasps);
    CHECK(s.condition.feature.size() == condition_dim(spec));
    CHECK(s.condition.feature[s.class_label] == 1.0);
    CHECK(s.condition.contact_target.size() == 16);
    CHECK(s.condition.contact_target.minCoeff() >= 0.0);
    CHECK(s.condition.contact_target.maxCoeff() <= 1.0);
  }
}

TEST_CASE("dataset jsonl round-trip is byte-stable") {
  DatagenSpec spec;
  spec.scenes = 3;
  spec.classes = 3;
  spec.min_grasps = 6;
  spec.max_grasps = 8;
  spec.candidate_budget = 60000;
  spec.seed = 5;

  const GraspDataset ds = build_dataset(spec);
  const std::string text = dataset_to_jsonl(ds);
  const GraspDataset back = dataset_from_jsonl(text);
  CHECK(dataset_to_jsonl(back) == text);

  std::string reason;
  CHECK(revalidate_dataset(back, &reason));
}

TEST_CASE("parallel scene generation matches single-threaded output") {
  DatagenSpec spec;
  spec.scenes = 4;
  spec.classes = 2;
  spec.min_grasps = 6;
  spec.max_grasps = 8;
  spec.candidate_budget = 60000;
  spec.seed = 11;
  const GraspDataset a = build_dataset(spec, 1);
  const GraspDataset b = build_dataset(spec, 4);
  CHECK(dataset_to_jsonl(a) == dataset_to_jsonl(b));
}
