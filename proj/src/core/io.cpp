#include "se3grasp/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "se3grasp/util.hpp"

namespace sg {

using json = nlohmann::ordered_json;

std::vector<double> pose_to_scalars(const Pose& g) {
  const Quat q = quat_canonical(g.q);
  return {g.p.x(), g.p.y(), g.p.z(), q.w(), q.x(), q.y(), q.z()};
}

Pose pose_from_scalars(const std::vector<double>& s) {
  if (s.size() != 7) throw std::invalid_argument("pose needs 7 scalars");
  Pose g;
  g.p = {s[0], s[1], s[2]};
  g.q = Quat(s[3], s[4], s[5], s[6]);
  if (std::abs(g.q.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("pose quaternion is not unit length");
  }
  g.q.normalize();
  return g;
}

namespace {

json spec_to_json(const DatagenSpec& spec) {
  return json{{"scenes", spec.scenes},
              {"classes", spec.classes},
              {"min_grasps", spec.min_grasps},
              {"max_grasps", spec.max_grasps},
              {"candidate_budget", spec.candidate_budget},
              {"mu", spec.mu},
              {"max_width", spec.max_width},
              {"region_radius", spec.region_radius},
              {"cond_noise_dim", spec.cond_noise_dim},
              {"cond_noise_scale", spec.cond_noise_scale},
              {"mesh_mix", spec.mesh_mix},
              {"seed", spec.seed}};
}

DatagenSpec spec_from_json(const json& j) {
  DatagenSpec spec;
  spec.scenes = j.at("scenes");
  spec.classes = j.at("classes");
  spec.min_grasps = j.at("min_grasps");
  spec.max_grasps = j.at("max_grasps");
  spec.candidate_budget = j.at("candidate_budget");
  spec.mu = j.at("mu");
  spec.max_width = j.at("max_width");
  spec.region_radius = j.at("region_radius");
  spec.cond_noise_dim = j.at("cond_noise_dim");
  spec.cond_noise_scale = j.at("cond_noise_scale");
  spec.mesh_mix = j.at("mesh_mix");
  spec.seed = j.at("seed");
  return spec;
}

}  // namespace

std::string dataset_to_jsonl(const GraspDataset& ds) {
  std::ostringstream out;
  json header{{"schema", "se3grasp-dataset"},
              {"version", ds.version},
              {"scenes_dropped", ds.scenes_dropped},
              {"spec", spec_to_json(ds.spec)}};
  out << header.dump() << "\n";
  for (const SceneRecord& s : ds.scenes) {
    json grasps = json::array();
    for (const Pose& g : s.grasps) grasps.push_back(pose_to_scalars(g));
    json engaged = json::array();
    for (const auto& e : s.engaged) engaged.push_back({e[0], e[1]});
    json line{{"scene_id", s.scene_id},
              {"class", s.class_label},
              {"shape",
               {{"kind", to_string(s.shape.kind)},
                {"dims", {s.shape.dims.x(), s.shape.dims.y(),
                          s.shape.dims.z()}}}},
              {"hand_pose", pose_to_scalars(s.hand_pose)},
              {"feature", std::vector<double>(
                              s.condition.feature.data(),
                              s.condition.feature.data() +
                                  s.condition.feature.size())},
              {"contact_target",
               std::vector<double>(s.condition.contact_target.data(),
                                   s.condition.contact_target.data() +
                                       s.condition.contact_target.size())},
              {"grasps", grasps},
              {"engaged", engaged}};
    out << line.dump() << "\n";
  }
  return out.str();
}

GraspDataset dataset_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("dataset: empty file");
  }
  json header = json::parse(line);
  if (header.at("schema") != "se3grasp-dataset") {
    throw std::runtime_error("dataset: unknown schema");
  }
  GraspDataset ds;
  ds.version = header.at("version");
  ds.scenes_dropped = header.at("scenes_dropped");
  ds.spec = spec_from_json(header.at("spec"));

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    SceneRecord s;
    s.scene_id = j.at("scene_id");
    s.class_label = j.at("class");
    s.shape.kind = primitive_from_string(j.at("shape").at("kind"));
    const std::vector<double> dims = j.at("shape").at("dims");
    s.shape.dims = Vec3(dims.at(0), dims.at(1), dims.at(2));
    s.hand_pose = pose_from_scalars(j.at("hand_pose"));
    const std::vector<double> feat = j.at("feature");
    s.condition.feature =
        Eigen::Map<const Eigen::VectorXd>(feat.data(), feat.size());
    const std::vector<double> ct = j.at("contact_target");
    s.condition.contact_target =
        Eigen::Map<const Eigen::VectorXd>(ct.data(), ct.size());
    s.condition.class_label = s.class_label;
    for (const auto& g : j.at("grasps")) {
      s.grasps.push_back(pose_from_scalars(g));
    }
    for (const auto& e : j.at("engaged")) {
      s.engaged.push_back({e[0], e[1]});
    }
    ds.scenes.push_back(std::move(s));
  }
  return ds;
}

void save_dataset(const GraspDataset& ds, const std::string& path) {
  atomic_write_file(path, dataset_to_jsonl(ds));
}

GraspDataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return dataset_from_jsonl(buf.str());
}

namespace {

constexpr char kMagic[8] = {'S', 'G', '3', 'G', 'C', 'K', 'P', '1'};

template <typename T>
void put(std::string* out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out->append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, size_t* off) {
  if (*off + sizeof(T) > in.size()) {
    throw std::runtime_error("checkpoint: truncated file");
  }
  T v;
  std::memcpy(&v, in.data() + *off, sizeof(T));
  *off += sizeof(T);
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(&out, 1);  // version
  put<std::uint32_t>(&out, ckpt.mode == GenMode::score ? 0u : 1u);
  put<double>(&out, ckpt.schedule.alpha_p);
  put<double>(&out, ckpt.schedule.alpha_q);
  put<double>(&out, ckpt.schedule.alpha_t);

  const NetConfig& cfg = ckpt.params.cfg;
  put<std::int32_t>(&out, cfg.cond_dim);
  put<std::int32_t>(&out, cfg.num_classes);
  put<std::int32_t>(&out, cfg.num_regions);
  put<std::int32_t>(&out, cfg.codebook_dim);
  put<std::int32_t>(&out, cfg.time_embed_dim);
  put<std::int32_t>(&out, cfg.head_hidden);
  put<std::int32_t>(&out, static_cast<std::int32_t>(cfg.hidden.size()));
  for (int h : cfg.hidden) put<std::int32_t>(&out, h);

  std::uint32_t tensors = 0;
  ckpt.params.visit([&](const Eigen::MatrixXd&) { ++tensors; });
  put<std::uint32_t>(&out, tensors);
  ckpt.params.visit([&](const Eigen::MatrixXd& m) {
    put<std::uint32_t>(&out, static_cast<std::uint32_t>(m.rows()));
    put<std::uint32_t>(&out, static_cast<std::uint32_t>(m.cols()));
    for (int c = 0; c < m.cols(); ++c) {
      for (int r = 0; r < m.rows(); ++r) put<double>(&out, m(r, c));
    }
  });

  atomic_write_file(path, out);
  atomic_write_file(path + ".json", ckpt.config_json);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  size_t off = 0;
  if (data.size() < sizeof(kMagic) ||
      std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  off = sizeof(kMagic);
  const auto version = take<std::uint32_t>(data, &off);
  if (version != 1) throw std::runtime_error("checkpoint: bad version");

  Checkpoint ckpt;
  ckpt.mode =
      take<std::uint32_t>(data, &off) == 0 ? GenMode::score : GenMode::flow;
  ckpt.schedule.alpha_p = take<double>(data, &off);
  ckpt.schedule.alpha_q = take<double>(data, &off);
  ckpt.schedule.alpha_t = take<double>(data, &off);

  NetConfig cfg;
  cfg.cond_dim = take<std::int32_t>(data, &off);
  cfg.num_classes = take<std::int32_t>(data, &off);
  cfg.num_regions = take<std::int32_t>(data, &off);
  cfg.codebook_dim = take<std::int32_t>(data, &off);
  cfg.time_embed_dim = take<std::int32_t>(data, &off);
  cfg.head_hidden = take<std::int32_t>(data, &off);
  const auto nh = take<std::int32_t>(data, &off);
  cfg.hidden.clear();
  for (int i = 0; i < nh; ++i) cfg.hidden.push_back(take<std::int32_t>(data, &off));

  Rng dummy(0);
  ckpt.params = init_params(cfg, dummy);
  const auto tensors = take<std::uint32_t>(data, &off);
  std::uint32_t seen = 0;
  ckpt.params.visit([&](Eigen::MatrixXd& m) {
    ++seen;
    const auto rows = take<std::uint32_t>(data, &off);
    const auto cols = take<std::uint32_t>(data, &off);
    if (static_cast<int>(rows) != m.rows() ||
        static_cast<int>(cols) != m.cols()) {
      throw std::runtime_error("checkpoint: tensor shape mismatch");
    }
    for (std::uint32_t c = 0; c < cols; ++c) {
      for (std::uint32_t r = 0; r < rows; ++r) {
        m(r, c) = take<double>(data, &off);
      }
    }
  });
  if (seen != tensors) throw std::runtime_error("checkpoint: tensor count");

  std::ifstream side(path + ".json", std::ios::binary);
  if (side) {
    std::ostringstream sbuf;
    sbuf << side.rdbuf();
    ckpt.config_json = sbuf.str();
  }
  return ckpt;
}

}  // namespace sg
