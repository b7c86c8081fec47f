#pragma once

#include <string>
#include <vector>

#include "se3grasp/datagen.hpp"
#include "se3grasp/net.hpp"
#include "se3grasp/schedule.hpp"

namespace sg {

// Pose wire order everywhere: px py pz qw qx qy qz, quaternion canonicalized
// to w >= 0 on write.
std::vector<double> pose_to_scalars(const Pose& g);
Pose pose_from_scalars(const std::vector<double>& s);

// Dataset file: JSON lines, one header line then one scene per line.
void save_dataset(const GraspDataset& dataset, const std::string& path);
GraspDataset load_dataset(const std::string& path);
std::string dataset_to_jsonl(const GraspDataset& dataset);
GraspDataset dataset_from_jsonl(const std::string& text);

// Checkpoint: versioned binary header (magic, version, mode, schedule, layer
// sizes) followed by little-endian doubles per tensor in declared order,
// plus a JSON sidecar at <path>.json echoing the training config.
struct Checkpoint {
  ModelParams params;
  GenMode mode = GenMode::flow;
  NoiseSchedule schedule;
  std::string config_json = "{}";
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sg
