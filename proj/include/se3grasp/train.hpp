#pragma once

#include <ostream>
#include <vector>

#include "se3grasp/datagen.hpp"
#include "se3grasp/net.hpp"
#include "se3grasp/schedule.hpp"

namespace sg {

struct TrainConfig {
  GenMode mode = GenMode::flow;
  int steps = 2000;
  int batch_size = 128;
  double lr = 1e-3;
  double cond_dropout = 0.1;  // classifier-free null-condition rate
  std::uint64_t seed = 0;
  NoiseSchedule schedule;
  LossWeights weights;
  int log_every = 0;  // 0 disables progress lines
};

// Minibatch training over scene grasps; deterministic given the seed.
ModelParams train_model(const NetConfig& net_cfg,
                        const std::vector<SceneRecord>& scenes,
                        const TrainConfig& cfg, std::ostream* log = nullptr);

}  // namespace sg
