#include "se3grasp/train.hpp"

#include <stdexcept>

#include "se3grasp/diff.hpp"
#include "se3grasp/flow.hpp"

namespace sg {

ModelParams train_model(const NetConfig& net_cfg,
                        const std::vector<SceneRecord>& scenes,
                        const TrainConfig& cfg, std::ostream* log) {
  if (scenes.empty()) throw std::invalid_argument("train: no scenes");
  for (const SceneRecord& s : scenes) {
    if (s.grasps.empty()) throw std::invalid_argument("train: empty scene");
    if (s.condition.feature.size() != net_cfg.cond_dim) {
      throw std::invalid_argument("train: condition dim mismatch");
    }
  }

  Rng rng(cfg.seed, 0x7EA1);
  ModelParams params = init_params(net_cfg, rng);
  AdamState adam = init_adam(params);
  AdamConfig acfg;
  acfg.lr = cfg.lr;
  ModelParams grads = zeros_like(params);

  std::vector<TrainItem> batch(cfg.batch_size);
  for (int step = 0; step < cfg.steps; ++step) {
    for (int b = 0; b < cfg.batch_size; ++b) {
      const SceneRecord& scene =
          scenes[rng.uniform_index(scenes.size())];
      const Pose& g1 = scene.grasps[rng.uniform_index(scene.grasps.size())];

      TrainItem& it = batch[b];
      it.cond = scene.condition;
      it.cond.null_flag = rng.uniform() < cfg.cond_dropout;
      if (cfg.mode == GenMode::score) {
        const PerturbSample ps = score_training_pair(g1, cfg.schedule, rng);
        it.g = ps.g_t;
        it.t = ps.t;
        it.target_p = ps.target_score_p;
        it.target_q = ps.target_score_q;
      } else {
        const FlowPair fp = flow_training_pair(g1, cfg.schedule, rng);
        it.g = fp.g_t;
        it.t = fp.t;
        it.target_p = flow_translation_target(fp);
        it.target_q = fp.dphi;
      }
    }
    const LossParts parts = loss_and_grad(params, batch, cfg.weights, &grads);
    adam_step(&params, grads, &adam, acfg);
    if (log && cfg.log_every > 0 &&
        (step % cfg.log_every == 0 || step + 1 == cfg.steps)) {
      (*log) << "step " << step << " loss " << parts.total << " gen "
             << parts.gen << " cls " << parts.cls << " cont " << parts.cont
             << "\n";
    }
  }
  return params;
}

}  // namespace sg
