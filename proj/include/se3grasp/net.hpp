#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "se3grasp/lie.hpp"
#include "se3grasp/rng.hpp"

namespace sg {

// Condition attached to each scene: a synthetic interaction descriptor, a
// grasp-type label, and per-region contact occupancy. null_flag marks the
// unconditional branch used for classifier-free guidance.
struct ConditionBundle {
  Eigen::VectorXd feature;
  int class_label = 0;
  Eigen::VectorXd contact_target;
  bool null_flag = false;
};

struct NetConfig {
  int cond_dim = 60;
  int num_classes = 33;   // grasp taxonomy size
  int num_regions = 16;   // hand-proxy contact regions
  int codebook_dim = 32;
  int time_embed_dim = 32;
  std::vector<int> hidden{256, 256, 256, 256};
  int head_hidden = 64;

  static constexpr int kPoseDim = 12;  // position + flattened rotation matrix
  int trunk_input_dim() const {
    return kPoseDim + time_embed_dim + cond_dim + codebook_dim;
  }
};

// All learnable tensors. Biases are stored as 1 x n matrices so the
// optimizer can walk a single uniform list.
struct ModelParams {
  NetConfig cfg;

  std::vector<Eigen::MatrixXd> trunk_w;
  std::vector<Eigen::MatrixXd> trunk_b;
  Eigen::MatrixXd head_p_w, head_p_b;
  Eigen::MatrixXd head_q_w, head_q_b;
  Eigen::MatrixXd cls_w1, cls_b1, cls_w2, cls_b2;
  Eigen::MatrixXd con_w1, con_b1, con_w2, con_b2;
  Eigen::MatrixXd codebook;      // num_classes x codebook_dim
  Eigen::MatrixXd null_feature;  // 1 x cond_dim
  Eigen::MatrixXd null_gamma;    // 1 x codebook_dim

  // Fixed-order traversal of every tensor; gradients and optimizer state
  // walk the same order.
  template <typename Fn>
  void visit(Fn&& fn) {
    for (auto& w : trunk_w) fn(w);
    for (auto& b : trunk_b) fn(b);
    fn(head_p_w); fn(head_p_b);
    fn(head_q_w); fn(head_q_b);
    fn(cls_w1); fn(cls_b1); fn(cls_w2); fn(cls_b2);
    fn(con_w1); fn(con_b1); fn(con_w2); fn(con_b2);
    fn(codebook);
    fn(null_feature);
    fn(null_gamma);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    const_cast<ModelParams*>(this)->visit(
        [&](Eigen::MatrixXd& m) { fn(const_cast<const Eigen::MatrixXd&>(m)); });
  }
};

ModelParams init_params(const NetConfig& cfg, Rng& rng);

// Gradients share the parameter layout.
ModelParams zeros_like(const ModelParams& params);

// Sinusoidal features [sin(2^k pi t), cos(2^k pi t)], k = 0..dim/2-1.
Eigen::VectorXd time_embed(double t, int dim);

// Softmax-weighted mixture of codebook rows.
Eigen::VectorXd codebook_mix(const Eigen::VectorXd& logits,
                             const Eigen::MatrixXd& codebook);

// One denoiser query. next to the two 3-vector outputs the auxiliary heads
// are reported as raw logits.
struct ForwardResult {
  Vec3 out_p = Vec3::Zero();
  Vec3 out_q = Vec3::Zero();
  Eigen::VectorXd cls_logits;
  Eigen::VectorXd contact_logits;
};

ForwardResult forward(const ModelParams& params, const Pose& g, double t,
                      const ConditionBundle& cond);

// Batched field query used by the samplers: one shared condition, many
// poses at the same time step. Returns B x 3 matrices.
void forward_field(const ModelParams& params, std::span<const Pose> poses,
                   double t, const ConditionBundle& cond,
                   Eigen::MatrixXd* out_p, Eigen::MatrixXd* out_q);

enum class GenMode { score, flow };

struct TrainItem {
  Pose g;
  double t = 0.0;
  ConditionBundle cond;
  Vec3 target_p = Vec3::Zero();
  Vec3 target_q = Vec3::Zero();
};

struct LossWeights {
  double lambda_gen = 1.0;
  double lambda_cls = 0.1;
  double lambda_cont = 0.1;
  double contact_pos_weight = 5.0;  // w1 of the weighted BCE
};

struct LossParts {
  double total = 0.0;
  double gen = 0.0;
  double cls = 0.0;
  double cont = 0.0;
};

// Full-batch forward + reverse-mode gradients. Throws on an empty batch.
LossParts loss_and_grad(const ModelParams& params,
                        std::span<const TrainItem> batch,
                        const LossWeights& weights, ModelParams* grads);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  long step = 0;
};

AdamState init_adam(const ModelParams& params);
void adam_step(ModelParams* params, const ModelParams& grads, AdamState* state,
               const AdamConfig& cfg);

// Generic tensor-list update backing adam_step; exposed for reuse on plain
// tensor collections.
void adam_update(const std::vector<Eigen::MatrixXd*>& params,
                 const std::vector<const Eigen::MatrixXd*>& grads,
                 AdamState* state, const AdamConfig& cfg);

}  // namespace sg
