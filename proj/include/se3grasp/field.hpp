#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

#include "se3grasp/guidance.hpp"
#include "se3grasp/lie.hpp"
#include "se3grasp/net.hpp"

namespace sg {

// Batched field query: fills B x 3 translational and rotational components
// for a set of trajectories marching in lockstep.
using BatchFieldFn = std::function<void(std::span<const Pose>, double,
                                        Eigen::MatrixXd*, Eigen::MatrixXd*)>;

enum class GuidanceOrder { before_cfg, after_cfg };

// Wrap a trained denoiser into a sampler field: conditional query, optional
// classifier-free mixing against the null condition, and palm-axis guidance
// on the rotational channel.
BatchFieldFn make_model_field(const ModelParams& params,
                              const ConditionBundle& cond,
                              const GuidanceConfig& guidance,
                              double cfg_weight,
                              GuidanceOrder order = GuidanceOrder::before_cfg);

}  // namespace sg
