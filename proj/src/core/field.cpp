#include "se3grasp/field.hpp"

namespace sg {

BatchFieldFn make_model_field(const ModelParams& params,
                              const ConditionBundle& cond,
                              const GuidanceConfig& guidance, double cfg_weight,
                              GuidanceOrder order) {
  ConditionBundle null_cond = cond;
  null_cond.null_flag = true;
  const bool mix = cfg_weight != 1.0;

  return [&params, cond, null_cond, guidance, cfg_weight, mix, order](
             std::span<const Pose> poses, double t, Eigen::MatrixXd* fp,
             Eigen::MatrixXd* fq) {
    forward_field(params, poses, t, cond, fp, fq);
    const int b = static_cast<int>(poses.size());

    if (guidance.enabled && order == GuidanceOrder::before_cfg) {
      for (int i = 0; i < b; ++i) {
        const Vec3 xi = guidance_term(poses[i].q, guidance);
        fq->row(i) =
            apply_guidance(fq->row(i).transpose(), xi, guidance.lambda_gd)
                .transpose();
      }
    }
    if (mix) {
      Eigen::MatrixXd up, uq;
      forward_field(params, poses, t, null_cond, &up, &uq);
      *fp = (1.0 - cfg_weight) * up + cfg_weight * *fp;
      *fq = (1.0 - cfg_weight) * uq + cfg_weight * *fq;
    }
    if (guidance.enabled && order == GuidanceOrder::after_cfg) {
      for (int i = 0; i < b; ++i) {
        const Vec3 xi = guidance_term(poses[i].q, guidance);
        fq->row(i) =
            apply_guidance(fq->row(i).transpose(), xi, guidance.lambda_gd)
                .transpose();
      }
    }
  };
}

}  // namespace sg
