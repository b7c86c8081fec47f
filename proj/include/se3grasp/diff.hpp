#pragma once

#include <vector>

#include "se3grasp/field.hpp"
#include "se3grasp/schedule.hpp"

namespace sg {

// Reverse-SDE sampler configuration for the score-matching branch.
struct SdeSamplerConfig {
  int steps = 100;
  NoiseSchedule schedule;
  double stochasticity_scale = 1.0;
  double cfg_weight = 1.0;
  double t_min = 1e-3;
  bool final_denoise = true;  // extra noise-free step at t_min
  // Rates inside the annealing step size 0.5 r^2 t^alpha_t. Nonpositive
  // means derive from the schedule so the dynamics contract fast enough to
  // track the shrinking noise level (see sampler notes in diff.cpp).
  double beta_rate_p = 0.0;
  double beta_rate_q = 0.0;
};

double derived_beta_rate_p(const SdeSamplerConfig& cfg);
double derived_beta_rate_q(const SdeSamplerConfig& cfg);

// Training-pair construction for the score branch: perturb the data pose
// and regress the closed-form scores.
PerturbSample score_training_pair(const Pose& g1, const NoiseSchedule& sched,
                                  Rng& rng);

// Draw n poses by annealed reverse-time stochastic dynamics over the field.
// Each trajectory consumes its own rng stream, so results are independent of
// batching. Throws std::runtime_error if the field returns non-finite values.
std::vector<Pose> sample_reverse_sde(const BatchFieldFn& score_field, int n,
                                     const SdeSamplerConfig& cfg, Rng& rng);

}  // namespace sg
