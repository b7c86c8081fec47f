#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "se3grasp/lie.hpp"

namespace sg {

// Pairwise weighted SE(3) geodesic costs, entry (i, j) = dist(a_i, b_j).
Eigen::MatrixXd cost_matrix(const std::vector<Pose>& a,
                            const std::vector<Pose>& b, double lambda_rot);

// Exact minimum-cost perfect matching on a square cost matrix
// (shortest-augmenting-path assignment, O(n^3)). Returns the total cost.
double assignment_cost(const Eigen::MatrixXd& cost);

// Earth mover's distance between two grasp sets under the geodesic cost:
// mean cost of the optimal matching. Unequal sets are subsampled to the
// smaller size with the seeded rng.
double assignment_emd(const std::vector<Pose>& a, const std::vector<Pose>& b,
                      double lambda_rot, std::uint64_t subsample_seed = 0);

// Top-1 classification rate, in percent. Throws on empty or mismatched input.
double taxonomy_accuracy(const std::vector<Eigen::VectorXd>& pred_logits,
                         const std::vector<int>& labels);

// Mean per-region binary match rate at the threshold, in percent.
double contact_accuracy(const std::vector<Eigen::VectorXd>& pred_probs,
                        const std::vector<Eigen::VectorXd>& targets,
                        double threshold = 0.5);

}  // namespace sg
