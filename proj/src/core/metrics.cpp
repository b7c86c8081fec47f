#include "se3grasp/metrics.hpp"

#include <limits>
#include <stdexcept>

#include "se3grasp/rng.hpp"

namespace sg {

Eigen::MatrixXd cost_matrix(const std::vector<Pose>& a,
                            const std::vector<Pose>& b, double lambda_rot) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("cost_matrix: empty grasp set");
  }
  Eigen::MatrixXd c(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      c(i, j) = geodesic_dist(a[i], b[j], lambda_rot);
    }
  }
  return c;
}

double assignment_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n || n == 0) {
    throw std::invalid_argument("assignment_cost: matrix must be square");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // Shortest augmenting path with potentials, 1-indexed over columns.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    while (j0 != 0) {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    }
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(match[j] - 1, j - 1);
  return total;
}

namespace {

std::vector<Pose> subsample(const std::vector<Pose>& set, size_t target,
                            Rng& rng) {
  if (set.size() <= target) return set;
  // Partial Fisher-Yates: first `target` slots end up uniformly chosen.
  std::vector<Pose> pool = set;
  for (size_t i = 0; i < target; ++i) {
    const size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(target);
  return pool;
}

}  // namespace

double assignment_emd(const std::vector<Pose>& a, const std::vector<Pose>& b,
                      double lambda_rot, std::uint64_t subsample_seed) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("assignment_emd: empty grasp set");
  }
  const size_t n = std::min(a.size(), b.size());
  Rng rng(subsample_seed, 0xE3D);
  const std::vector<Pose> sa = subsample(a, n, rng);
  const std::vector<Pose> sb = subsample(b, n, rng);
  return assignment_cost(cost_matrix(sa, sb, lambda_rot)) /
         static_cast<double>(n);
}

double taxonomy_accuracy(const std::vector<Eigen::VectorXd>& pred_logits,
                         const std::vector<int>& labels) {
  if (pred_logits.empty() || pred_logits.size() != labels.size()) {
    throw std::invalid_argument("taxonomy_accuracy: bad input lengths");
  }
  int hits = 0;
  for (size_t i = 0; i < pred_logits.size(); ++i) {
    int arg = 0;
    pred_logits[i].maxCoeff(&arg);
    if (arg == labels[i]) ++hits;
  }
  return 100.0 * hits / static_cast<double>(pred_logits.size());
}

double contact_accuracy(const std::vector<Eigen::VectorXd>& pred_probs,
                        const std::vector<Eigen::VectorXd>& targets,
                        double threshold) {
  if (pred_probs.empty() || pred_probs.size() != targets.size()) {
    throw std::invalid_argument("contact_accuracy: bad input lengths");
  }
  long hits = 0, total = 0;
  for (size_t i = 0; i < pred_probs.size(); ++i) {
    if (pred_probs[i].size() != targets[i].size()) {
      throw std::invalid_argument("contact_accuracy: region count mismatch");
    }
    for (int r = 0; r < pred_probs[i].size(); ++r) {
      hits += ((pred_probs[i][r] >= threshold) == (targets[i][r] >= 0.5));
      ++total;
    }
  }
  return 100.0 * hits / static_cast<double>(total);
}

}  // namespace sg
