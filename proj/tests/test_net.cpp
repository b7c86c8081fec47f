#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "se3grasp/metrics.hpp"
#include "se3grasp/net.hpp"
#include "support/oracles.hpp"

using namespace sg;

namespace {

NetConfig tiny_config() {
  NetConfig cfg;
  cfg.cond_dim = 5;
  cfg.num_classes = 4;
  cfg.num_regions = 3;
  cfg.codebook_dim = 6;
  cfg.time_embed_dim = 4;
  cfg.hidden = {8, 8};
  cfg.head_hidden = 6;
  return cfg;
}

ConditionBundle random_cond(const NetConfig& cfg, Rng& rng,
                            bool null_flag = false) {
  ConditionBundle c;
  c.feature = Eigen::VectorXd::NullaryExpr(cfg.cond_dim,
                                           [&](int) { return rng.normal(); });
  c.class_label = static_cast<int>(rng.uniform_index(cfg.num_classes));
  c.contact_target = Eigen::VectorXd::NullaryExpr(
      cfg.num_regions, [&](int) { return rng.uniform(); });
  c.null_flag = null_flag;
  return c;
}

TrainItem random_item(const NetConfig& cfg, Rng& rng, bool null_flag = false) {
  TrainItem it;
  it.g = oracle::random_pose(rng, 0.3);
  it.t = rng.uniform(0.05, 1.0);
  it.cond = random_cond(cfg, rng, null_flag);
  it.target_p = rng.normal3();
  it.target_q = rng.normal3();
  return it;
}

}  // namespace

TEST_CASE("time_embed endpoints and distinctness") {
  const Eigen::VectorXd e0 = time_embed(0.0, 8);
  for (int k = 0; k < 4; ++k) {
    CHECK(e0[2 * k] == 0.0);
    CHECK(e0[2 * k + 1] == 1.0);
  }
  const Eigen::VectorXd a = time_embed(0.1, 8);
  const Eigen::VectorXd b = time_embed(0.2, 8);
  const double cos_sim = a.dot(b) / (a.norm() * b.norm());
  CHECK(cos_sim < 1.0 - 1e-6);
}

TEST_CASE("time_embed Lipschitz bound") {
  Rng rng(51);
  const int dim = 8;
  const double bound = std::pow(2.0, dim / 2) * M_PI;
  for (int i = 0; i < 500; ++i) {
    const double t1 = rng.uniform(), t2 = rng.uniform();
    if (std::abs(t1 - t2) < 1e-12) continue;
    const double d = (time_embed(t1, dim) - time_embed(t2, dim)).norm();
    CHECK(d <= bound * std::abs(t1 - t2) + 1e-12);
  }
}

TEST_CASE("codebook_mix saturation, uniform mix, and convex hull") {
  Rng rng(52);
  Eigen::MatrixXd cb(4, 6);
  for (int i = 0; i < cb.size(); ++i) cb(i / 6, i % 6) = rng.normal();

  Eigen::VectorXd logits = Eigen::VectorXd::Zero(4);
  logits[2] = 40.0;  // saturated softmax
  CHECK((codebook_mix(logits, cb) - cb.row(2).transpose()).norm() < 1e-9);

  const Eigen::VectorXd uniform_mix =
      codebook_mix(Eigen::VectorXd::Zero(4), cb);
  CHECK((uniform_mix - cb.colwise().mean().transpose()).norm() < 1e-12);

  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd l =
        Eigen::VectorXd::NullaryExpr(4, [&](int) { return rng.normal() * 3; });
    const Eigen::VectorXd mix = codebook_mix(l, cb);
    for (int d = 0; d < 6; ++d) {
      CHECK(mix[d] >= cb.col(d).minCoeff() - 1e-12);
      CHECK(mix[d] <= cb.col(d).maxCoeff() + 1e-12);
    }
  }
}

TEST_CASE("softmax weights used by codebook_mix form a probability vector") {
  Rng rng(53);
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd l = Eigen::VectorXd::NullaryExpr(
        5, [&](int) { return rng.normal() * 10; });
    // Mixing the identity codebook returns the weights themselves.
    const Eigen::VectorXd pi = codebook_mix(l, eye);
    CHECK(std::abs(pi.sum() - 1.0) < 1e-9);
    CHECK(pi.minCoeff() >= 0.0);
  }
}

TEST_CASE("forward is pure and distinguishes the null token") {
  NetConfig cfg = tiny_config();
  Rng rng(54);
  ModelParams p = init_params(cfg, rng);
  TrainItem it = random_item(cfg, rng);

  ForwardResult a = forward(p, it.g, it.t, it.cond);
  ForwardResult b = forward(p, it.g, it.t, it.cond);
  CHECK((a.out_p - b.out_p).norm() == 0.0);
  CHECK((a.out_q - b.out_q).norm() == 0.0);
  CHECK(a.out_p.allFinite());
  CHECK(a.out_q.allFinite());
  CHECK(a.cls_logits.allFinite());
  CHECK(a.contact_logits.allFinite());

  ConditionBundle null_cond = it.cond;
  null_cond.null_flag = true;
  ForwardResult c = forward(p, it.g, it.t, null_cond);
  CHECK((a.out_p - c.out_p).norm() + (a.out_q - c.out_q).norm() > 1e-8);
}

TEST_CASE("forward rejects mismatched condition shape") {
  NetConfig cfg = tiny_config();
  Rng rng(55);
  ModelParams p = init_params(cfg, rng);
  TrainItem it = random_item(cfg, rng);
  it.cond.feature = Eigen::VectorXd::Zero(cfg.cond_dim + 1);
  CHECK_THROWS_AS(forward(p, it.g, it.t, it.cond), std::invalid_argument);
}

TEST_CASE("loss is zero for a perfect generator prediction") {
  NetConfig cfg = tiny_config();
  Rng rng(56);
  ModelParams p = init_params(cfg, rng);
  std::vector<TrainItem> batch{random_item(cfg, rng), random_item(cfg, rng)};
  for (auto& it : batch) {
    const ForwardResult r = forward(p, it.g, it.t, it.cond);
    it.target_p = r.out_p;
    it.target_q = r.out_q;
  }
  ModelParams grads = zeros_like(p);
  const LossParts parts = loss_and_grad(p, batch, LossWeights{}, &grads);
  CHECK(parts.gen < 1e-20);
}

TEST_CASE("empty batch is rejected") {
  NetConfig cfg = tiny_config();
  Rng rng(57);
  ModelParams p = init_params(cfg, rng);
  ModelParams grads = zeros_like(p);
  std::vector<TrainItem> batch;
  CHECK_THROWS_AS(loss_and_grad(p, batch, LossWeights{}, &grads),
                  std::invalid_argument);
}

TEST_CASE("contact false negatives cost w1 times false positives") {
  NetConfig cfg = tiny_config();
  cfg.num_regions = 1;
  Rng rng(58);
  ModelParams p = init_params(cfg, rng);
  LossWeights w;
  w.lambda_gen = 0.0;
  w.lambda_cls = 0.0;
  w.lambda_cont = 1.0;

  // Force a fixed logit by zeroing the head and setting its bias.
  p.con_w2.setZero();
  const double margin = 1.3;

  TrainItem it = random_item(cfg, rng);
  ModelParams grads = zeros_like(p);

  // False negative: target 1 predicted with probability sigma(-margin).
  p.con_b2(0, 0) = -margin;
  it.cond.contact_target = Eigen::VectorXd::Constant(1, 1.0);
  std::vector<TrainItem> batch{it};
  const double fn = loss_and_grad(p, batch, w, &grads).cont;

  // False positive: target 0 predicted with probability sigma(+margin).
  p.con_b2(0, 0) = margin;
  batch[0].cond.contact_target = Eigen::VectorXd::Constant(1, 0.0);
  const double fp = loss_and_grad(p, batch, w, &grads).cont;

  CHECK(fn / fp == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central finite differences") {
  NetConfig cfg = tiny_config();
  Rng rng(59);
  ModelParams p = init_params(cfg, rng);
  std::vector<TrainItem> batch{random_item(cfg, rng), random_item(cfg, rng),
                               random_item(cfg, rng, /*null=*/true)};
  LossWeights w;

  ModelParams analytic = zeros_like(p);
  loss_and_grad(p, batch, w, &analytic);

  std::vector<Eigen::MatrixXd*> tensors;
  p.visit([&](Eigen::MatrixXd& m) { tensors.push_back(&m); });
  std::vector<Eigen::MatrixXd*> an;
  analytic.visit([&](Eigen::MatrixXd& m) { an.push_back(&m); });

  ModelParams scratch = zeros_like(p);
  const double h = 1e-6;
  for (size_t ti = 0; ti < tensors.size(); ++ti) {
    Eigen::MatrixXd& t = *tensors[ti];
    Eigen::MatrixXd fd(t.rows(), t.cols());
    for (int i = 0; i < t.rows(); ++i) {
      for (int j = 0; j < t.cols(); ++j) {
        const double orig = t(i, j);
        t(i, j) = orig + h;
        const double up = loss_and_grad(p, batch, w, &scratch).total;
        t(i, j) = orig - h;
        const double dn = loss_and_grad(p, batch, w, &scratch).total;
        t(i, j) = orig;
        fd(i, j) = (up - dn) / (2.0 * h);
      }
    }
    const double rel =
        (fd - *an[ti]).norm() / std::max(fd.norm(), 1e-8);
    CAPTURE(ti);
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("adam leaves parameters alone under zero gradients") {
  NetConfig cfg = tiny_config();
  Rng rng(60);
  ModelParams p = init_params(cfg, rng);
  const ModelParams before = p;
  ModelParams zero_grads = zeros_like(p);
  AdamState state = init_adam(p);
  for (int s = 0; s < 5; ++s) adam_step(&p, zero_grads, &state, AdamConfig{});
  double diff = 0.0;
  size_t idx = 0;
  std::vector<const Eigen::MatrixXd*> ref;
  before.visit([&](const Eigen::MatrixXd& m) { ref.push_back(&m); });
  p.visit([&](const Eigen::MatrixXd& m) { diff += (m - *ref[idx++]).norm(); });
  CHECK(diff == 0.0);
  CHECK(state.step == 5);
}

TEST_CASE("adam solves a 1-D quadratic") {
  Eigen::MatrixXd x(1, 1);
  x(0, 0) = -3.0;
  const double target = 1.7;
  AdamConfig cfg;
  cfg.lr = 0.05;
  AdamState state;
  state.m.assign(1, Eigen::MatrixXd::Zero(1, 1));
  state.v.assign(1, Eigen::MatrixXd::Zero(1, 1));
  Eigen::MatrixXd g(1, 1);
  for (int s = 0; s < 500; ++s) {
    g(0, 0) = 2.0 * (x(0, 0) - target);
    adam_update({&x}, {&g}, &state, cfg);
  }
  CHECK(std::abs(x(0, 0) - target) < 1e-6);
}

TEST_CASE("training on a tiny fixed dataset decreases the loss") {
  NetConfig cfg = tiny_config();
  int monotone_seeds = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    ModelParams p = init_params(cfg, rng);
    std::vector<TrainItem> data;
    for (int i = 0; i < 8; ++i) data.push_back(random_item(cfg, rng));

    AdamState state = init_adam(p);
    AdamConfig acfg;
    acfg.lr = 3e-3;
    ModelParams grads = zeros_like(p);
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 50; ++s) {
      const double loss = loss_and_grad(p, data, LossWeights{}, &grads).total;
      if (loss >= prev) monotone = false;
      prev = loss;
      adam_step(&p, grads, &state, acfg);
    }
    if (monotone) ++monotone_seeds;
  }
  CHECK(monotone_seeds >= 9);
}

TEST_CASE("heads reach high accuracy on a separable synthetic set") {
  NetConfig cfg = tiny_config();
  cfg.cond_dim = 8;
  cfg.num_classes = 4;
  cfg.num_regions = 4;
  Rng rng(61);
  ModelParams p = init_params(cfg, rng);

  // Features carry the class and region pattern linearly.
  auto make_item = [&](int cls) {
    TrainItem it;
    it.g = Pose::identity();
    it.t = 0.5;
    it.cond.feature = Eigen::VectorXd::Zero(cfg.cond_dim);
    it.cond.feature[cls] = 2.0;
    it.cond.feature.tail(4) = Eigen::VectorXd::NullaryExpr(
        4, [&](int) { return 0.1 * rng.normal(); });
    it.cond.class_label = cls;
    it.cond.contact_target = Eigen::VectorXd::Zero(cfg.num_regions);
    it.cond.contact_target[(cls + 1) % 4] = 1.0;
    it.target_p = Vec3::Zero();
    it.target_q = Vec3::Zero();
    return it;
  };
  std::vector<TrainItem> data;
  for (int i = 0; i < 64; ++i) data.push_back(make_item(i % 4));

  AdamState state = init_adam(p);
  AdamConfig acfg;
  acfg.lr = 5e-3;
  ModelParams grads = zeros_like(p);
  for (int s = 0; s < 400; ++s) {
    loss_and_grad(p, data, LossWeights{}, &grads);
    adam_step(&p, grads, &state, acfg);
  }

  std::vector<Eigen::VectorXd> logits, probs, targets;
  std::vector<int> labels;
  for (const auto& it : data) {
    const ForwardResult r = forward(p, it.g, it.t, it.cond);
    logits.push_back(r.cls_logits);
    probs.push_back(
        (1.0 / (1.0 + (-r.contact_logits.array()).exp())).matrix());
    targets.push_back(it.cond.contact_target);
    labels.push_back(it.cond.class_label);
  }
  CHECK(taxonomy_accuracy(logits, labels) > 95.0);
  CHECK(contact_accuracy(probs, targets) > 95.0);
}
