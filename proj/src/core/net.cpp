#include "se3grasp/net.hpp"

#include <cmath>
#include <stdexcept>

namespace sg {

namespace {

Eigen::MatrixXd silu(const Eigen::MatrixXd& z) {
  return z.array() / (1.0 + (-z.array()).exp());
}

Eigen::MatrixXd silu_grad(const Eigen::MatrixXd& z) {
  const auto sig = 1.0 / (1.0 + (-z.array()).exp());
  return (sig * (1.0 + z.array() * (1.0 - sig))).matrix();
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp();
  return e / e.sum();
}

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Eigen::MatrixXd gaussian(int rows, int cols, double scale, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

Eigen::RowVectorXd pose_encoding(const Pose& g) {
  Eigen::RowVectorXd enc(NetConfig::kPoseDim);
  enc.segment<3>(0) = g.p.transpose();
  const Mat3 r = g.q.toRotationMatrix();
  for (int i = 0; i < 3; ++i) enc.segment<3>(3 + 3 * i) = r.row(i);
  return enc;
}

// Forward pass state shared by training and inference paths.
struct TrunkCache {
  Eigen::MatrixXd x0;
  std::vector<Eigen::MatrixXd> z;  // pre-activation per layer
  std::vector<Eigen::MatrixXd> a;  // activation per layer (a[0] = x0)
};

void trunk_forward(const ModelParams& p, const Eigen::MatrixXd& x0,
                   TrunkCache* cache, Eigen::MatrixXd* out_p,
                   Eigen::MatrixXd* out_q) {
  const size_t layers = p.trunk_w.size();
  Eigen::MatrixXd a = x0;
  if (cache) {
    cache->x0 = x0;
    cache->z.resize(layers);
    cache->a.assign(1, x0);
  }
  for (size_t i = 0; i < layers; ++i) {
    Eigen::MatrixXd z =
        (a * p.trunk_w[i]).rowwise() + p.trunk_b[i].row(0);
    a = silu(z);
    if (cache) {
      cache->z[i] = std::move(z);
      cache->a.push_back(a);
    }
  }
  *out_p = (a * p.head_p_w).rowwise() + p.head_p_b.row(0);
  *out_q = (a * p.head_q_w).rowwise() + p.head_q_b.row(0);
}

}  // namespace

Eigen::VectorXd time_embed(double t, int dim) {
  if (dim % 2 != 0) throw std::invalid_argument("time_embed: dim must be even");
  Eigen::VectorXd e(dim);
  for (int k = 0; k < dim / 2; ++k) {
    const double arg = std::ldexp(M_PI * t, k);  // 2^k * pi * t
    e[2 * k] = std::sin(arg);
    e[2 * k + 1] = std::cos(arg);
  }
  return e;
}

Eigen::VectorXd codebook_mix(const Eigen::VectorXd& logits,
                             const Eigen::MatrixXd& codebook) {
  return codebook.transpose() * softmax(logits);
}

ModelParams init_params(const NetConfig& cfg, Rng& rng) {
  ModelParams p;
  p.cfg = cfg;
  int in = cfg.trunk_input_dim();
  for (int h : cfg.hidden) {
    p.trunk_w.push_back(gaussian(in, h, 1.0 / std::sqrt(in), rng));
    p.trunk_b.push_back(Eigen::MatrixXd::Zero(1, h));
    in = h;
  }
  const double hs = 1.0 / std::sqrt(in);
  p.head_p_w = gaussian(in, 3, hs, rng);
  p.head_p_b = Eigen::MatrixXd::Zero(1, 3);
  p.head_q_w = gaussian(in, 3, hs, rng);
  p.head_q_b = Eigen::MatrixXd::Zero(1, 3);

  const double cs = 1.0 / std::sqrt(cfg.cond_dim);
  const double hhs = 1.0 / std::sqrt(cfg.head_hidden);
  p.cls_w1 = gaussian(cfg.cond_dim, cfg.head_hidden, cs, rng);
  p.cls_b1 = Eigen::MatrixXd::Zero(1, cfg.head_hidden);
  p.cls_w2 = gaussian(cfg.head_hidden, cfg.num_classes, hhs, rng);
  p.cls_b2 = Eigen::MatrixXd::Zero(1, cfg.num_classes);
  p.con_w1 = gaussian(cfg.cond_dim, cfg.head_hidden, cs, rng);
  p.con_b1 = Eigen::MatrixXd::Zero(1, cfg.head_hidden);
  p.con_w2 = gaussian(cfg.head_hidden, cfg.num_regions, hhs, rng);
  p.con_b2 = Eigen::MatrixXd::Zero(1, cfg.num_regions);

  p.codebook = gaussian(cfg.num_classes, cfg.codebook_dim, 0.1, rng);
  p.null_feature = gaussian(1, cfg.cond_dim, 0.01, rng);
  p.null_gamma = gaussian(1, cfg.codebook_dim, 0.01, rng);
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams g = params;
  g.visit([](Eigen::MatrixXd& m) { m.setZero(); });
  return g;
}

ForwardResult forward(const ModelParams& p, const Pose& g, double t,
                      const ConditionBundle& cond) {
  const NetConfig& cfg = p.cfg;
  if (cond.feature.size() != cfg.cond_dim) {
    throw std::invalid_argument("forward: condition feature dim mismatch");
  }
  ForwardResult r;

  const Eigen::RowVectorXd f = cond.feature.transpose();
  Eigen::RowVectorXd h1c = silu((f * p.cls_w1) + p.cls_b1.row(0));
  r.cls_logits = ((h1c * p.cls_w2) + p.cls_b2.row(0)).transpose();
  Eigen::RowVectorXd h1n = silu((f * p.con_w1) + p.con_b1.row(0));
  r.contact_logits = ((h1n * p.con_w2) + p.con_b2.row(0)).transpose();

  Eigen::RowVectorXd gamma_hat =
      cond.null_flag ? Eigen::RowVectorXd(p.null_gamma.row(0))
                     : Eigen::RowVectorXd(
                           codebook_mix(r.cls_logits, p.codebook).transpose());
  const Eigen::RowVectorXd feat_in =
      cond.null_flag ? Eigen::RowVectorXd(p.null_feature.row(0)) : f;

  Eigen::MatrixXd x0(1, cfg.trunk_input_dim());
  x0 << pose_encoding(g), time_embed(t, cfg.time_embed_dim).transpose(),
      feat_in, gamma_hat;

  Eigen::MatrixXd op, oq;
  trunk_forward(p, x0, nullptr, &op, &oq);
  r.out_p = op.row(0).transpose();
  r.out_q = oq.row(0).transpose();
  return r;
}

void forward_field(const ModelParams& p, std::span<const Pose> poses, double t,
                   const ConditionBundle& cond, Eigen::MatrixXd* out_p,
                   Eigen::MatrixXd* out_q) {
  const NetConfig& cfg = p.cfg;
  const int b = static_cast<int>(poses.size());

  Eigen::RowVectorXd feat_in, gamma_hat;
  if (cond.null_flag) {
    feat_in = p.null_feature.row(0);
    gamma_hat = p.null_gamma.row(0);
  } else {
    const Eigen::RowVectorXd f = cond.feature.transpose();
    Eigen::RowVectorXd h1c = silu((f * p.cls_w1) + p.cls_b1.row(0));
    Eigen::VectorXd logits = ((h1c * p.cls_w2) + p.cls_b2.row(0)).transpose();
    feat_in = f;
    gamma_hat = codebook_mix(logits, p.codebook).transpose();
  }
  const Eigen::RowVectorXd te = time_embed(t, cfg.time_embed_dim).transpose();

  Eigen::MatrixXd x0(b, cfg.trunk_input_dim());
  for (int i = 0; i < b; ++i) {
    x0.row(i) << pose_encoding(poses[i]), te, feat_in, gamma_hat;
  }
  trunk_forward(p, x0, nullptr, out_p, out_q);
}

LossParts loss_and_grad(const ModelParams& p, std::span<const TrainItem> batch,
                        const LossWeights& weights, ModelParams* grads) {
  const NetConfig& cfg = p.cfg;
  const int b = static_cast<int>(batch.size());
  if (b == 0) throw std::invalid_argument("loss_and_grad: empty batch");
  *grads = zeros_like(p);

  // ---- assemble batch matrices --------------------------------------
  Eigen::MatrixXd feats(b, cfg.cond_dim);
  Eigen::MatrixXd targets_p(b, 3), targets_q(b, 3);
  Eigen::MatrixXd contact_t(b, cfg.num_regions);
  std::vector<int> labels(b);
  std::vector<bool> is_null(b);
  for (int i = 0; i < b; ++i) {
    const TrainItem& it = batch[i];
    if (it.cond.feature.size() != cfg.cond_dim ||
        it.cond.contact_target.size() != cfg.num_regions ||
        it.cond.class_label < 0 || it.cond.class_label >= cfg.num_classes) {
      throw std::invalid_argument("loss_and_grad: condition shape mismatch");
    }
    feats.row(i) = it.cond.feature.transpose();
    targets_p.row(i) = it.target_p.transpose();
    targets_q.row(i) = it.target_q.transpose();
    contact_t.row(i) = it.cond.contact_target.transpose();
    labels[i] = it.cond.class_label;
    is_null[i] = it.cond.null_flag;
  }

  // ---- condition heads ----------------------------------------------
  Eigen::MatrixXd z1c = (feats * p.cls_w1).rowwise() + p.cls_b1.row(0);
  Eigen::MatrixXd h1c = silu(z1c);
  Eigen::MatrixXd cls_logits = (h1c * p.cls_w2).rowwise() + p.cls_b2.row(0);
  Eigen::MatrixXd pi(b, cfg.num_classes);
  for (int i = 0; i < b; ++i)
    pi.row(i) = softmax(cls_logits.row(i).transpose()).transpose();
  Eigen::MatrixXd gamma_hat = pi * p.codebook;

  Eigen::MatrixXd z1n = (feats * p.con_w1).rowwise() + p.con_b1.row(0);
  Eigen::MatrixXd h1n = silu(z1n);
  Eigen::MatrixXd con_logits = (h1n * p.con_w2).rowwise() + p.con_b2.row(0);

  // ---- trunk ----------------------------------------------------------
  Eigen::MatrixXd x0(b, cfg.trunk_input_dim());
  for (int i = 0; i < b; ++i) {
    const Eigen::RowVectorXd feat_in =
        is_null[i] ? Eigen::RowVectorXd(p.null_feature.row(0))
                   : Eigen::RowVectorXd(feats.row(i));
    const Eigen::RowVectorXd gam_in =
        is_null[i] ? Eigen::RowVectorXd(p.null_gamma.row(0))
                   : Eigen::RowVectorXd(gamma_hat.row(i));
    x0.row(i) << pose_encoding(batch[i].g),
        time_embed(batch[i].t, cfg.time_embed_dim).transpose(), feat_in,
        gam_in;
  }
  TrunkCache cache;
  Eigen::MatrixXd out_p, out_q;
  trunk_forward(p, x0, &cache, &out_p, &out_q);

  // ---- losses ---------------------------------------------------------
  LossParts parts;
  const Eigen::MatrixXd rp = out_p - targets_p;
  const Eigen::MatrixXd rq = out_q - targets_q;
  parts.gen = (rp.squaredNorm() + rq.squaredNorm()) / b;

  for (int i = 0; i < b; ++i) {
    const double m = cls_logits.row(i).maxCoeff();
    const double lse =
        m + std::log((cls_logits.row(i).array() - m).exp().sum());
    parts.cls += (lse - cls_logits(i, labels[i])) / b;
  }

  const double w1 = weights.contact_pos_weight;
  for (int i = 0; i < b; ++i) {
    for (int r = 0; r < cfg.num_regions; ++r) {
      const double z = con_logits(i, r);
      const double c = contact_t(i, r);
      parts.cont +=
          (w1 * c * softplus(-z) + (1.0 - c) * softplus(z)) /
          (b * cfg.num_regions);
    }
  }
  parts.total = weights.lambda_gen * parts.gen + weights.lambda_cls * parts.cls +
                weights.lambda_cont * parts.cont;

  // ---- backward: generation heads and trunk ---------------------------
  const double gen_scale = 2.0 * weights.lambda_gen / b;
  Eigen::MatrixXd d_out_p = gen_scale * rp;
  Eigen::MatrixXd d_out_q = gen_scale * rq;

  const Eigen::MatrixXd& a_last = cache.a.back();
  grads->head_p_w = a_last.transpose() * d_out_p;
  grads->head_p_b = d_out_p.colwise().sum();
  grads->head_q_w = a_last.transpose() * d_out_q;
  grads->head_q_b = d_out_q.colwise().sum();

  Eigen::MatrixXd da = d_out_p * p.head_p_w.transpose() +
                       d_out_q * p.head_q_w.transpose();
  for (int i = static_cast<int>(p.trunk_w.size()) - 1; i >= 0; --i) {
    Eigen::MatrixXd dz = da.cwiseProduct(silu_grad(cache.z[i]));
    grads->trunk_w[i] = cache.a[i].transpose() * dz;
    grads->trunk_b[i] = dz.colwise().sum();
    da = dz * p.trunk_w[i].transpose();
  }

  // Split the trunk-input gradient into its condition blocks.
  const int feat_off = NetConfig::kPoseDim + cfg.time_embed_dim;
  const int gam_off = feat_off + cfg.cond_dim;
  Eigen::MatrixXd d_gamma = Eigen::MatrixXd::Zero(b, cfg.codebook_dim);
  for (int i = 0; i < b; ++i) {
    if (is_null[i]) {
      grads->null_feature += da.row(i).segment(feat_off, cfg.cond_dim);
      grads->null_gamma += da.row(i).segment(gam_off, cfg.codebook_dim);
    } else {
      d_gamma.row(i) = da.row(i).segment(gam_off, cfg.codebook_dim);
    }
  }

  // ---- backward: codebook mixture and classifier head -----------------
  Eigen::MatrixXd d_cls_logits = Eigen::MatrixXd::Zero(b, cfg.num_classes);
  for (int i = 0; i < b; ++i) {
    if (!is_null[i]) {
      grads->codebook += pi.row(i).transpose() * d_gamma.row(i);
      const Eigen::VectorXd dpi = p.codebook * d_gamma.row(i).transpose();
      const double inner = dpi.dot(pi.row(i).transpose());
      d_cls_logits.row(i) =
          (pi.row(i).array() * (dpi.transpose().array() - inner)).matrix();
    }
    // Cross-entropy gradient: softmax minus one-hot.
    d_cls_logits.row(i) += (weights.lambda_cls / b) * pi.row(i);
    d_cls_logits(i, labels[i]) -= weights.lambda_cls / b;
  }

  grads->cls_w2 = h1c.transpose() * d_cls_logits;
  grads->cls_b2 = d_cls_logits.colwise().sum();
  Eigen::MatrixXd dh1c =
      (d_cls_logits * p.cls_w2.transpose()).cwiseProduct(silu_grad(z1c));
  grads->cls_w1 = feats.transpose() * dh1c;
  grads->cls_b1 = dh1c.colwise().sum();

  // ---- backward: contact head ----------------------------------------
  Eigen::MatrixXd d_con_logits(b, cfg.num_regions);
  const double cont_scale = weights.lambda_cont / (b * cfg.num_regions);
  for (int i = 0; i < b; ++i) {
    for (int r = 0; r < cfg.num_regions; ++r) {
      const double sig = 1.0 / (1.0 + std::exp(-con_logits(i, r)));
      const double c = contact_t(i, r);
      d_con_logits(i, r) =
          cont_scale * (-w1 * c * (1.0 - sig) + (1.0 - c) * sig);
    }
  }
  grads->con_w2 = h1n.transpose() * d_con_logits;
  grads->con_b2 = d_con_logits.colwise().sum();
  Eigen::MatrixXd dh1n =
      (d_con_logits * p.con_w2.transpose()).cwiseProduct(silu_grad(z1n));
  grads->con_w1 = feats.transpose() * dh1n;
  grads->con_b1 = dh1n.colwise().sum();

  return parts;
}

AdamState init_adam(const ModelParams& params) {
  AdamState s;
  params.visit([&](const Eigen::MatrixXd& m) {
    s.m.push_back(Eigen::MatrixXd::Zero(m.rows(), m.cols()));
    s.v.push_back(Eigen::MatrixXd::Zero(m.rows(), m.cols()));
  });
  return s;
}

void adam_update(const std::vector<Eigen::MatrixXd*>& params,
                 const std::vector<const Eigen::MatrixXd*>& grads,
                 AdamState* state, const AdamConfig& cfg) {
  ++state->step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, state->step);
  const double bc2 = 1.0 - std::pow(cfg.beta2, state->step);
  for (size_t i = 0; i < params.size(); ++i) {
    const Eigen::MatrixXd& g = *grads[i];
    Eigen::MatrixXd& m = state->m[i];
    Eigen::MatrixXd& v = state->v[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    const Eigen::ArrayXXd mhat = m.array() / bc1;
    const Eigen::ArrayXXd vhat = v.array() / bc2;
    params[i]->array() -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
  }
}

void adam_step(ModelParams* params, const ModelParams& grads, AdamState* state,
               const AdamConfig& cfg) {
  std::vector<Eigen::MatrixXd*> ws;
  std::vector<const Eigen::MatrixXd*> gs;
  params->visit([&](Eigen::MatrixXd& w) { ws.push_back(&w); });
  grads.visit([&](const Eigen::MatrixXd& g) { gs.push_back(&g); });
  adam_update(ws, gs, state, cfg);
}

}  // namespace sg
