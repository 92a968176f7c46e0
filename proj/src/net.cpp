#include "wicbr/net.hpp"

#include <cmath>
#include <random>

#include "wicbr/util.hpp"

namespace wicbr {

std::string to_string(FuseMode mode) {
  switch (mode) {
    case FuseMode::kCross: return "cross";
    case FuseMode::kSame: return "same";
    case FuseMode::kChannelAttention: return "channel_attention";
  }
  return "?";
}

FuseMode fuse_mode_from_string(const std::string& name) {
  for (auto m : {FuseMode::kCross, FuseMode::kSame, FuseMode::kChannelAttention})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown fuse mode '" + name + "'");
}

void NetConfig::validate() const {
  if (backbone_channels.empty()) throw InvalidArgument("backbone needs at least one stage");
  std::size_t expected = 7;
  for (std::size_t i = 0; i < backbone_channels.size(); ++i) expected *= 2;
  if (image_size != expected)
    throw InvalidArgument("backbone output would not be 7x7: image " + std::to_string(image_size) +
                          " with " + std::to_string(backbone_channels.size()) + " stages");
  for (auto c : backbone_channels)
    if (c == 0) throw InvalidArgument("backbone channel counts must be > 0");
  if (num_classes < 2) throw InvalidArgument("need at least two classes");
  if (attention_kernel % 2 == 0) throw InvalidArgument("attention kernel must be odd");
  if (gn_groups == 0 || fused_channels() % gn_groups != 0)
    throw InvalidArgument("2*C_b must be divisible by the group-norm group count");
  if (!(gate_threshold > 0.0 && gate_threshold < 1.0))
    throw InvalidArgument("gate threshold must lie in (0, 1)");
  if (!(gn_eps > 0) || !(bn_eps > 0)) throw InvalidArgument("norm eps must be > 0");
}

NetConfig NetConfig::desk(std::size_t c_b, std::size_t classes) {
  NetConfig cfg;
  cfg.backbone_channels = {16, 32, 64, c_b, c_b};
  cfg.num_classes = classes;
  return cfg;
}

NetConfig NetConfig::full_width(std::size_t classes) { return desk(512, classes); }

NetConfig NetConfig::toy(std::size_t classes) {
  NetConfig cfg;
  cfg.image_size = 28;
  cfg.backbone_channels = {4, 4};
  cfg.num_classes = classes;
  cfg.gn_groups = 2;
  return cfg;
}

nlohmann::json to_json(const NetConfig& c) {
  return {{"image_size", c.image_size},
          {"backbone_channels", c.backbone_channels},
          {"num_classes", c.num_classes},
          {"attention_kernel", c.attention_kernel},
          {"gn_groups", c.gn_groups},
          {"gn_eps", c.gn_eps},
          {"bn_eps", c.bn_eps},
          {"gate_threshold", c.gate_threshold},
          {"bn_after_each_conv", c.bn_after_each_conv},
          {"fuse_mode", to_string(c.fuse_mode)}};
}

NetConfig net_config_from_json(const nlohmann::json& j) {
  NetConfig c;
  c.image_size = j.value("image_size", c.image_size);
  c.backbone_channels =
      j.value("backbone_channels", c.backbone_channels);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.attention_kernel = j.value("attention_kernel", c.attention_kernel);
  c.gn_groups = j.value("gn_groups", c.gn_groups);
  c.gn_eps = j.value("gn_eps", c.gn_eps);
  c.bn_eps = j.value("bn_eps", c.bn_eps);
  c.gate_threshold = j.value("gate_threshold", c.gate_threshold);
  c.bn_after_each_conv = j.value("bn_after_each_conv", c.bn_after_each_conv);
  c.fuse_mode = fuse_mode_from_string(j.value("fuse_mode", std::string("cross")));
  c.validate();
  return c;
}

BatchNormParams BatchNormParams::identity(std::size_t channels) {
  return {Tensor({channels}, 1.0), Tensor({channels}, 0.0), Tensor({channels}, 0.0),
          Tensor({channels}, 1.0)};
}

namespace {

template <typename Params, typename Fn>
void visit_impl(Params& p, Fn&& fn) {
  auto bn = [&](const std::string& prefix, auto& b) {
    fn(prefix + ".gamma", b.gamma, true);
    fn(prefix + ".beta", b.beta, true);
    fn(prefix + ".running_mean", b.running_mean, false);
    fn(prefix + ".running_var", b.running_var, false);
  };
  auto attention = [&](const std::string& prefix, auto& a) {
    fn(prefix + ".conv1.weight", a.conv1, true);
    bn(prefix + ".bn1", a.bn1);
    fn(prefix + ".conv2.weight", a.conv2, true);
    bn(prefix + ".bn2", a.bn2);
  };
  auto backbone = [&](const std::string& prefix, auto& b) {
    for (std::size_t i = 0; i < b.stages.size(); ++i) {
      fn(prefix + ".stage" + std::to_string(i) + ".weight", b.stages[i].weight, true);
      fn(prefix + ".stage" + std::to_string(i) + ".bias", b.stages[i].bias, true);
    }
  };
  attention("phase_attention", p.phase_attention);
  attention("dfs_attention", p.dfs_attention);
  backbone("phase_backbone", p.phase_backbone);
  backbone("dfs_backbone", p.dfs_backbone);
  fn("saliency.gamma", p.saliency.gamma, true);
  fn("saliency.z", p.saliency.z, true);
  fn("channel_gate.weight", p.channel_gate.weight, true);
  fn("channel_gate.bias", p.channel_gate.bias, true);
  fn("head.weight", p.head.weight, true);
  fn("head.bias", p.head.bias, true);
}

}  // namespace

void ModelParams::visit(const Visitor& fn) { visit_impl(*this, fn); }
void ModelParams::visit(const ConstVisitor& fn) const { visit_impl(*this, fn); }

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  z.visit([](const std::string&, Tensor& t, bool) { t.fill(0.0); });
  return z;
}

std::size_t ModelParams::trainable_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Tensor& t, bool trainable) {
    if (trainable) n += t.size();
  });
  return n;
}

void ModelParams::accumulate(const ModelParams& other) {
  std::vector<const Tensor*> src;
  other.visit([&](const std::string&, const Tensor& t, bool) { src.push_back(&t); });
  std::size_t i = 0;
  visit([&](const std::string& name, Tensor& t, bool) {
    const Tensor& o = *src.at(i++);
    require_same_shape(t, o, name.c_str());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] += o[k];
  });
}

ModelParams init_params(const NetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  auto normal = [&](Shape shape, double std) {
    Tensor t(std::move(shape));
    std::normal_distribution<double> dist(0.0, std);
    for (auto& v : t.data()) v = dist(rng);
    return t;
  };
  const std::size_t k = cfg.attention_kernel;
  auto attention = [&] {
    AttentionBranchParams a;
    const double std = std::sqrt(1.0 / static_cast<double>(3 * k * k));
    a.conv1 = normal({3, 3, k, k}, std);
    a.bn1 = BatchNormParams::identity(3);
    a.conv2 = normal({1, 3, k, k}, std);
    a.bn2 = BatchNormParams::identity(1);
    return a;
  };
  auto backbone = [&] {
    BackboneParams b;
    std::size_t in = 3;
    for (auto out : cfg.backbone_channels) {
      const double std = std::sqrt(2.0 / static_cast<double>(in * 9));
      b.stages.push_back({normal({out, in, 3, 3}, std), Tensor({out}, 0.0)});
      in = out;
    }
    return b;
  };
  ModelParams p;
  p.phase_attention = attention();
  p.dfs_attention = attention();
  p.phase_backbone = backbone();
  p.dfs_backbone = backbone();
  const std::size_t c = cfg.fused_channels();
  p.saliency = {Tensor({c}, 1.0), Tensor({c}, 0.0)};
  p.channel_gate = {Tensor({c}, 1.0), Tensor({c}, 0.0)};
  p.head.weight = normal({cfg.num_classes, c}, std::sqrt(1.0 / static_cast<double>(c)));
  p.head.bias = Tensor({cfg.num_classes}, 0.0);
  return p;
}

// ---- stages -----------------------------------------------------------------

namespace {

void attention_forward(const Tensor& x, const AttentionBranchParams& p, const NetConfig& cfg,
                       AttentionCache& cache) {
  if (x.rank() != 4 || x.dim(1) != 3)
    throw InvalidArgument("spatial_attention expects (N, 3, H, W), got " +
                          shape_string(x.shape()));
  const std::size_t pad = cfg.attention_kernel / 2;
  cache.x = x;
  cache.c1 = ops::conv2d(x, p.conv1, {}, 1, pad);
  cache.c1n = cfg.bn_after_each_conv ? ops::batch_norm(cache.c1, p.bn1.view(cfg.bn_eps)) : cache.c1;
  cache.c2 = ops::conv2d(cache.c1n, p.conv2, {}, 1, pad);
  cache.a = ops::sigmoid(ops::batch_norm(cache.c2, p.bn2.view(cfg.bn_eps)));
  cache.refined = branch_refine(x, cache.a);
}

void backbone_forward_cached(const Tensor& x, const BackboneParams& p, BackboneCache& cache) {
  cache.inputs.clear();
  cache.pre.clear();
  Tensor h = x;
  for (const auto& stage : p.stages) {
    cache.inputs.push_back(h);
    cache.pre.push_back(ops::conv2d(h, stage.weight, stage.bias.data(), 2, 1));
    h = ops::relu(cache.pre.back());
  }
  if (h.dim(2) != 7 || h.dim(3) != 7)
    throw InvalidArgument("backbone output is " + shape_string(h.shape()) + ", expected 7x7");
  cache.out = std::move(h);
}

}  // namespace

Tensor spatial_attention(const Tensor& x, const AttentionBranchParams& p, const NetConfig& cfg) {
  AttentionCache cache;
  attention_forward(x, p, cfg, cache);
  return cache.a;
}

Tensor branch_refine(const Tensor& x, const Tensor& attention) {
  if (x.rank() != 4 || attention.rank() != 4 || attention.dim(1) != 1 ||
      attention.dim(0) != x.dim(0) || attention.dim(2) != x.dim(2) || attention.dim(3) != x.dim(3))
    throw InvalidArgument("branch_refine: attention " + shape_string(attention.shape()) +
                          " does not broadcast over " + shape_string(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  Tensor out(x.shape());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t p = 0; p < plane; ++p) {
        const std::size_t idx = (i * c + ch) * plane + p;
        out[idx] = x[idx] * attention[i * plane + p] + x[idx];
      }
  return out;
}

Tensor backbone_forward(const Tensor& x, const BackboneParams& p) {
  BackboneCache cache;
  backbone_forward_cached(x, p, cache);
  return cache.out;
}

Tensor extract_concat(const Tensor& p_img, const Tensor& d_img, const ModelParams& params,
                      const NetConfig& cfg) {
  AttentionCache pa, da;
  attention_forward(p_img, params.phase_attention, cfg, pa);
  attention_forward(d_img, params.dfs_attention, cfg, da);
  return ops::concat_channels(backbone_forward(pa.refined, params.phase_backbone),
                              backbone_forward(da.refined, params.dfs_backbone));
}

std::vector<double> channel_weights(const Tensor& gamma) {
  double sum = 0.0, mag = 0.0;
  for (double g : gamma.data()) {
    sum += g;
    mag += std::abs(g);
  }
  if (std::abs(sum) <= 1e-12 * std::max(1.0, mag))
    throw InvalidArgument("saliency gamma sums to zero; channel weights are undefined");
  std::vector<double> w(gamma.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = gamma[i] / sum;
  return w;
}

SaliencySplit apply_masks(const Tensor& x_pd, const Tensor& g1) {
  require_same_shape(x_pd, g1, "apply_masks");
  SaliencySplit s;
  s.g1 = g1;
  s.g2 = Tensor(x_pd.shape());
  s.x_s = Tensor(x_pd.shape());
  s.x_w = Tensor(x_pd.shape());
  for (std::size_t i = 0; i < x_pd.size(); ++i) {
    s.g2[i] = 1.0 - g1[i];
    s.x_s[i] = g1[i] * x_pd[i];
    s.x_w[i] = s.g2[i] * x_pd[i];
  }
  return s;
}

SaliencySplit saliency_separate(const Tensor& x_pd, const SaliencyParams& sp,
                                const NetConfig& cfg) {
  if (x_pd.rank() != 4 || x_pd.dim(1) != sp.gamma.size() || sp.z.size() != sp.gamma.size())
    throw InvalidArgument("saliency_separate: X_PD " + shape_string(x_pd.shape()) +
                          " does not match the saliency parameters");
  const auto weights = channel_weights(sp.gamma);
  const Tensor xhat = ops::group_norm(x_pd, cfg.gn_groups, sp.gamma.data(), sp.z.data(), cfg.gn_eps);
  const std::size_t n = x_pd.dim(0), c = x_pd.dim(1), plane = x_pd.dim(2) * x_pd.dim(3);
  Tensor g1(x_pd.shape());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t p = 0; p < plane; ++p) {
        const std::size_t idx = (i * c + ch) * plane + p;
        g1[idx] = ops::sigmoid(weights[ch] * xhat[idx]) > cfg.gate_threshold ? 1.0 : 0.0;
      }
  SaliencySplit s = apply_masks(x_pd, g1);
  s.weights = weights;
  return s;
}

Tensor saliency_fuse(const Tensor& x_s, const Tensor& x_w, FuseMode mode) {
  require_same_shape(x_s, x_w, "saliency_fuse");
  if (x_s.rank() != 4 || x_s.dim(1) % 2 != 0)
    throw InvalidArgument("saliency_fuse needs an even channel count");
  if (mode == FuseMode::kChannelAttention)
    throw InvalidArgument("saliency_fuse: channel-attention mode has no saliency split");
  const std::size_t half = x_s.dim(1) / 2;
  auto [s_p, s_d] = ops::split_channels(x_s, half);
  auto [w_p, w_d] = ops::split_channels(x_w, half);
  if (mode == FuseMode::kCross)
    return ops::concat_channels(ops::add(s_d, w_p), ops::add(w_d, s_p));
  return ops::concat_channels(ops::add(s_p, s_d), ops::add(w_p, w_d));
}

ClassifyResult classify(const Tensor& x_out, const HeadParams& head) {
  ClassifyResult r;
  r.embedding = ops::global_avg_pool(x_out);
  r.logits = ops::linear(r.embedding, head.weight, head.bias.data());
  return r;
}

// ---- full network ---------------------------------------------------------------

ForwardResult forward(const ModelParams& params, const NetConfig& cfg, const Tensor& p_img,
                      const Tensor& d_img, const Tensor* frozen_g1) {
  if (p_img.shape() != d_img.shape())
    throw InvalidArgument("phase and DFS batches must have the same shape");
  ForwardResult f;
  attention_forward(p_img, params.phase_attention, cfg, f.phase_att);
  attention_forward(d_img, params.dfs_attention, cfg, f.dfs_att);
  backbone_forward_cached(f.phase_att.refined, params.phase_backbone, f.phase_bb);
  backbone_forward_cached(f.dfs_att.refined, params.dfs_backbone, f.dfs_bb);
  f.x_pd = ops::concat_channels(f.phase_bb.out, f.dfs_bb.out);

  if (cfg.fuse_mode == FuseMode::kChannelAttention) {
    const Tensor pooled = ops::global_avg_pool(f.x_pd);
    const std::size_t n = f.x_pd.dim(0), c = f.x_pd.dim(1), plane = f.x_pd.dim(2) * f.x_pd.dim(3);
    f.gate_pre = Tensor(pooled.shape());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t ch = 0; ch < c; ++ch)
        f.gate_pre.at(i, ch) =
            params.channel_gate.weight[ch] * pooled.at(i, ch) + params.channel_gate.bias[ch];
    f.gate = ops::sigmoid(f.gate_pre);
    f.x_out = Tensor(f.x_pd.shape());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t p = 0; p < plane; ++p) {
          const std::size_t idx = (i * c + ch) * plane + p;
          f.x_out[idx] = f.x_pd[idx] * f.gate.at(i, ch);
        }
  } else {
    f.split = frozen_g1 ? apply_masks(f.x_pd, *frozen_g1)
                        : saliency_separate(f.x_pd, params.saliency, cfg);
    f.x_out = saliency_fuse(f.split.x_s, f.split.x_w, cfg.fuse_mode);
  }
  auto head = classify(f.x_out, params.head);
  f.embedding = std::move(head.embedding);
  f.logits = std::move(head.logits);
  return f;
}

namespace {

// Returns dL/d(input image) is not needed; accumulates parameter grads only.
void attention_backward(const AttentionCache& c, const AttentionBranchParams& p,
                        const NetConfig& cfg, const Tensor& d_refined,
                        AttentionBranchParams& g) {
  // refined = x * A + x  =>  dA = sum_c d_refined * x
  const std::size_t n = c.x.dim(0), ch = c.x.dim(1), plane = c.x.dim(2) * c.x.dim(3);
  Tensor d_a(c.a.shape());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < ch; ++k)
      for (std::size_t q = 0; q < plane; ++q) {
        const std::size_t idx = (i * ch + k) * plane + q;
        d_a[i * plane + q] += d_refined[idx] * c.x[idx];
      }
  const Tensor d_bn = ops::sigmoid_backward(c.a, d_a);
  const auto bn2 = ops::batch_norm_backward(c.c2, d_bn, p.bn2.view(cfg.bn_eps));
  for (std::size_t i = 0; i < bn2.dgamma.size(); ++i) {
    g.bn2.gamma[i] += bn2.dgamma[i];
    g.bn2.beta[i] += bn2.dbeta[i];
  }
  const std::size_t pad = cfg.attention_kernel / 2;
  auto conv2 = ops::conv2d_backward(c.c1n, p.conv2, bn2.dx, 1, pad, true);
  for (std::size_t i = 0; i < conv2.dw.size(); ++i) g.conv2[i] += conv2.dw[i];
  Tensor d_c1 = std::move(conv2.dx);
  if (cfg.bn_after_each_conv) {
    auto bn1 = ops::batch_norm_backward(c.c1, d_c1, p.bn1.view(cfg.bn_eps));
    for (std::size_t i = 0; i < bn1.dgamma.size(); ++i) {
      g.bn1.gamma[i] += bn1.dgamma[i];
      g.bn1.beta[i] += bn1.dbeta[i];
    }
    d_c1 = std::move(bn1.dx);
  }
  const auto conv1 = ops::conv2d_backward(c.x, p.conv1, d_c1, 1, pad, false);
  for (std::size_t i = 0; i < conv1.dw.size(); ++i) g.conv1[i] += conv1.dw[i];
}

Tensor backbone_backward(const BackboneCache& c, const BackboneParams& p, Tensor d_out,
                         BackboneParams& g) {
  for (std::size_t s = p.stages.size(); s-- > 0;) {
    const Tensor d_pre = ops::relu_backward(c.pre[s], d_out);
    auto conv = ops::conv2d_backward(c.inputs[s], p.stages[s].weight, d_pre, 2, 1, true);
    for (std::size_t i = 0; i < conv.dw.size(); ++i) g.stages[s].weight[i] += conv.dw[i];
    for (std::size_t i = 0; i < conv.db.size(); ++i) g.stages[s].bias[i] += conv.db[i];
    d_out = std::move(conv.dx);
  }
  return d_out;
}

}  // namespace

ModelParams backward(const ModelParams& params, const NetConfig& cfg, const ForwardResult& f,
                     const Tensor& d_logits, const Tensor& d_embedding) {
  ModelParams g = params.zeros_like();

  Tensor d_emb(f.embedding.shape());
  if (!d_embedding.empty()) {
    require_same_shape(d_embedding, f.embedding, "backward: d_embedding");
    d_emb = d_embedding;
  }
  if (!d_logits.empty()) {
    require_same_shape(d_logits, f.logits, "backward: d_logits");
    const auto lin = ops::linear_backward(f.embedding, params.head.weight, d_logits);
    for (std::size_t i = 0; i < lin.dw.size(); ++i) g.head.weight[i] += lin.dw[i];
    for (std::size_t i = 0; i < lin.db.size(); ++i) g.head.bias[i] += lin.db[i];
    for (std::size_t i = 0; i < d_emb.size(); ++i) d_emb[i] += lin.dx[i];
  }
  const Tensor d_xout = ops::global_avg_pool_backward(d_emb, f.x_out.shape());

  const std::size_t n = f.x_pd.dim(0), c = f.x_pd.dim(1), plane = f.x_pd.dim(2) * f.x_pd.dim(3);
  Tensor d_xpd(f.x_pd.shape());
  if (cfg.fuse_mode == FuseMode::kChannelAttention) {
    Tensor d_gate(f.gate.shape());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t ch = 0; ch < c; ++ch)
        for (std::size_t p = 0; p < plane; ++p) {
          const std::size_t idx = (i * c + ch) * plane + p;
          d_xpd[idx] = d_xout[idx] * f.gate.at(i, ch);
          d_gate.at(i, ch) += d_xout[idx] * f.x_pd[idx];
        }
    const Tensor d_pre = ops::sigmoid_backward(f.gate, d_gate);
    const Tensor pooled = ops::global_avg_pool(f.x_pd);
    Tensor d_pooled(pooled.shape());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t ch = 0; ch < c; ++ch) {
        g.channel_gate.weight[ch] += d_pre.at(i, ch) * pooled.at(i, ch);
        g.channel_gate.bias[ch] += d_pre.at(i, ch);
        d_pooled.at(i, ch) = d_pre.at(i, ch) * params.channel_gate.weight[ch];
      }
    const Tensor d_from_pool = ops::global_avg_pool_backward(d_pooled, f.x_pd.shape());
    for (std::size_t i = 0; i < d_xpd.size(); ++i) d_xpd[i] += d_from_pool[i];
  } else {
    // Route dX_out back to X^S / X^W, then through the (constant) masks.
    const std::size_t half = c / 2;
    auto [d_y1, d_y2] = ops::split_channels(d_xout, half);
    Tensor d_xs, d_xw;
    if (cfg.fuse_mode == FuseMode::kCross) {
      d_xs = ops::concat_channels(d_y2, d_y1);  // (P part <- Y2, D part <- Y1)
      d_xw = ops::concat_channels(d_y1, d_y2);
    } else {
      d_xs = ops::concat_channels(d_y1, d_y1);
      d_xw = ops::concat_channels(d_y2, d_y2);
    }
    for (std::size_t i = 0; i < d_xpd.size(); ++i)
      d_xpd[i] = f.split.g1[i] * d_xs[i] + f.split.g2[i] * d_xw[i];
  }

  auto [d_feat_p, d_feat_d] = ops::split_channels(d_xpd, cfg.c_b());
  const Tensor d_ref_p = backbone_backward(f.phase_bb, params.phase_backbone, std::move(d_feat_p),
                                           g.phase_backbone);
  const Tensor d_ref_d = backbone_backward(f.dfs_bb, params.dfs_backbone, std::move(d_feat_d),
                                           g.dfs_backbone);
  attention_backward(f.phase_att, params.phase_attention, cfg, d_ref_p, g.phase_attention);
  attention_backward(f.dfs_att, params.dfs_attention, cfg, d_ref_d, g.dfs_attention);
  return g;
}

Tensor image_batch(const std::vector<const std::vector<double>*>& planes, std::size_t size) {
  const std::size_t plane = size * size;
  Tensor t({planes.size(), 3, size, size});
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (planes[i]->size() != plane) throw InvalidArgument("image plane has the wrong size");
    for (std::size_t c = 0; c < 3; ++c)
      std::copy(planes[i]->begin(), planes[i]->end(), t.ptr() + (i * 3 + c) * plane);
  }
  return t;
}

}  // namespace wicbr
