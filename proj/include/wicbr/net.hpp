#pragma once

// Two-branch attention network with saliency-gated cross fusion.
//
//   phase image -> spatial attention -> refine -> backbone^P --+
//                                                              concat -> X_PD
//   DFS image   -> spatial attention -> refine -> backbone^D --+
//   X_PD -> group norm -> gamma-weighted sigmoid -> hard gate (G1, G2)
//        -> X^S = G1 * X_PD, X^W = G2 * X_PD -> cross fusion -> X_out
//   X_out -> global average pool -> embedding -> linear head -> logits
//
// The gate is a hard threshold. In backward it is a constant: no gradient
// reaches the group-norm affine through it.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wicbr/tensor.hpp"

namespace wicbr {

enum class FuseMode {
  kCross,             // Y1 = X^S_D + X^W_P, Y2 = X^W_D + X^S_P
  kSame,              // Y1 = X^S_P + X^S_D, Y2 = X^W_P + X^W_D
  kChannelAttention,  // per-channel sigmoid gate on X_PD, no saliency split
};

std::string to_string(FuseMode mode);
FuseMode fuse_mode_from_string(const std::string& name);

struct NetConfig {
  std::size_t image_size = 224;
  /// Output channels of the stride-2 backbone stages; the last entry is C_b.
  /// image_size must equal 7 * 2^stages.
  std::vector<std::size_t> backbone_channels{16, 32, 64, 32, 32};
  std::size_t num_classes = 6;
  std::size_t attention_kernel = 7;
  std::size_t gn_groups = 16;
  double gn_eps = 1e-5;
  double bn_eps = 1e-5;
  double gate_threshold = 0.5;
  bool bn_after_each_conv = false;
  FuseMode fuse_mode = FuseMode::kCross;

  std::size_t c_b() const { return backbone_channels.back(); }
  std::size_t fused_channels() const { return 2 * c_b(); }
  void validate() const;

  /// Desk-scale network: 3->16->32->64->C_b->C_b.
  static NetConfig desk(std::size_t c_b = 32, std::size_t classes = 6);
  /// Full-width head: C_b = 512, so X_PD is 1024 x 7 x 7.
  static NetConfig full_width(std::size_t classes = 6);
  /// 28x28 inputs, two stages, C_b = 4 (X_PD has 8 channels): for finite differences.
  static NetConfig toy(std::size_t classes = 6);
};

nlohmann::json to_json(const NetConfig& cfg);
NetConfig net_config_from_json(const nlohmann::json& j);

struct BatchNormParams {
  Tensor gamma, beta, running_mean, running_var;

  static BatchNormParams identity(std::size_t channels);
  ops::BatchNormView view(double eps) const {
    return {gamma.data(), beta.data(), running_mean.data(), running_var.data(), eps};
  }
};

struct AttentionBranchParams {
  Tensor conv1;         // (3, 3, k, k)
  BatchNormParams bn1;  // only used when bn_after_each_conv
  Tensor conv2;         // (1, 3, k, k)
  BatchNormParams bn2;
};

struct BackboneStage {
  Tensor weight;  // (out, in, 3, 3), stride 2, pad 1
  Tensor bias;    // (out)
};

struct BackboneParams {
  std::vector<BackboneStage> stages;
};

struct SaliencyParams {
  Tensor gamma;  // (2 C_b), group-norm scale; also the channel-importance source
  Tensor z;      // (2 C_b), group-norm shift
};

struct ChannelGateParams {
  Tensor weight;  // (2 C_b)
  Tensor bias;    // (2 C_b)
};

struct HeadParams {
  Tensor weight;  // (R, 2 C_b); rows are the class proxies
  Tensor bias;    // (R)
};

struct ModelParams {
  AttentionBranchParams phase_attention, dfs_attention;
  BackboneParams phase_backbone, dfs_backbone;
  SaliencyParams saliency;
  ChannelGateParams channel_gate;
  HeadParams head;

  using Visitor = std::function<void(const std::string& name, Tensor& t, bool trainable)>;
  using ConstVisitor =
      std::function<void(const std::string& name, const Tensor& t, bool trainable)>;
  /// Visits every array under a stable dotted name, in a fixed order.
  void visit(const Visitor& fn);
  void visit(const ConstVisitor& fn) const;

  ModelParams zeros_like() const;
  std::size_t trainable_count() const;
  /// Elementwise this += other over every array.
  void accumulate(const ModelParams& other);
};

/// Seeded initialization: He-normal backbone, small-normal attention kernels,
/// identity norms, gamma = 1 and z = 0 in the saliency group norm.
ModelParams init_params(const NetConfig& cfg, std::uint64_t seed);

// ---- stages -----------------------------------------------------------------

/// A = sigmoid(BN(conv7(conv7(x)))), x: (N, 3, S, S) -> (N, 1, S, S).
Tensor spatial_attention(const Tensor& x, const AttentionBranchParams& p, const NetConfig& cfg);

/// out = x * A + x with A (N, 1, H, W) broadcast over x's channels.
Tensor branch_refine(const Tensor& x, const Tensor& attention);

/// Stride-2 conv + ReLU stages down to (N, C_b, 7, 7).
Tensor backbone_forward(const Tensor& x, const BackboneParams& p);

/// Concat(backbone^P(refine(P)), backbone^D(refine(D))) -> (N, 2 C_b, 7, 7).
Tensor extract_concat(const Tensor& p_img, const Tensor& d_img, const ModelParams& params,
                      const NetConfig& cfg);

struct SaliencySplit {
  Tensor g1, g2;   // binary masks, same shape as X_PD
  Tensor x_s, x_w; // G1 * X_PD, G2 * X_PD
  std::vector<double> weights;  // gamma_i / sum_j gamma_j
};

/// Throws InvalidArgument when sum(gamma) is (numerically) zero.
std::vector<double> channel_weights(const Tensor& gamma);

SaliencySplit saliency_separate(const Tensor& x_pd, const SaliencyParams& sp,
                                const NetConfig& cfg);
/// Split of X_PD under externally supplied G1 (G2 = 1 - G1).
SaliencySplit apply_masks(const Tensor& x_pd, const Tensor& g1);

Tensor saliency_fuse(const Tensor& x_s, const Tensor& x_w, FuseMode mode = FuseMode::kCross);

struct ClassifyResult {
  Tensor embedding;  // (N, 2 C_b)
  Tensor logits;     // (N, R)
};

ClassifyResult classify(const Tensor& x_out, const HeadParams& head);

// ---- full network -------------------------------------------------------------

struct AttentionCache {
  Tensor x, c1, c1n, c2, a, refined;
};

struct BackboneCache {
  std::vector<Tensor> inputs;  // input of each stage
  std::vector<Tensor> pre;     // pre-activation of each stage
  Tensor out;
};

struct ForwardResult {
  AttentionCache phase_att, dfs_att;
  BackboneCache phase_bb, dfs_bb;
  Tensor x_pd;
  SaliencySplit split;   // empty masks in channel-attention mode
  Tensor gate_pre, gate; // channel-attention mode only, (N, 2 C_b)
  Tensor x_out;
  Tensor embedding;
  Tensor logits;
};

/// Full forward on (N, 3, S, S) image batches. When `frozen_g1` is given the
/// saliency mask is taken from it instead of being recomputed.
ForwardResult forward(const ModelParams& params, const NetConfig& cfg, const Tensor& p_img,
                      const Tensor& d_img, const Tensor* frozen_g1 = nullptr);

/// Gradients of a scalar loss given dL/dlogits and dL/dembedding (either may be
/// empty). Returns a gradient tree with the shape of `params`.
ModelParams backward(const ModelParams& params, const NetConfig& cfg, const ForwardResult& fwd,
                     const Tensor& d_logits, const Tensor& d_embedding);

/// (N, 3, S, S) batch from single-plane grayscale images (each S*S).
Tensor image_batch(const std::vector<const std::vector<double>*>& planes, std::size_t size);

}  // namespace wicbr
