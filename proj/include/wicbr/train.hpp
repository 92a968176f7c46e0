#pragma once

// Desk-scale training loop, domain splits, metrics and the cross-domain
// stability probe.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wicbr/csi_model.hpp"
#include "wicbr/loss.hpp"
#include "wicbr/net.hpp"
#include "wicbr/preprocess.hpp"

namespace wicbr {

struct TrainConfig {
  double lr = 1e-4;
  std::size_t batch = 10;
  std::size_t epochs = 10;
  std::uint64_t seed = 7;
  double beta = 0.1;
  double tau = 0.1;
  bool cosine = false;
  /// Fraction of the training set re-scored each epoch (it is still trained on).
  double val_fraction = 0.1;

  NetConfig net = NetConfig::desk();

  bool no_dfs = false;
  bool no_phase = false;
  bool no_contrastive = false;

  /// beta actually applied: 0 under no_contrastive.
  double effective_beta() const { return no_contrastive ? 0.0 : beta; }
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
/// Missing keys keep their defaults. Accepts "channel_attention": true as an
/// alias for fuse_mode = channel_attention.
TrainConfig train_config_from_json(const nlohmann::json& j);

/// One preprocessed example: a grayscale phase plane and DFS plane of
/// net.image_size^2 values each.
struct Sample {
  std::string id;
  std::size_t label = 0;
  DomainTag tag;
  std::vector<double> phase;
  std::vector<double> dfs;
};

/// Preprocesses every recording (in parallel) into samples.
std::vector<Sample> build_samples(const std::vector<LabeledRecording>& data,
                                  const PreprocessOptions& opt = {});

enum class SplitKind { kInDomain, kCrossLocation, kCrossOrientation, kCrossEnvironment };

std::string to_string(SplitKind kind);
/// Accepts "id", "cl", "co", "ce" and the long names.
SplitKind split_kind_from_string(const std::string& name);

struct SplitProtocol {
  SplitKind kind = SplitKind::kInDomain;
  int held_out = 0;             // tag component value sent to test (cross_* only)
  double train_fraction = 0.8;  // in_domain only
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// in_domain: stratified per class, shuffled under `seed`. cross_*: every
/// sample whose tag component equals held_out goes to test. Throws if either
/// side would be empty or the held-out value does not occur.
SplitIndices split(const std::vector<Sample>& data, const SplitProtocol& protocol,
                   std::uint64_t seed);

/// Stratified k-fold: fold f tests on every k-th shuffled sample of each class.
std::vector<SplitIndices> kfold(const std::vector<Sample>& data, std::size_t folds,
                                std::uint64_t seed);

std::vector<Sample> subset(const std::vector<Sample>& data, const std::vector<std::size_t>& idx);

struct EpochLog {
  std::size_t epoch = 0;
  double ce = 0.0;
  double con = 0.0;
  double total = 0.0;
  double val_acc = 0.0;
};

nlohmann::json to_json(const EpochLog& e);

/// Raised when a batch produces a non-finite loss. `dump` describes the batch.
class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss(const std::string& what, nlohmann::json dump)
      : std::runtime_error(what), dump(std::move(dump)) {}
  nlohmann::json dump;
};

struct FitResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

/// Adam (0.9 / 0.999 / 1e-8) over shuffled mini-batches. Per-sample gradients
/// are summed in batch order, so results do not depend on the worker count.
/// When `log_stream` is given one JSON line per epoch is written to it.
FitResult fit(const std::vector<Sample>& train, const TrainConfig& cfg,
              std::ostream* log_stream = nullptr);

/// Same, starting from given parameters.
FitResult fit(const std::vector<Sample>& train, const TrainConfig& cfg, ModelParams init,
              std::ostream* log_stream = nullptr);

/// Loss of the current parameters on a batch, without updating anything.
LossReport batch_loss(const ModelParams& params, const std::vector<Sample>& batch,
                      const TrainConfig& cfg);

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<double> loss_curve;                   // per-epoch total, when known
};

nlohmann::json to_json(const Metrics& m);
std::string confusion_csv(const Metrics& m);

/// Metrics from paired true / predicted labels over `classes` classes.
Metrics score(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& predicted,
              std::size_t classes);

std::vector<std::size_t> predict(const ModelParams& params, const std::vector<Sample>& data,
                                 const TrainConfig& cfg);

/// Read-only evaluation of `params` on `data`.
Metrics evaluate(const ModelParams& params, const std::vector<Sample>& data,
                 const TrainConfig& cfg);

// ---- gradient check -----------------------------------------------------------

struct NetworkGradCheck {
  double max_rel_error = 0.0;
  std::vector<std::pair<std::string, double>> per_array;  // trainable arrays, visit order
};

/// Finite-difference check of the full forward + total loss on random inputs
/// (N = `batch`) with the saliency masks frozen at their initial values.
/// Norm and gate parameters are perturbed away from identity first.
NetworkGradCheck network_grad_check(const NetConfig& cfg, const LossOptions& loss,
                                    std::uint64_t seed, std::size_t batch = 2,
                                    double delta = 1e-5);

// ---- cross-domain stability probe ------------------------------------------------

struct ProbeClassReport {
  std::size_t class_id = 0;
  std::vector<double> phase_corr;  // one per matched cross-domain pair
  std::vector<double> dfs_corr;
  double phase_mean = 0.0;
  double dfs_mean = 0.0;
};

struct ProbeReport {
  std::vector<ProbeClassReport> classes;
  double phase_mean = 0.0;
  double dfs_mean = 0.0;
  /// True when dfs_mean > phase_mean for every class.
  bool dfs_more_stable = false;
};

nlohmann::json to_json(const ProbeReport& r);

/// Pearson correlation of two equally sized arrays; 1 when both are constant
/// and equal, 0 when exactly one is constant.
double normalized_cross_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// For each class, correlates the phase matrices and the DFS spectrograms of
/// recordings that share (class, rep) across every pair of distinct domains.
/// Throws if fewer than two domains exist or a class is missing from a domain.
ProbeReport domain_stability_probe(const std::vector<LabeledRecording>& data,
                                   const PreprocessOptions& opt = {});

}  // namespace wicbr
