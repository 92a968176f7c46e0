#pragma once

// Command-line surface: synth, preprocess, train, eval, probe, gradcheck.
// Every command writes a manifest.json into its output directory.
//
// Exit codes: 0 ok, 1 runtime failure, 2 invalid config, 3 non-finite loss,
// 4 gradient check failed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wicbr/csi_model.hpp"
#include "wicbr/preprocess.hpp"
#include "wicbr/train.hpp"

namespace wicbr::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigInvalid = 2,
  kNonFiniteLoss = 3,
  kGradcheckFailed = 4,
};

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  nlohmann::json config;  // fully resolved
  std::string config_hash;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;

  /// Lists every output with its SHA-256.
  nlohmann::json to_json() const;
};

/// Hash of the canonical dump of a resolved config.
std::string config_hash(const nlohmann::json& resolved);

/// Top-level config file: {"dataset": {...}, "preprocess": {...}, "train": {...}}.
/// Each section is optional. Throws InvalidArgument on malformed content.
struct Config {
  DatasetConfig dataset = default_dataset_config();
  PreprocessOptions preprocess;
  TrainConfig train;

  static Config load(const std::string& path);  // "" gives defaults
  static Config from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TrainOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  bool no_dfs = false;
  bool no_phase = false;
  bool no_contrastive = false;
  bool channel_attention = false;
  std::optional<std::string> fuse_mode;
  void apply(TrainConfig& cfg) const;
};

struct SynthArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct PreprocessArgs {
  std::string config;
  std::string data;  // dataset directory from synth
  std::string out;
  bool png = true;
};

struct TrainArgs {
  std::string config;
  std::string data;  // image directory from preprocess
  std::string out;
  std::string protocol = "id";
  int held_out = 0;
  std::size_t folds = 1;
  TrainOverrides overrides;
};

struct EvalArgs {
  std::string config;
  std::string data;
  std::string checkpoint;
  std::string out;
  std::string protocol = "all";  // "all" scores every sample, otherwise the test side
  int held_out = 0;
  std::optional<std::uint64_t> seed;  // split seed; defaults to the train seed
  TrainOverrides overrides;
};

struct ProbeArgs {
  std::string config;
  std::string data;  // dataset directory from synth
  std::string out;
};

struct GradcheckArgs {
  std::uint64_t seed = 1;
  std::string out;
  double tolerance = 1e-4;
  std::string fuse_mode = "cross";
};

int cmd_synth(const SynthArgs& args);
int cmd_preprocess(const PreprocessArgs& args);
int cmd_train(const TrainArgs& args);
int cmd_eval(const EvalArgs& args);
int cmd_probe(const ProbeArgs& args);
int cmd_gradcheck(const GradcheckArgs& args);

/// Index written by cmd_preprocess and read back as training samples.
std::vector<Sample> load_samples(const std::string& image_dir);
/// Recordings plus sidecar labels written by cmd_synth.
std::vector<LabeledRecording> load_dataset(const std::string& dataset_dir);

/// Parses argv and dispatches.
int run(int argc, char** argv);

}  // namespace wicbr::cli
