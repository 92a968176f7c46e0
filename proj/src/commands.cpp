#include "wicbr/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "wicbr/checkpoint.hpp"
#include "wicbr/csi_io.hpp"
#include "wicbr/image_io.hpp"
#include "wicbr/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace wicbr::cli {

// ---- config -----------------------------------------------------------------------

namespace {

json preprocess_to_json(const PreprocessOptions& p) {
  return {{"ratio", {{"ant_a", p.ratio.ant_a}, {"ant_b", p.ratio.ant_b}, {"epsilon", p.ratio.epsilon}}},
          {"unwrap", p.unwrap},
          {"stft",
           {{"window", p.stft.window},
            {"hop", p.stft.hop},
            {"fft_len", p.stft.fft_len},
            {"subtract_mean", p.stft.subtract_mean},
            {"antenna", p.stft.antenna},
            {"max_bin", p.stft.max_bin}}},
          {"image_size", p.image_size}};
}

PreprocessOptions preprocess_from_json(const json& j) {
  PreprocessOptions p;
  if (j.contains("ratio")) {
    const auto& r = j.at("ratio");
    p.ratio.ant_a = r.value("ant_a", p.ratio.ant_a);
    p.ratio.ant_b = r.value("ant_b", p.ratio.ant_b);
    p.ratio.epsilon = r.value("epsilon", p.ratio.epsilon);
  }
  p.unwrap = j.value("unwrap", p.unwrap);
  if (j.contains("stft")) {
    const auto& s = j.at("stft");
    p.stft.window = s.value("window", p.stft.window);
    p.stft.hop = s.value("hop", p.stft.hop);
    p.stft.fft_len = s.value("fft_len", p.stft.fft_len);
    p.stft.subtract_mean = s.value("subtract_mean", p.stft.subtract_mean);
    p.stft.antenna = s.value("antenna", p.stft.antenna);
    p.stft.max_bin = s.value("max_bin", p.stft.max_bin);
  }
  p.image_size = j.value("image_size", p.image_size);
  if (p.stft.window == 0 || p.stft.hop == 0 || p.stft.fft_len < p.stft.window || p.stft.max_bin < 0)
    throw InvalidArgument("invalid STFT settings");
  if (p.image_size < 2) throw InvalidArgument("image_size must be >= 2");
  return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text, RunManifest& manifest) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  os.close();
  manifest.outputs.push_back(path.string());
}

void finish(const fs::path& out, RunManifest& manifest,
            std::chrono::steady_clock::time_point t0) {
  manifest.wall_time_s = seconds_since(t0);
  std::ofstream os(out / "manifest.json");
  os << manifest.to_json().dump(2) << '\n';
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw InvalidArgument("--out is required");
  fs::create_directories(dir);
}

}  // namespace

json RunManifest::to_json() const {
  json outs = json::array();
  for (const auto& p : outputs) outs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  return {{"command", command},   {"config", config},   {"config_hash", config_hash},
          {"inputs", inputs},     {"outputs", outs},    {"seed", seed},
          {"tool_version", kToolVersion}, {"wall_time_s", wall_time_s}};
}

std::string config_hash(const json& resolved) { return sha256_hex(resolved.dump()); }

Config Config::from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  Config c;
  c.dataset = dataset_config_from_json(j.value("dataset", json::object()));
  c.dataset.validate();
  c.preprocess = preprocess_from_json(j.value("preprocess", json::object()));
  c.train = train_config_from_json(j.value("train", json::object()));
  if (c.train.net.image_size != c.preprocess.image_size)
    throw InvalidArgument("train.net.image_size must equal preprocess.image_size");
  if (c.train.net.num_classes != c.dataset.classes.size())
    throw InvalidArgument("train.net.num_classes must equal the number of dataset classes");
  return c;
}

Config Config::load(const std::string& path) {
  if (path.empty()) return from_json(json::object());
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

json Config::to_json() const {
  return {{"dataset", wicbr::to_json(dataset)},
          {"preprocess", preprocess_to_json(preprocess)},
          {"train", wicbr::to_json(train)}};
}

void TrainOverrides::apply(TrainConfig& cfg) const {
  if (seed) cfg.seed = *seed;
  if (epochs) cfg.epochs = *epochs;
  cfg.no_dfs = cfg.no_dfs || no_dfs;
  cfg.no_phase = cfg.no_phase || no_phase;
  cfg.no_contrastive = cfg.no_contrastive || no_contrastive;
  if (fuse_mode) cfg.net.fuse_mode = fuse_mode_from_string(*fuse_mode);
  if (channel_attention) cfg.net.fuse_mode = FuseMode::kChannelAttention;
  cfg.validate();
}

// ---- dataset and sample index ----------------------------------------------------

std::vector<LabeledRecording> load_dataset(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csir1") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .csir1 files in " + dir);
  std::vector<LabeledRecording> out;
  for (const auto& f : files) {
    auto sidecar_path = f;
    sidecar_path.replace_extension(".json");
    std::ifstream is(sidecar_path);
    if (!is) throw std::runtime_error("missing sidecar " + sidecar_path.string());
    const json side = json::parse(is);
    LabeledRecording r;
    r.id = side.at("id");
    r.class_id = side.at("class_id");
    r.domain_index = side.at("domain_index");
    r.rep = side.at("rep");
    r.tag = domain_tag_from_json(side.at("tag"));
    r.recording = read_csir1(f.string());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Sample> load_samples(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "samples.json");
  if (!is) throw std::runtime_error("no samples.json in " + dir);
  const json index = json::parse(is);
  std::vector<Sample> out(index.size());
  parallel_for(index.size(), [&](std::size_t i) {
    const auto& e = index[i];
    Sample s;
    s.id = e.at("id");
    s.label = e.at("label");
    s.tag = domain_tag_from_json(e.at("tag"));
    s.phase = read_img224((fs::path(dir) / e.at("phase").get<std::string>()).string()).plane;
    s.dfs = read_img224((fs::path(dir) / e.at("dfs").get<std::string>()).string()).plane;
    out[i] = std::move(s);
  });
  return out;
}

// ---- commands --------------------------------------------------------------------

int cmd_synth(const SynthArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  try {
    cfg = Config::load(args.config);
    if (args.seed) cfg.dataset.seed = *args.seed;
    cfg.dataset.validate();
  } catch (const std::exception& e) {
    spdlog::error("invalid config: {}", e.what());
    return kConfigInvalid;
  }
  ensure_dir(args.out);
  RunManifest m;
  m.command = "synth";
  m.config = cfg.to_json();
  m.config_hash = config_hash(m.config);
  m.seed = cfg.dataset.seed;
  if (!args.config.empty()) m.inputs.push_back(args.config);

  const auto data = make_dataset(cfg.dataset);
  const fs::path out(args.out);
  for (const auto& r : data) {
    const auto rec_path = out / (r.id + ".csir1");
    write_csir1(rec_path.string(), r.recording);
    m.outputs.push_back(rec_path.string());
    write_text(out / (r.id + ".json"), record_sidecar(r).dump(2) + "\n", m);
  }
  write_text(out / "dataset.json", wicbr::to_json(cfg.dataset).dump(2) + "\n", m);
  finish(out, m, t0);
  std::cout << "recordings " << data.size() << '\n';
  return kOk;
}

int cmd_preprocess(const PreprocessArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  try {
    cfg = Config::load(args.config);
  } catch (const std::exception& e) {
    spdlog::error("invalid config: {}", e.what());
    return kConfigInvalid;
  }
  ensure_dir(args.out);
  const fs::path out(args.out);
  RunManifest m;
  m.command = "preprocess";
  m.config = cfg.to_json();
  m.config_hash = config_hash(m.config);
  m.inputs.push_back(args.data);

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(args.data))
    if (e.path().extension() == ".csir1") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  struct Result {
    std::string error;
    json entry;
    std::vector<std::string> outputs;
  };
  std::vector<Result> results(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    Result& res = results[i];
    try {
      auto sidecar_path = files[i];
      sidecar_path.replace_extension(".json");
      std::ifstream is(sidecar_path);
      if (!is) throw std::runtime_error("missing sidecar " + sidecar_path.string());
      const json side = json::parse(is);
      const std::string id = side.at("id");
      const auto rec = read_csir1(files[i].string());
      const auto ratio = csi_ratio(rec, cfg.preprocess.ratio);
      const auto phase = render_image(phase_extract(ratio.ratio, rec.fs, cfg.preprocess.unwrap),
                                      cfg.preprocess.image_size);
      const auto spec = dfs_spectrogram(rec, cfg.preprocess.stft);
      const auto dfs = render_image(spec, cfg.preprocess.image_size);
      const auto stem = out / id;
      write_img224(stem.string() + ".phase.img224", phase);
      write_img224(stem.string() + ".dfs.img224", dfs);
      write_dfs1(stem.string() + ".dfs1", {spec});
      res.outputs = {stem.string() + ".phase.img224", stem.string() + ".dfs.img224",
                     stem.string() + ".dfs1"};
      if (args.png) {
        write_png(stem.string() + ".phase.png", phase);
        write_png(stem.string() + ".dfs.png", dfs);
        res.outputs.push_back(stem.string() + ".phase.png");
        res.outputs.push_back(stem.string() + ".dfs.png");
      }
      res.entry = {{"id", id},
                   {"label", side.at("class_id")},
                   {"tag", side.at("tag")},
                   {"phase", id + ".phase.img224"},
                   {"dfs", id + ".dfs.img224"}};
    } catch (const std::exception& e) {
      res.error = e.what();
    }
  });

  json index = json::array();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (!results[i].error.empty()) {
      spdlog::error("skipping {}: {}", files[i].string(), results[i].error);
      ++failed;
      continue;
    }
    index.push_back(results[i].entry);
    for (auto& o : results[i].outputs) m.outputs.push_back(o);
  }
  write_text(out / "samples.json", index.dump(2) + "\n", m);
  finish(out, m, t0);
  std::cout << "processed " << index.size() << " skipped " << failed << '\n';
  return index.empty() ? kFailure : kOk;
}

namespace {

struct TrainSetup {
  Config cfg;
  std::vector<Sample> samples;
};

json metrics_report(const Metrics& metrics, const std::vector<EpochLog>& log) {
  json j = to_json(metrics);
  json curve = json::array();
  for (const auto& e : log) curve.push_back(e.total);
  j["loss_curve"] = curve;
  return j;
}

// Fits on `train`, scores on `test`, writes the run artifacts into `dir`.
Metrics train_and_report(const std::vector<Sample>& train, const std::vector<Sample>& test,
                         const TrainConfig& tc, const fs::path& dir, RunManifest& m) {
  fs::create_directories(dir);
  std::ostringstream log;
  FitResult fit_result;
  try {
    fit_result = fit(train, tc, &log);
  } catch (const NonFiniteLoss& e) {
    write_text(dir / "train_log.jsonl", log.str(), m);
    write_text(dir / "nonfinite_dump.json", e.dump.dump(2) + "\n", m);
    throw;
  }
  write_text(dir / "train_log.jsonl", log.str(), m);
  Metrics metrics = evaluate(fit_result.params, test, tc);
  for (const auto& e : fit_result.log) metrics.loss_curve.push_back(e.total);
  const auto ckpt = dir / "checkpoint.wckp";
  save_checkpoint(ckpt.string(), fit_result.params);
  m.outputs.push_back(ckpt.string());
  write_text(dir / "checkpoint.json", checkpoint_manifest(fit_result.params, tc.net).dump(2) + "\n", m);
  write_text(dir / "metrics.json", metrics_report(metrics, fit_result.log).dump(2) + "\n", m);
  write_text(dir / "confusion.csv", confusion_csv(metrics), m);
  std::cout << dir.string() << ": accuracy " << metrics.accuracy << " macro_f1 " << metrics.macro_f1
            << " checkpoint " << params_hash(fit_result.params) << '\n';
  return metrics;
}

}  // namespace

int cmd_train(const TrainArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  SplitProtocol protocol;
  try {
    cfg = Config::load(args.config);
    args.overrides.apply(cfg.train);
    protocol.kind = split_kind_from_string(args.protocol);
    protocol.held_out = args.held_out;
    if (args.folds == 0) throw InvalidArgument("--folds must be >= 1");
  } catch (const std::exception& e) {
    spdlog::error("invalid config: {}", e.what());
    return kConfigInvalid;
  }
  ensure_dir(args.out);
  const fs::path out(args.out);
  RunManifest m;
  m.command = "train";
  json resolved = cfg.to_json();
  resolved["protocol"] = {{"kind", to_string(protocol.kind)}, {"held_out", protocol.held_out},
                          {"folds", args.folds}};
  m.config = resolved;
  m.config_hash = config_hash(resolved);
  m.seed = cfg.train.seed;
  m.inputs.push_back(args.data);
  if (!args.config.empty()) m.inputs.push_back(args.config);

  const auto samples = load_samples(args.data);
  for (const auto& s : samples)
    if (s.phase.size() != cfg.train.net.image_size * cfg.train.net.image_size)
      throw std::runtime_error("image size of " + s.id + " does not match the network");

  try {
    if (args.folds > 1) {
      const auto folds = kfold(samples, args.folds, cfg.train.seed);
      json summary = json::array();
      double acc = 0.0, f1 = 0.0;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto metrics =
            train_and_report(subset(samples, folds[f].train), subset(samples, folds[f].test),
                             cfg.train, out / ("fold_" + std::to_string(f)), m);
        summary.push_back({{"fold", f}, {"accuracy", metrics.accuracy}, {"macro_f1", metrics.macro_f1}});
        acc += metrics.accuracy;
        f1 += metrics.macro_f1;
      }
      const double k = static_cast<double>(folds.size());
      write_text(out / "metrics.json",
                 json{{"folds", summary}, {"accuracy", acc / k}, {"macro_f1", f1 / k}}.dump(2) + "\n", m);
      std::cout << "mean accuracy " << acc / k << " macro_f1 " << f1 / k << '\n';
    } else {
      SplitIndices parts;
      try {
        parts = split(samples, protocol, cfg.train.seed);
      } catch (const InvalidArgument& e) {
        spdlog::error("invalid split: {}", e.what());
        return kConfigInvalid;
      }
      write_text(out / "split.json", json{{"train", parts.train}, {"test", parts.test}}.dump() + "\n", m);
      train_and_report(subset(samples, parts.train), subset(samples, parts.test), cfg.train, out, m);
    }
  } catch (const NonFiniteLoss& e) {
    spdlog::error("{}", e.what());
    finish(out, m, t0);
    return kNonFiniteLoss;
  }
  finish(out, m, t0);
  return kOk;
}

int cmd_eval(const EvalArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  try {
    cfg = Config::load(args.config);
    args.overrides.apply(cfg.train);
  } catch (const std::exception& e) {
    spdlog::error("invalid config: {}", e.what());
    return kConfigInvalid;
  }
  ensure_dir(args.out);
  const fs::path out(args.out);
  RunManifest m;
  m.command = "eval";
  m.config = cfg.to_json();
  m.config_hash = config_hash(m.config);
  m.seed = args.seed.value_or(cfg.train.seed);
  m.inputs = {args.data, args.checkpoint};

  const ModelParams params = load_checkpoint(args.checkpoint, cfg.train.net);
  const auto samples = load_samples(args.data);
  std::vector<Sample> test;
  if (args.protocol == "all") {
    test = samples;
  } else {
    SplitProtocol protocol;
    try {
      protocol.kind = split_kind_from_string(args.protocol);
      protocol.held_out = args.held_out;
      test = subset(samples, split(samples, protocol, m.seed).test);
    } catch (const InvalidArgument& e) {
      spdlog::error("invalid split: {}", e.what());
      return kConfigInvalid;
    }
  }
  const std::string before = params_hash(params);
  const Metrics metrics = evaluate(params, test, cfg.train);
  if (params_hash(params) != before) throw std::logic_error("evaluation mutated the parameters");
  write_text(out / "metrics.json", to_json(metrics).dump(2) + "\n", m);
  write_text(out / "confusion.csv", confusion_csv(metrics), m);
  finish(out, m, t0);
  std::cout << "accuracy " << metrics.accuracy << " macro_f1 " << metrics.macro_f1 << '\n';
  return kOk;
}

int cmd_probe(const ProbeArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  try {
    cfg = Config::load(args.config);
  } catch (const std::exception& e) {
    spdlog::error("invalid config: {}", e.what());
    return kConfigInvalid;
  }
  ensure_dir(args.out);
  const fs::path out(args.out);
  RunManifest m;
  m.command = "probe";
  m.config = cfg.to_json();
  m.config_hash = config_hash(m.config);
  m.inputs.push_back(args.data);

  const auto report = domain_stability_probe(load_dataset(args.data), cfg.preprocess);
  write_text(out / "probe.json", to_json(report).dump(2) + "\n", m);
  finish(out, m, t0);
  for (const auto& c : report.classes)
    std::cout << "class " << c.class_id << " phase_corr " << c.phase_mean << " dfs_corr " << c.dfs_mean
              << '\n';
  std::cout << "phase_corr " << report.phase_mean << "\ndfs_corr " << report.dfs_mean
            << "\ndfs_corr > phase_corr: " << (report.dfs_more_stable ? "true" : "false") << '\n';
  return report.dfs_more_stable ? kOk : kFailure;
}

int cmd_gradcheck(const GradcheckArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  NetConfig net = NetConfig::toy();
  try {
    net.fuse_mode = fuse_mode_from_string(args.fuse_mode);
  } catch (const std::exception& e) {
    spdlog::error("invalid config: {}", e.what());
    return kConfigInvalid;
  }
  const auto result = network_grad_check(net, LossOptions{}, args.seed);
  for (const auto& [name, err] : result.per_array) std::cout << name << ' ' << err << '\n';
  const bool ok = result.max_rel_error < args.tolerance;
  std::cout << "max_rel_error " << result.max_rel_error << (ok ? " ok" : " FAIL") << '\n';
  if (!args.out.empty()) {
    ensure_dir(args.out);
    RunManifest m;
    m.command = "gradcheck";
    m.config = {{"net", to_json(net)}, {"tolerance", args.tolerance}};
    m.config_hash = config_hash(m.config);
    m.seed = args.seed;
    json arrays = json::object();
    for (const auto& [name, err] : result.per_array) arrays[name] = err;
    write_text(fs::path(args.out) / "gradcheck.json",
               json{{"max_rel_error", result.max_rel_error}, {"arrays", arrays}, {"pass", ok}}.dump(2) + "\n",
               m);
    finish(args.out, m, t0);
  }
  return ok ? kOk : kGradcheckFailed;
}

// ---- argv -----------------------------------------------------------------------

namespace {

void add_overrides(CLI::App* cmd, TrainOverrides& o) {
  cmd->add_option("--seed", o.seed, "training seed");
  cmd->add_option("--epochs", o.epochs, "epoch budget");
  cmd->add_flag("--no-dfs", o.no_dfs, "feed a neutral image to the DFS branch");
  cmd->add_flag("--no-phase", o.no_phase, "feed a neutral image to the phase branch");
  cmd->add_flag("--no-contrastive", o.no_contrastive, "drop the contrastive term");
  cmd->add_flag("--channel-attention", o.channel_attention, "plain channel gate instead of saliency fusion");
  cmd->add_option("--fuse-mode", o.fuse_mode, "cross | same | channel_attention");
}

}  // namespace

int run(int argc, char** argv) {
  auto logger = spdlog::get("wicbr");
  if (!logger) logger = spdlog::stderr_color_mt("wicbr");
  spdlog::set_default_logger(logger);

  CLI::App app{"Wi-CBR desk-scale pipeline"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic CSI dataset");
  s->add_option("--config", synth.config, "config JSON");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--seed", synth.seed, "dataset seed");

  PreprocessArgs pre;
  bool no_png = false;
  auto* p = app.add_subcommand("preprocess", "render phase and DFS images");
  p->add_option("--config", pre.config, "config JSON");
  p->add_option("--data", pre.data, "dataset directory")->required();
  p->add_option("--out", pre.out, "output directory")->required();
  p->add_flag("--no-png", no_png, "skip PNG previews");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train and evaluate on a split");
  t->add_option("--config", train.config, "config JSON");
  t->add_option("--data", train.data, "image directory")->required();
  t->add_option("--out", train.out, "output directory")->required();
  t->add_option("--protocol", train.protocol, "id | cl | co | ce");
  t->add_option("--held-out", train.held_out, "held-out tag value for cross protocols");
  t->add_option("--folds", train.folds, "k-fold cross-validation");
  add_overrides(t, train.overrides);

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "score a checkpoint");
  e->add_option("--config", eval.config, "config JSON");
  e->add_option("--data", eval.data, "image directory")->required();
  e->add_option("--checkpoint", eval.checkpoint, "checkpoint file")->required();
  e->add_option("--out", eval.out, "output directory")->required();
  e->add_option("--protocol", eval.protocol, "all | id | cl | co | ce");
  e->add_option("--held-out", eval.held_out, "held-out tag value for cross protocols");
  add_overrides(e, eval.overrides);

  ProbeArgs probe;
  auto* pr = app.add_subcommand("probe", "cross-domain stability of phase vs DFS");
  pr->add_option("--config", probe.config, "config JSON");
  pr->add_option("--data", probe.data, "dataset directory")->required();
  pr->add_option("--out", probe.out, "output directory")->required();

  GradcheckArgs grad;
  auto* g = app.add_subcommand("gradcheck", "finite-difference check of the toy network");
  g->add_option("--seed", grad.seed, "parameter and input seed");
  g->add_option("--out", grad.out, "output directory");
  g->add_option("--tolerance", grad.tolerance, "maximum relative error");
  g->add_option("--fuse-mode", grad.fuse_mode, "cross | same | channel_attention");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kConfigInvalid;
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*p) {
      pre.png = !no_png;
      return cmd_preprocess(pre);
    }
    if (*t) return cmd_train(train);
    if (*e) {
      eval.seed = eval.overrides.seed;
      return cmd_eval(eval);
    }
    if (*pr) return cmd_probe(probe);
    if (*g) return cmd_gradcheck(grad);
  } catch (const std::exception& err) {
    spdlog::error("{}", err.what());
    return kFailure;
  }
  return kFailure;
}

}  // namespace wicbr::cli
