#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "wicbr/checkpoint.hpp"
#include "wicbr/commands.hpp"
#include "wicbr/image_io.hpp"
#include "wicbr/util.hpp"

namespace fs = std::filesystem;
using namespace wicbr;
using nlohmann::json;

namespace {

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wicbr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

// Small dataset, 28x28 images and the two-stage network.
std::string small_config(const fs::path& dir) {
  const json cfg{{"dataset", {{"seed", 42}, {"reps", 2}}},
                 {"preprocess", {{"image_size", 28}}},
                 {"train",
                  {{"lr", 0.003},
                   {"epochs", 2},
                   {"seed", 3},
                   {"net", {{"image_size", 28}, {"backbone_channels", {4, 4}}, {"gn_groups", 2}}}}}};
  const auto path = dir / "small.json";
  std::ofstream(path) << cfg.dump(2);
  return path.string();
}

// synth + preprocess once per scratch directory.
struct Pipeline {
  fs::path root, data, images;
  std::string config;

  explicit Pipeline(const std::string& name) : root(testing::scratch(name)) {
    config = small_config(root);
    data = root / "data";
    images = root / "images";
    REQUIRE(run_cli({"synth", "--config", config, "--out", data.string()}) == 0);
    REQUIRE(run_cli({"preprocess", "--config", config, "--data", data.string(), "--out", images.string(),
                     "--no-png"}) == 0);
  }
};

std::vector<std::pair<std::string, std::string>> output_hashes(const json& manifest) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& o : manifest["outputs"])
    out.emplace_back(fs::path(o["path"].get<std::string>()).filename().string(), o["sha256"]);
  return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth writes every record, creates the directory and is reproducible") {
  const auto root = testing::scratch("cli_synth");
  const auto config = small_config(root);
  const auto a = root / "nested" / "a", b = root / "b";
  REQUIRE(run_cli({"synth", "--config", config, "--out", a.string()}) == 0);
  REQUIRE(run_cli({"synth", "--config", config, "--out", b.string()}) == 0);
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(a))
    if (e.path().extension() == ".csir1") {
      ++n;
      CHECK(sha256_file(e.path().string()) == sha256_file((b / e.path().filename()).string()));
    }
  CHECK(n == 6 * 3 * 2);
  CHECK(fs::exists(a / "dataset.json"));
  const auto ma = read_json(a / "manifest.json"), mb = read_json(b / "manifest.json");
  CHECK(ma["config_hash"] == mb["config_hash"]);
  CHECK(output_hashes(ma) == output_hashes(mb));
  CHECK(ma["command"] == "synth");
}

TEST_CASE("bad configs exit with 2") {
  const auto root = testing::scratch("cli_bad");
  std::ofstream(root / "lr.json") << R"({"train": {"lr": -1}})";
  std::ofstream(root / "size.json") << R"({"preprocess": {"image_size": 28}})";
  std::ofstream(root / "broken.json") << "{ not json";
  for (const char* name : {"lr.json", "size.json", "broken.json"})
    CHECK(run_cli({"synth", "--config", (root / name).string(), "--out", (root / "x").string()}) == 2);
  CHECK(run_cli({"synth"}) == 2);
  CHECK(run_cli({"frobnicate"}) == 2);
  CHECK(run_cli({"train", "--data", root.string(), "--out", (root / "t").string(), "--protocol", "zz"}) == 2);
}

TEST_CASE("gradcheck passes") {
  const auto root = testing::scratch("cli_grad");
  CHECK(run_cli({"gradcheck", "--out", root.string()}) == 0);
  CHECK(read_json(root / "gradcheck.json")["max_rel_error"].get<double>() < 1e-4);
  CHECK(run_cli({"gradcheck", "--fuse-mode", "same"}) == 0);
}

TEST_CASE("preprocess, train and eval run end to end") {
  Pipeline p("cli_pipeline");
  const auto index = read_json(p.images / "samples.json");
  CHECK(index.size() == 36);
  const auto first = p.images / index[0]["phase"].get<std::string>();
  CHECK(fs::file_size(first) == 3 * 28 * 28 * 4);

  SUBCASE("preprocess is idempotent") {
    const auto again = p.root / "images2";
    REQUIRE(run_cli({"preprocess", "--config", p.config, "--data", p.data.string(), "--out", again.string(),
                     "--no-png"}) == 0);
    CHECK(output_hashes(read_json(p.images / "manifest.json")) ==
          output_hashes(read_json(again / "manifest.json")));
  }

  SUBCASE("a truncated recording is skipped") {
    const auto broken = p.root / "broken";
    fs::copy(p.data, broken);
    fs::path victim;
    for (const auto& e : fs::directory_iterator(broken))
      if (e.path().extension() == ".csir1") victim = e.path();
    fs::resize_file(victim, fs::file_size(victim) / 2);
    const auto out = p.root / "broken_images";
    CHECK(run_cli({"preprocess", "--config", p.config, "--data", broken.string(), "--out", out.string(),
                   "--no-png"}) == 0);
    CHECK(read_json(out / "samples.json").size() == 35);
  }

  SUBCASE("an untrained network scores near chance") {
    TrainConfig tc = cli::Config::load(p.config).train;
    const auto ckpt = p.root / "untrained.wckp";
    save_checkpoint(ckpt.string(), init_params(tc.net, 11));
    const auto out = p.root / "eval0";
    REQUIRE(run_cli({"eval", "--config", p.config, "--data", p.images.string(), "--checkpoint", ckpt.string(),
                     "--out", out.string()}) == 0);
    CHECK(std::abs(read_json(out / "metrics.json")["accuracy"].get<double>() - 1.0 / 6) <= 0.1);
  }

  SUBCASE("training is reproducible and eval agrees with it") {
    const auto a = p.root / "train_a", b = p.root / "train_b";
    REQUIRE(run_cli({"train", "--config", p.config, "--data", p.images.string(), "--out", a.string()}) == 0);
    REQUIRE(run_cli({"train", "--config", p.config, "--data", p.images.string(), "--out", b.string()}) == 0);
    for (const char* f : {"checkpoint.wckp", "metrics.json", "split.json", "train_log.jsonl", "confusion.csv"})
      CHECK(sha256_file((a / f).string()) == sha256_file((b / f).string()));
    const auto ma = read_json(a / "manifest.json");
    CHECK(ma["config_hash"] == read_json(b / "manifest.json")["config_hash"]);
    CHECK(read_json(a / "checkpoint.json")["sha256"] == sha256_file((a / "checkpoint.wckp").string()));
    CHECK(read_json(a / "metrics.json")["loss_curve"].size() == 2);

    const auto ev = p.root / "eval";
    REQUIRE(run_cli({"eval", "--config", p.config, "--data", p.images.string(), "--checkpoint",
                     (a / "checkpoint.wckp").string(), "--out", ev.string(), "--protocol", "id"}) == 0);
    CHECK(read_json(ev / "metrics.json")["accuracy"] == read_json(a / "metrics.json")["accuracy"]);
  }

  SUBCASE("cross-environment protocol and k-fold") {
    const auto ce = p.root / "ce";
    REQUIRE(run_cli({"train", "--config", p.config, "--data", p.images.string(), "--out", ce.string(),
                     "--protocol", "ce", "--held-out", "2", "--epochs", "1"}) == 0);
    CHECK(read_json(ce / "split.json")["test"].size() == 12);
    const auto kf = p.root / "kfold";
    REQUIRE(run_cli({"train", "--config", p.config, "--data", p.images.string(), "--out", kf.string(),
                     "--folds", "3", "--epochs", "1"}) == 0);
    CHECK(read_json(kf / "metrics.json")["folds"].size() == 3);
    CHECK(fs::exists(kf / "fold_2" / "checkpoint.wckp"));
    CHECK(run_cli({"train", "--config", p.config, "--data", p.images.string(), "--out", ce.string(),
                   "--protocol", "ce", "--held-out", "9"}) == 2);
  }

  SUBCASE("a NaN image stops training with exit 3 and a dump") {
    const auto nan_dir = p.root / "nan_images";
    fs::copy(p.images, nan_dir);
    auto img = read_img224((nan_dir / index[0]["dfs"].get<std::string>()).string());
    for (auto& v : img.plane) v = std::numeric_limits<double>::quiet_NaN();
    write_img224((nan_dir / index[0]["dfs"].get<std::string>()).string(), img);
    const auto out = p.root / "nan_train";
    CHECK(run_cli({"train", "--config", p.config, "--data", nan_dir.string(), "--out", out.string(), "--folds",
                   "2", "--epochs", "1"}) == 3);
    // The NaN sample trains in exactly one of the two folds.
    CHECK(fs::exists(out / "fold_0" / "nonfinite_dump.json") != fs::exists(out / "fold_1" / "nonfinite_dump.json"));
  }
}

TEST_CASE("probe reports DFS as the more stable view") {
  const auto root = testing::scratch("cli_probe");
  const auto config = small_config(root);
  REQUIRE(run_cli({"synth", "--config", config, "--out", (root / "data").string()}) == 0);
  CHECK(run_cli({"probe", "--config", config, "--data", (root / "data").string(), "--out",
                 (root / "probe").string()}) == 0);
  CHECK(read_json(root / "probe" / "probe.json")["dfs_more_stable"] == true);
}

}  // TEST_SUITE
