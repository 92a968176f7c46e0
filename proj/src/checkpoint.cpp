#include "wicbr/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "wicbr/util.hpp"

namespace wicbr {

namespace {

void write_params(std::ostream& os, const ModelParams& params) {
  std::uint32_t count = 0;
  params.visit([&](const std::string&, const Tensor&, bool) { ++count; });
  write_magic(os, "WCKP1");
  write_u32(os, count);
  params.visit([&](const std::string& name, const Tensor& t, bool) {
    write_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u32(os, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) write_u32(os, static_cast<std::uint32_t>(d));
    for (double v : t.data()) write_f64(os, v);
  });
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + path);
  write_params(os, params);
}

ModelParams load_checkpoint(const std::string& path, const NetConfig& cfg) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  expect_magic(is, "WCKP1");
  ModelParams params = init_params(cfg, 0);
  std::uint32_t expected = 0;
  params.visit([&](const std::string&, Tensor&, bool) { ++expected; });
  if (read_u32(is) != expected) throw InvalidArgument("checkpoint array count mismatch: " + path);
  params.visit([&](const std::string& name, Tensor& t, bool) {
    const std::uint32_t len = read_u32(is);
    if (len > 4096) throw InvalidArgument("checkpoint name too long");
    std::string got(len, '\0');
    is.read(got.data(), len);
    if (!is || got != name)
      throw InvalidArgument("checkpoint expected '" + name + "', found '" + got + "'");
    const std::uint32_t rank = read_u32(is);
    Shape shape(rank);
    for (auto& d : shape) d = read_u32(is);
    if (shape != t.shape())
      throw InvalidArgument("checkpoint shape mismatch for " + name + ": " + shape_string(shape) +
                            " vs " + shape_string(t.shape()));
    for (auto& v : t.data()) v = read_f64(is);
  });
  return params;
}

nlohmann::json checkpoint_manifest(const ModelParams& params, const NetConfig& cfg) {
  nlohmann::json arrays = nlohmann::json::array();
  params.visit([&](const std::string& name, const Tensor& t, bool trainable) {
    arrays.push_back({{"name", name}, {"shape", t.shape()}, {"trainable", trainable}});
  });
  return {{"format", "WCKP1"},
          {"net", to_json(cfg)},
          {"arrays", arrays},
          {"trainable_count", params.trainable_count()},
          {"sha256", params_hash(params)}};
}

std::string params_hash(const ModelParams& params) {
  std::ostringstream os;
  write_params(os, params);
  return sha256_hex(os.str());
}

}  // namespace wicbr
