#pragma once

// Named-array checkpoint container.
//
//   "WCKP1" | u32 count | per array: u32 name_len, name, u32 rank, u32 dims..., f64 data
//
// Arrays appear in ModelParams::visit order under their stable dotted names.
// A JSON manifest next to the binary lists names, shapes and the network
// configuration.

#include <string>

#include <json.hpp>

#include "wicbr/net.hpp"

namespace wicbr {

void save_checkpoint(const std::string& path, const ModelParams& params);
/// Loads into a parameter tree built from `cfg`; every name and shape must match.
ModelParams load_checkpoint(const std::string& path, const NetConfig& cfg);

nlohmann::json checkpoint_manifest(const ModelParams& params, const NetConfig& cfg);

/// SHA-256 over the serialized checkpoint bytes.
std::string params_hash(const ModelParams& params);

}  // namespace wicbr
