#pragma once

// On-disk formats for recordings and their JSON sidecars.
//
// CSIR1 (little-endian):
//   "CSIR1" | u32 S | u32 A | u32 T | f64 fs | f64 f_center |
//   S*A*T x (f32 re, f32 im), subcarrier-major, then antenna, then time.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "wicbr/csi_model.hpp"

namespace wicbr {

void write_csir1(std::ostream& os, const CsiRecording& rec);
void write_csir1(const std::string& path, const CsiRecording& rec);
/// Throws InvalidArgument on a bad magic, truncated payload or invalid header.
CsiRecording read_csir1(std::istream& is);
CsiRecording read_csir1(const std::string& path);

nlohmann::json to_json(const SceneConfig& scene);
nlohmann::json to_json(const GestureProfile& g);
nlohmann::json to_json(const DomainTag& tag);
nlohmann::json to_json(const DatasetConfig& cfg);

SceneConfig scene_from_json(const nlohmann::json& j);
GestureProfile gesture_from_json(const nlohmann::json& j);
DomainTag domain_tag_from_json(const nlohmann::json& j);
/// Missing keys fall back to default_dataset_config() values where sensible.
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

/// Sidecar for one synthesized record: id, class, domain tag, gesture and scene.
nlohmann::json record_sidecar(const LabeledRecording& r);

}  // namespace wicbr
