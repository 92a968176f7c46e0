#include "wicbr/csi_io.hpp"

#include <fstream>

#include "wicbr/util.hpp"

namespace wicbr {

using nlohmann::json;

void write_csir1(std::ostream& os, const CsiRecording& rec) {
  write_magic(os, "CSIR1");
  write_u32(os, static_cast<std::uint32_t>(rec.n_subcarriers));
  write_u32(os, static_cast<std::uint32_t>(rec.n_antennas));
  write_u32(os, static_cast<std::uint32_t>(rec.n_samples));
  write_f64(os, rec.fs);
  write_f64(os, rec.f_center);
  for (const auto& z : rec.samples) {
    write_f32(os, static_cast<float>(z.real()));
    write_f32(os, static_cast<float>(z.imag()));
  }
}

void write_csir1(const std::string& path, const CsiRecording& rec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + path);
  write_csir1(os, rec);
}

CsiRecording read_csir1(std::istream& is) {
  expect_magic(is, "CSIR1");
  const std::size_t s = read_u32(is), a = read_u32(is), t = read_u32(is);
  const double fs = read_f64(is), fc = read_f64(is);
  if (s == 0 || a == 0 || t == 0) throw InvalidArgument("CSIR1 header has a zero dimension");
  // Guard absurd headers before allocating.
  if (s * a * t > (std::size_t{1} << 32)) throw InvalidArgument("CSIR1 header too large");
  CsiRecording rec(s, a, t, fs, fc);
  for (auto& z : rec.samples) {
    const float re = read_f32(is);
    const float im = read_f32(is);
    z = Complex(re, im);
  }
  rec.validate();
  return rec;
}

CsiRecording read_csir1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  return read_csir1(is);
}

namespace {
json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }
Complex complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
}  // namespace

json to_json(const SceneConfig& s) {
  json paths = json::array();
  for (const auto& p : s.static_paths)
    paths.push_back({{"attenuation", complex_json(p.attenuation)},
                     {"length_m", p.length_m},
                     {"aoa_rad", p.aoa_rad}});
  return {{"static_paths", paths},
          {"dynamic_path",
           {{"attenuation", complex_json(s.dynamic_path.attenuation)},
            {"d0_m", s.dynamic_path.d0_m},
            {"aoa_rad", s.dynamic_path.aoa_rad}}},
          {"noise_std", s.noise_std},
          {"offset_seed", s.offset_seed},
          {"noise_seed", s.noise_seed},
          {"offset_step_std", s.offset_step_std},
          {"offset_bound_rad", s.offset_bound_rad},
          {"antenna_phase_rad", s.antenna_phase_rad},
          {"antenna_spacing_m", s.antenna_spacing_m},
          {"bandwidth_hz", s.bandwidth_hz}};
}

SceneConfig scene_from_json(const json& j) {
  SceneConfig s;
  for (const auto& p : j.at("static_paths"))
    s.static_paths.push_back({complex_from(p.at("attenuation")), p.at("length_m").get<double>(),
                              p.value("aoa_rad", 0.0)});
  const auto& d = j.at("dynamic_path");
  s.dynamic_path = {complex_from(d.at("attenuation")), d.at("d0_m").get<double>(),
                    d.value("aoa_rad", 0.0)};
  s.noise_std = j.value("noise_std", s.noise_std);
  s.offset_seed = j.value("offset_seed", s.offset_seed);
  s.noise_seed = j.value("noise_seed", s.noise_seed);
  s.offset_step_std = j.value("offset_step_std", s.offset_step_std);
  s.offset_bound_rad = j.value("offset_bound_rad", s.offset_bound_rad);
  s.antenna_phase_rad = j.value("antenna_phase_rad", s.antenna_phase_rad);
  s.antenna_spacing_m = j.value("antenna_spacing_m", s.antenna_spacing_m);
  s.bandwidth_hz = j.value("bandwidth_hz", s.bandwidth_hz);
  return s;
}

json to_json(const GestureProfile& g) {
  return {{"class_id", g.class_id},
          {"family", to_string(g.family)},
          {"amplitude_mps", g.amplitude_mps},
          {"period_s", g.period_s},
          {"onset_s", g.onset_s}};
}

GestureProfile gesture_from_json(const json& j) {
  GestureProfile g;
  g.class_id = j.at("class_id").get<int>();
  g.family = velocity_family_from_string(j.at("family").get<std::string>());
  g.amplitude_mps = j.value("amplitude_mps", g.amplitude_mps);
  g.period_s = j.value("period_s", g.period_s);
  g.onset_s = j.value("onset_s", g.onset_s);
  return g;
}

json to_json(const DomainTag& t) {
  return {{"location", t.location}, {"orientation", t.orientation}, {"environment", t.environment}};
}

DomainTag domain_tag_from_json(const json& j) {
  return {j.value("location", 0), j.value("orientation", 0), j.value("environment", 0)};
}

json to_json(const DatasetConfig& cfg) {
  json classes = json::array(), domains = json::array();
  for (const auto& c : cfg.classes) classes.push_back(to_json(c));
  for (const auto& d : cfg.domains)
    domains.push_back({{"tag", to_json(d.tag)}, {"scene", to_json(d.scene)}});
  return {{"seed", cfg.seed},
          {"reps", cfg.reps},
          {"recording",
           {{"duration_s", cfg.recording.duration_s},
            {"fs", cfg.recording.fs},
            {"n_subcarriers", cfg.recording.n_subcarriers},
            {"n_antennas", cfg.recording.n_antennas},
            {"f_center", cfg.recording.f_center}}},
          {"jitter",
           {{"amplitude_frac", cfg.jitter.amplitude_frac}, {"onset_s", cfg.jitter.onset_s}}},
          {"classes", classes},
          {"domains", domains}};
}

DatasetConfig dataset_config_from_json(const json& j) {
  DatasetConfig cfg = default_dataset_config();
  cfg.seed = j.value("seed", cfg.seed);
  cfg.reps = j.value("reps", cfg.reps);
  if (j.contains("recording")) {
    const auto& r = j.at("recording");
    cfg.recording.duration_s = r.value("duration_s", cfg.recording.duration_s);
    cfg.recording.fs = r.value("fs", cfg.recording.fs);
    cfg.recording.n_subcarriers = r.value("n_subcarriers", cfg.recording.n_subcarriers);
    cfg.recording.n_antennas = r.value("n_antennas", cfg.recording.n_antennas);
    cfg.recording.f_center = r.value("f_center", cfg.recording.f_center);
  }
  if (j.contains("jitter")) {
    cfg.jitter.amplitude_frac = j.at("jitter").value("amplitude_frac", cfg.jitter.amplitude_frac);
    cfg.jitter.onset_s = j.at("jitter").value("onset_s", cfg.jitter.onset_s);
  }
  if (j.contains("classes")) {
    cfg.classes.clear();
    for (const auto& c : j.at("classes")) cfg.classes.push_back(gesture_from_json(c));
  }
  if (j.contains("domains")) {
    cfg.domains.clear();
    for (const auto& d : j.at("domains"))
      cfg.domains.push_back({scene_from_json(d.at("scene")), domain_tag_from_json(d.at("tag"))});
  }
  return cfg;
}

json record_sidecar(const LabeledRecording& r) {
  return {{"id", r.id},
          {"class_id", r.class_id},
          {"domain_index", r.domain_index},
          {"rep", r.rep},
          {"tag", to_json(r.tag)},
          {"gesture", to_json(r.gesture)},
          {"scene", to_json(r.scene)}};
}

}  // namespace wicbr
