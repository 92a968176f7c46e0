#include "wicbr/csi_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wicbr/util.hpp"

namespace wicbr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double frac(double x) { return x - std::floor(x); }

double reflect(double x, double bound) {
  // Fold x back into [-bound, bound].
  const double span = 4.0 * bound;
  double y = std::fmod(x + bound, span);
  if (y < 0) y += span;
  return (y <= 2.0 * bound ? y : span - y) - bound;
}

}  // namespace

CsiRecording::CsiRecording(std::size_t s, std::size_t a, std::size_t t, double fs_hz,
                           double f_center_hz)
    : n_subcarriers(s), n_antennas(a), n_samples(t), fs(fs_hz), f_center(f_center_hz),
      samples(s * a * t) {}

void CsiRecording::validate() const {
  if (n_subcarriers < 1 || n_antennas < 2 || n_samples < 1)
    throw InvalidArgument("recording needs S >= 1, A >= 2, T >= 1");
  if (!(fs > 0.0) || !std::isfinite(fs)) throw InvalidArgument("recording fs must be > 0");
  if (!(f_center > 0.0) || !std::isfinite(f_center))
    throw InvalidArgument("recording f_center must be > 0");
  if (samples.size() != n_subcarriers * n_antennas * n_samples)
    throw InvalidArgument("recording sample count does not match S*A*T");
  for (const auto& z : samples)
    if (!finite(z)) throw InvalidArgument("recording contains non-finite samples");
}

void SceneConfig::validate() const {
  if (static_paths.empty()) throw InvalidArgument("scene needs at least one static path");
  for (const auto& p : static_paths) {
    if (!finite(p.attenuation) || !std::isfinite(p.length_m) || !std::isfinite(p.aoa_rad))
      throw InvalidArgument("static path has non-finite values");
    if (p.length_m < 0) throw InvalidArgument("static path length must be >= 0");
  }
  if (!finite(dynamic_path.attenuation) || !std::isfinite(dynamic_path.d0_m) ||
      !std::isfinite(dynamic_path.aoa_rad))
    throw InvalidArgument("dynamic path has non-finite values");
  if (dynamic_path.d0_m < 0) throw InvalidArgument("dynamic path d0 must be >= 0");
  for (double v : {noise_std, offset_step_std, offset_bound_rad, antenna_phase_rad,
                   antenna_spacing_m, bandwidth_hz})
    if (!std::isfinite(v)) throw InvalidArgument("scene has non-finite values");
  if (noise_std < 0) throw InvalidArgument("noise_std must be >= 0");
  if (offset_step_std < 0) throw InvalidArgument("offset_step_std must be >= 0");
  if (!(offset_bound_rad > 0)) throw InvalidArgument("offset_bound_rad must be > 0");
  if (bandwidth_hz < 0) throw InvalidArgument("bandwidth_hz must be >= 0");
}

std::string to_string(VelocityFamily family) {
  switch (family) {
    case VelocityFamily::kSinusoid: return "sinusoid";
    case VelocityFamily::kDoublePulse: return "double-pulse";
    case VelocityFamily::kRamp: return "ramp";
    case VelocityFamily::kZigzag: return "zigzag";
    case VelocityFamily::kTriangle: return "triangle";
    case VelocityFamily::kHold: return "hold";
  }
  return "?";
}

VelocityFamily velocity_family_from_string(const std::string& name) {
  for (auto f : {VelocityFamily::kSinusoid, VelocityFamily::kDoublePulse, VelocityFamily::kRamp,
                 VelocityFamily::kZigzag, VelocityFamily::kTriangle, VelocityFamily::kHold})
    if (to_string(f) == name) return f;
  throw InvalidArgument("unknown velocity family '" + name + "'");
}

double GestureProfile::velocity(double t) const {
  const double u = (t - onset_s) / period_s;
  const double a = amplitude_mps;
  switch (family) {
    case VelocityFamily::kSinusoid:
      return a * std::sin(kTwoPi * u);
    case VelocityFamily::kDoublePulse: {
      auto bump = [](double x) { return std::exp(-(x * x) / (2.0 * 0.1 * 0.1)); };
      return a * (bump(u - 0.5) + bump(u - 1.5));
    }
    case VelocityFamily::kRamp:
      return a * std::clamp(u - 1.0, -1.0, 1.0);
    case VelocityFamily::kZigzag:
      return a * (2.0 * frac(u) - 1.0);
    case VelocityFamily::kTriangle:
      return a * (1.0 - 4.0 * std::abs(frac(u + 0.25) - 0.5));
    case VelocityFamily::kHold:
      return (u >= 0.0 && u < 0.5) ? a : 0.0;
  }
  return 0.0;
}

double subcarrier_frequency(const SceneConfig& scene, const RecordingSpec& spec, std::size_t s) {
  const double n = static_cast<double>(spec.n_subcarriers);
  return spec.f_center - 0.5 * scene.bandwidth_hz +
         (static_cast<double>(s) + 0.5) * scene.bandwidth_hz / n;
}

CsiRecording synth_recording(const SceneConfig& scene, const GestureProfile& gesture,
                             const RecordingSpec& spec) {
  scene.validate();
  if (!(spec.duration_s > 0) || !std::isfinite(spec.duration_s))
    throw InvalidArgument("duration_s must be > 0");
  if (!(spec.fs > 0) || !std::isfinite(spec.fs)) throw InvalidArgument("fs must be > 0");
  if (spec.n_antennas < 2) throw InvalidArgument("need at least two antennas");
  if (spec.n_subcarriers < 1) throw InvalidArgument("need at least one subcarrier");
  if (!(spec.f_center > 0) || !std::isfinite(spec.f_center))
    throw InvalidArgument("f_center must be > 0");
  for (double v : {gesture.amplitude_mps, gesture.period_s, gesture.onset_s})
    if (!std::isfinite(v)) throw InvalidArgument("gesture has non-finite values");
  if (!(gesture.period_s > 0)) throw InvalidArgument("gesture period must be > 0");

  const auto n_t = static_cast<std::size_t>(std::llround(spec.duration_s * spec.fs));
  if (n_t < 1) throw InvalidArgument("recording would be empty");

  // Radial velocity and the Doppler budget; the shortest wavelength is the binding one.
  const double f_max = subcarrier_frequency(scene, spec, spec.n_subcarriers - 1);
  const double lambda_min = kSpeedOfLight / std::max(f_max, spec.f_center);
  std::vector<double> dyn_len(n_t);
  double d = scene.dynamic_path.d0_m;
  for (std::size_t t = 0; t < n_t; ++t) {
    const double v = gesture.velocity(static_cast<double>(t) / spec.fs);
    if (!std::isfinite(v)) throw InvalidArgument("gesture velocity is non-finite");
    if (std::abs(v) / lambda_min > kMaxDopplerHz + 1e-9)
      throw InvalidArgument("gesture velocity exceeds the +-60 Hz Doppler budget");
    dyn_len[t] = d;
    d -= v / spec.fs;  // approaching the receiver shortens the path
  }

  std::vector<double> offset(n_t, 0.0);
  {
    std::mt19937_64 rng(scene.offset_seed);
    std::normal_distribution<double> step(0.0, 1.0);
    double theta = 0.0;
    for (std::size_t t = 0; t < n_t; ++t) {
      offset[t] = theta;
      theta = reflect(theta + scene.offset_step_std * step(rng), scene.offset_bound_rad);
    }
  }

  CsiRecording rec(spec.n_subcarriers, spec.n_antennas, n_t, spec.fs, spec.f_center);
  for (std::size_t s = 0; s < spec.n_subcarriers; ++s) {
    const double k = kTwoPi * subcarrier_frequency(scene, spec, s) / kSpeedOfLight;
    for (std::size_t a = 0; a < spec.n_antennas; ++a) {
      const double ant = static_cast<double>(a) * scene.antenna_spacing_m;
      Complex h_static{0.0, 0.0};
      for (const auto& p : scene.static_paths)
        h_static += p.attenuation *
                    std::polar(1.0, -k * (p.length_m + ant * std::sin(p.aoa_rad)));
      const double dyn_extra = ant * std::sin(scene.dynamic_path.aoa_rad);
      const double ant_phase = static_cast<double>(a) * scene.antenna_phase_rad;
      for (std::size_t t = 0; t < n_t; ++t) {
        const Complex h_dyn =
            scene.dynamic_path.attenuation * std::polar(1.0, -k * (dyn_len[t] + dyn_extra));
        rec.at(s, a, t) = std::polar(1.0, -(offset[t] + ant_phase)) * (h_static + h_dyn);
      }
    }
  }

  if (scene.noise_std > 0) {
    std::mt19937_64 rng(scene.noise_seed);
    std::normal_distribution<double> gauss(0.0, scene.noise_std / std::numbers::sqrt2);
    for (auto& z : rec.samples) z += Complex(gauss(rng), gauss(rng));
  }
  return rec;
}

void DatasetConfig::validate() const {
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  if (classes.empty()) throw InvalidArgument("dataset needs at least one class");
  if (domains.empty()) throw InvalidArgument("dataset needs at least one domain");
  for (const auto& d : domains) {
    d.scene.validate();
    if (d.tag.location < 0 || d.tag.orientation < 0 || d.tag.environment < 0)
      throw InvalidArgument("domain tag ids must be >= 0");
  }
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].class_id != static_cast<int>(i))
      throw InvalidArgument("class ids must be 0..R-1 in order");
  if (jitter.amplitude_frac < 0 || jitter.amplitude_frac >= 1 || jitter.onset_s < 0)
    throw InvalidArgument("bad jitter spec");
}

DatasetConfig default_dataset_config() {
  DatasetConfig cfg;
  using F = VelocityFamily;
  cfg.classes = {
      {0, F::kSinusoid, 1.0, 1.0, 0.0},   {1, F::kDoublePulse, 1.4, 1.0, 0.0},
      {2, F::kRamp, 1.2, 1.0, 0.0},       {3, F::kZigzag, 1.0, 0.5, 0.0},
      {4, F::kTriangle, 1.6, 2.0, 0.0},   {5, F::kHold, 1.3, 2.0, 0.5},
  };
  DynamicPath hand{Complex(0.6, 0.0), 5.0, 0.6};
  auto scene = [&](std::vector<StaticPath> paths, std::uint64_t offset_seed) {
    SceneConfig s;
    s.static_paths = std::move(paths);
    s.dynamic_path = hand;
    s.noise_std = 0.01;
    s.offset_seed = offset_seed;
    s.noise_seed = offset_seed + 1000;
    return s;
  };
  cfg.domains = {
      {scene({{Complex(1.0, 0.0), 3.0, 0.0}, {Complex(0.3, 0.3), 5.2, 0.9}}, 11), {0, 0, 0}},
      {scene({{Complex(0.6, -0.4), 2.2, -0.4},
              {Complex(0.5, 0.2), 4.1, 1.2},
              {Complex(0.2, 0.1), 7.3, -1.1}},
             22),
       {1, 0, 1}},
      {scene({{Complex(-0.5, 0.9), 4.6, 0.3}}, 33), {2, 0, 2}},
  };
  return cfg;
}

std::vector<LabeledRecording> make_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  std::vector<LabeledRecording> out;
  out.resize(cfg.domains.size() * cfg.classes.size() * static_cast<std::size_t>(cfg.reps));
  std::size_t i = 0;
  for (std::size_t d = 0; d < cfg.domains.size(); ++d) {
    for (const auto& cls : cfg.classes) {
      for (int r = 0; r < cfg.reps; ++r, ++i) {
        auto& item = out[i];
        item.class_id = cls.class_id;
        item.domain_index = d;
        item.rep = r;
        item.tag = cfg.domains[d].tag;
        item.id = "d" + std::to_string(d) + "_c" + std::to_string(cls.class_id) + "_r" +
                  std::to_string(r);

        std::mt19937_64 jit(mix_seed(cfg.seed, static_cast<std::uint64_t>(cls.class_id),
                                     static_cast<std::uint64_t>(r)));
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        item.gesture = cls;
        item.gesture.amplitude_mps *= 1.0 + cfg.jitter.amplitude_frac * unit(jit);
        item.gesture.onset_s += cfg.jitter.onset_s * unit(jit);

        item.scene = cfg.domains[d].scene;
        item.scene.offset_seed = mix_seed(cfg.seed, item.scene.offset_seed, i);
        item.scene.noise_seed = mix_seed(cfg.seed, item.scene.noise_seed, i);
      }
    }
  }
  parallel_for(out.size(), [&](std::size_t k) {
    out[k].recording = synth_recording(out[k].scene, out[k].gesture, cfg.recording);
  });
  return out;
}

std::vector<LabeledRecording> make_dataset(const std::vector<GestureProfile>& classes,
                                           const std::vector<DomainSpec>& domains, int reps,
                                           std::uint64_t seed, const RecordingSpec& spec,
                                           const JitterSpec& jitter) {
  DatasetConfig cfg;
  cfg.seed = seed;
  cfg.reps = reps;
  cfg.recording = spec;
  cfg.jitter = jitter;
  cfg.classes = classes;
  cfg.domains = domains;
  return make_dataset(cfg);
}

}  // namespace wicbr
