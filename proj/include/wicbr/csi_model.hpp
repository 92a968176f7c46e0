#pragma once

// Physical CSI data model and a synthetic multipath generator.
//
// A recording holds H(f, t) for every (subcarrier, antenna, packet). The
// generator composes static paths, one moving (dynamic) path and a common
// random phase offset that every antenna of the receiver shares.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wicbr {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kDefaultCenterHz = 5.825e9;
inline constexpr double kMaxDopplerHz = 60.0;

/// Complex CSI samples laid out subcarrier-major, then antenna, then time.
struct CsiRecording {
  std::size_t n_subcarriers = 0;
  std::size_t n_antennas = 0;
  std::size_t n_samples = 0;
  double fs = 0.0;        // packets per second
  double f_center = 0.0;  // Hz
  std::vector<Complex> samples;

  CsiRecording() = default;
  CsiRecording(std::size_t s, std::size_t a, std::size_t t, double fs_hz, double f_center_hz);

  double wavelength() const { return kSpeedOfLight / f_center; }
  std::size_t index(std::size_t s, std::size_t a, std::size_t t) const {
    return (s * n_antennas + a) * n_samples + t;
  }
  Complex& at(std::size_t s, std::size_t a, std::size_t t) { return samples[index(s, a, t)]; }
  const Complex& at(std::size_t s, std::size_t a, std::size_t t) const {
    return samples[index(s, a, t)];
  }
  /// The time series of one (subcarrier, antenna) pair.
  std::span<const Complex> stream(std::size_t s, std::size_t a) const {
    return {samples.data() + index(s, a, 0), n_samples};
  }

  /// Throws InvalidArgument unless S >= 1, A >= 2, T >= 1, fs > 0 and all samples are finite.
  void validate() const;
};

struct StaticPath {
  Complex attenuation{1.0, 0.0};
  double length_m = 0.0;
  double aoa_rad = 0.0;  // arrival angle; sets the per-antenna path-length step
};

struct DynamicPath {
  Complex attenuation{0.3, 0.0};
  double d0_m = 5.0;
  double aoa_rad = 0.0;
};

struct SceneConfig {
  std::vector<StaticPath> static_paths;
  DynamicPath dynamic_path;
  double noise_std = 0.0;
  std::uint64_t offset_seed = 0;
  std::uint64_t noise_seed = 0;
  double offset_step_std = 0.1;    // rad per packet
  double offset_bound_rad = 3.141592653589793;  // walk reflects at +-bound
  double antenna_phase_rad = 0.5;  // fixed offset term per antenna index
  double antenna_spacing_m = 0.026;
  double bandwidth_hz = 40e6;

  void validate() const;
};

enum class VelocityFamily { kSinusoid, kDoublePulse, kRamp, kZigzag, kTriangle, kHold };

std::string to_string(VelocityFamily family);
VelocityFamily velocity_family_from_string(const std::string& name);

/// A gesture as a radial velocity curve (m/s, positive = towards the receiver).
struct GestureProfile {
  int class_id = 0;
  VelocityFamily family = VelocityFamily::kSinusoid;
  double amplitude_mps = 1.0;
  double period_s = 1.0;
  double onset_s = 0.0;

  double velocity(double t) const;
};

struct DomainTag {
  int location = 0;
  int orientation = 0;
  int environment = 0;

  friend bool operator==(const DomainTag&, const DomainTag&) = default;
};

/// Packet/receiver layout shared by every recording of a dataset.
struct RecordingSpec {
  double duration_s = 2.0;
  double fs = 1000.0;
  std::size_t n_subcarriers = 30;
  std::size_t n_antennas = 3;
  double f_center = kDefaultCenterHz;
};

/// Carrier frequency of subcarrier s: uniform over the band centered on f_center.
double subcarrier_frequency(const SceneConfig& scene, const RecordingSpec& spec, std::size_t s);

CsiRecording synth_recording(const SceneConfig& scene, const GestureProfile& gesture,
                             const RecordingSpec& spec);

struct DomainSpec {
  SceneConfig scene;
  DomainTag tag;
};

struct JitterSpec {
  double amplitude_frac = 0.1;  // uniform in [1 - a, 1 + a]
  double onset_s = 0.05;        // uniform in [-o, o]
};

/// One synthesized instance before preprocessing.
struct LabeledRecording {
  std::string id;
  int class_id = 0;
  std::size_t domain_index = 0;
  int rep = 0;
  DomainTag tag;
  GestureProfile gesture;  // jittered
  SceneConfig scene;       // with per-record seeds
  CsiRecording recording;
};

struct DatasetConfig {
  std::uint64_t seed = 42;
  int reps = 15;
  RecordingSpec recording;
  JitterSpec jitter;
  std::vector<GestureProfile> classes;
  std::vector<DomainSpec> domains;

  void validate() const;
};

/// Six Doppler-separable gesture classes over three environments that differ
/// only in static paths and offset seeds.
DatasetConfig default_dataset_config();

/// Enumerates domains x classes x reps. Gesture jitter depends only on
/// (seed, class, rep), so the moving path of a given class/rep is the same in
/// every domain. Deterministic in `cfg`.
std::vector<LabeledRecording> make_dataset(const DatasetConfig& cfg);
std::vector<LabeledRecording> make_dataset(const std::vector<GestureProfile>& classes,
                                           const std::vector<DomainSpec>& domains, int reps,
                                           std::uint64_t seed, const RecordingSpec& spec = {},
                                           const JitterSpec& jitter = {});

}  // namespace wicbr
