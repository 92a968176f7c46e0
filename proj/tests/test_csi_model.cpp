#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "wicbr/csi_model.hpp"
#include "wicbr/preprocess.hpp"
#include "wicbr/util.hpp"

using namespace wicbr;

namespace {

SceneConfig quiet_scene() {
  SceneConfig s;
  s.static_paths = {{Complex(1.0, 0.0), 3.0, 0.2}, {Complex(0.2, -0.3), 6.5, -0.7}};
  s.dynamic_path = {Complex(0.4, 0.1), 5.0, 0.5};
  s.noise_std = 0.0;
  s.offset_step_std = 0.0;
  return s;
}

GestureProfile still() { return {0, VelocityFamily::kHold, 0.0, 1.0, 0.0}; }

}  // namespace

TEST_SUITE("csi_model") {

TEST_CASE("velocity families follow their closed forms") {
  GestureProfile g{0, VelocityFamily::kSinusoid, 2.0, 1.0, 0.0};
  CHECK(g.velocity(0.25) == doctest::Approx(2.0));
  CHECK(g.velocity(0.75) == doctest::Approx(-2.0));
  g.family = VelocityFamily::kZigzag;
  CHECK(g.velocity(0.0) == doctest::Approx(-2.0));
  CHECK(g.velocity(0.5) == doctest::Approx(0.0));
  g.family = VelocityFamily::kTriangle;
  CHECK(g.velocity(0.0) == doctest::Approx(0.0));
  CHECK(g.velocity(0.25) == doctest::Approx(2.0));
  CHECK(g.velocity(0.75) == doctest::Approx(-2.0));
  g.family = VelocityFamily::kRamp;
  CHECK(g.velocity(0.0) == doctest::Approx(-2.0));
  CHECK(g.velocity(1.5) == doctest::Approx(1.0));
  CHECK(g.velocity(3.0) == doctest::Approx(2.0));
  g.family = VelocityFamily::kHold;
  CHECK(g.velocity(0.2) == doctest::Approx(2.0));
  CHECK(g.velocity(0.7) == doctest::Approx(0.0));
  g.family = VelocityFamily::kDoublePulse;
  CHECK(g.velocity(0.5) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g.velocity(1.5) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(g.velocity(1.0)) < 0.01);

  for (auto f : {VelocityFamily::kSinusoid, VelocityFamily::kDoublePulse, VelocityFamily::kRamp,
                 VelocityFamily::kZigzag, VelocityFamily::kTriangle, VelocityFamily::kHold})
    CHECK(velocity_family_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(velocity_family_from_string("wave"), InvalidArgument);
}

TEST_CASE("noise-free synthesis matches the multipath sum evaluated directly") {
  SceneConfig scene = quiet_scene();
  scene.offset_step_std = 0.05;
  scene.offset_seed = 9;
  RecordingSpec spec;
  spec.duration_s = 0.2;
  spec.n_subcarriers = 4;
  const GestureProfile g{0, VelocityFamily::kSinusoid, 0.8, 0.2, 0.0};
  const auto rec = synth_recording(scene, g, spec);
  REQUIRE(rec.n_samples == 200);

  // Oracle: the offset walk is not observable directly, so compare the
  // offset-free ratio of antenna 1 to antenna 0 against the path sum.
  double d = scene.dynamic_path.d0_m;
  for (std::size_t t = 0; t < rec.n_samples; ++t) {
    for (std::size_t s = 0; s < rec.n_subcarriers; ++s) {
      // Subcarriers sit at the centers of S equal slices of the band.
      const double f = spec.f_center - scene.bandwidth_hz / 2 +
                       scene.bandwidth_hz * (static_cast<double>(s) + 0.5) / static_cast<double>(spec.n_subcarriers);
      CHECK(subcarrier_frequency(scene, spec, s) == doctest::Approx(f));
      const double k = 2 * std::numbers::pi * f / kSpeedOfLight;
      Complex h[2];
      for (int a = 0; a < 2; ++a) {
        const double x = a * scene.antenna_spacing_m;
        Complex sum = scene.dynamic_path.attenuation *
                      std::exp(Complex(0, -k * (d + x * std::sin(scene.dynamic_path.aoa_rad))));
        for (const auto& p : scene.static_paths)
          sum += p.attenuation * std::exp(Complex(0, -k * (p.length_m + x * std::sin(p.aoa_rad))));
        h[a] = sum * std::exp(Complex(0, -a * scene.antenna_phase_rad));
      }
      const Complex want = h[1] / h[0];
      const Complex got = rec.at(s, 1, t) / rec.at(s, 0, t);
      CHECK(std::abs(got - want) < 1e-9);
      CHECK(std::abs(rec.at(s, 0, t)) == doctest::Approx(std::abs(h[0])).epsilon(1e-12));
    }
    d -= g.velocity(static_cast<double>(t) / spec.fs) / spec.fs;
  }
}

TEST_CASE("offset is common to all antennas and bounded") {
  SceneConfig a = quiet_scene(), b = quiet_scene();
  a.offset_step_std = b.offset_step_std = 0.3;
  a.offset_seed = 1;
  b.offset_seed = 2;
  RecordingSpec spec;
  spec.duration_s = 0.5;
  const GestureProfile g{0, VelocityFamily::kSinusoid, 1.0, 0.5, 0.0};
  const auto ra = synth_recording(a, g, spec), rb = synth_recording(b, g, spec);
  double max_dev = 0.0;
  bool differs = false;
  for (std::size_t s = 0; s < ra.n_subcarriers; ++s)
    for (std::size_t t = 0; t < ra.n_samples; ++t) {
      const Complex qa = ra.at(s, 0, t) / rb.at(s, 0, t);
      const Complex qb = ra.at(s, 2, t) / rb.at(s, 2, t);
      max_dev = std::max(max_dev, std::abs(qa - qb));
      differs = differs || std::abs(qa - Complex(1, 0)) > 1e-3;
      CHECK(std::abs(std::abs(qa) - 1.0) < 1e-9);  // unit-modulus factor
    }
  CHECK(differs);
  CHECK(max_dev < 1e-9);
}

TEST_CASE("noise is circular with the configured standard deviation") {
  SceneConfig scene;
  scene.static_paths = {{Complex(0.0, 0.0), 1.0, 0.0}};
  scene.dynamic_path.attenuation = 0.0;
  scene.noise_std = 0.2;
  scene.noise_seed = 5;
  RecordingSpec spec;
  const auto rec = synth_recording(scene, still(), spec);
  double re2 = 0, im2 = 0, reim = 0;
  for (const auto& z : rec.samples) {
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    reim += z.real() * z.imag();
  }
  const double n = static_cast<double>(rec.samples.size());
  CHECK(std::sqrt((re2 + im2) / n) == doctest::Approx(0.2).epsilon(0.02));
  CHECK(re2 / n == doctest::Approx(im2 / n).epsilon(0.05));
  CHECK(std::abs(reim / n) < 1e-3);
}

TEST_CASE("synthesis rejects bad inputs") {
  RecordingSpec spec;
  SceneConfig scene = quiet_scene();
  GestureProfile fast{0, VelocityFamily::kHold, 4.0, 1.0, 0.0};  // ~78 Hz at 5.8 GHz
  CHECK_THROWS_AS(synth_recording(scene, fast, spec), InvalidArgument);
  GestureProfile ok{0, VelocityFamily::kHold, 1.0, 1.0, 0.0};
  spec.n_antennas = 1;
  CHECK_THROWS_AS(synth_recording(scene, ok, spec), InvalidArgument);
  spec = {};
  spec.fs = 0.0;
  CHECK_THROWS_AS(synth_recording(scene, ok, spec), InvalidArgument);
  spec = {};
  scene.noise_std = -1.0;
  CHECK_THROWS_AS(synth_recording(scene, ok, spec), InvalidArgument);
}

TEST_CASE("make_dataset counts, ids, tags and determinism") {
  auto cfg = default_dataset_config();
  cfg.reps = 5;
  cfg.recording.duration_s = 0.5;
  const auto a = make_dataset(cfg);
  CHECK(a.size() == 6 * 3 * 5);
  std::set<std::string> ids;
  for (const auto& r : a) {
    ids.insert(r.id);
    CHECK(r.tag == cfg.domains[r.domain_index].tag);
    CHECK(r.recording.n_samples == 500);
  }
  CHECK(ids.size() == a.size());
  const auto b = make_dataset(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].recording.samples == b[i].recording.samples);

  cfg.seed = 43;
  const auto c = make_dataset(cfg);
  CHECK(c[0].recording.samples != a[0].recording.samples);
}

TEST_CASE("gesture jitter depends on class and rep but not on domain") {
  auto cfg = default_dataset_config();
  cfg.reps = 3;
  cfg.recording.duration_s = 0.2;
  const auto data = make_dataset(cfg);
  for (const auto& x : data)
    for (const auto& y : data)
      if (x.class_id == y.class_id && x.rep == y.rep) {
        CHECK(x.gesture.amplitude_mps == y.gesture.amplitude_mps);
        CHECK(x.gesture.onset_s == y.gesture.onset_s);
      }
  const auto& g0 = data[0].gesture;
  const auto& g1 = data[1].gesture;
  CHECK(g0.amplitude_mps != g1.amplitude_mps);
  CHECK(std::abs(g0.amplitude_mps / cfg.classes[0].amplitude_mps - 1.0) <= cfg.jitter.amplitude_frac);
}

TEST_CASE("dataset validation") {
  auto cfg = default_dataset_config();
  cfg.reps = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = default_dataset_config();
  cfg.classes[2].class_id = 7;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = default_dataset_config();
  cfg.domains.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

}  // TEST_SUITE
