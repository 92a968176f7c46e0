#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wicbr/csi_model.hpp"
#include "wicbr/preprocess.hpp"
#include "wicbr/util.hpp"

using namespace wicbr;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix tone_rows(std::size_t rows, std::size_t n, double fs, double hz, double phase = 0.0) {
  ComplexMatrix m;
  m.rows = rows;
  m.cols = n;
  m.values.resize(rows * n);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t t = 0; t < n; ++t)
      m.at(r, t) = std::polar(1.0 + 0.1 * static_cast<double>(r),
                              2 * kPi * hz * static_cast<double>(t) / fs + phase + static_cast<double>(r));
  return m;
}

// Direct evaluation of the windowed DFT power, averaged over rows.
double dense_power(const ComplexMatrix& m, std::size_t start, std::size_t win, std::size_t fft_len,
                   long k) {
  double acc = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    Complex mean{};
    for (std::size_t t = 0; t < m.cols; ++t) mean += m.at(r, t);
    mean /= static_cast<double>(m.cols);
    Complex x{};
    for (std::size_t n = 0; n < win; ++n) {
      const double w = 0.5 - 0.5 * std::cos(2 * kPi * static_cast<double>(n) / static_cast<double>(win));
      x += (m.at(r, start + n) - mean) * w *
           std::polar(1.0, -2 * kPi * static_cast<double>(k) * static_cast<double>(n) /
                               static_cast<double>(fft_len));
    }
    acc += std::norm(x);
  }
  return acc / static_cast<double>(m.rows);
}

CsiRecording recording_from(const std::vector<std::vector<Complex>>& ant0,
                            const std::vector<std::vector<Complex>>& ant1) {
  CsiRecording rec(ant0.size(), 2, ant0[0].size(), 1000.0, kDefaultCenterHz);
  for (std::size_t s = 0; s < ant0.size(); ++s)
    for (std::size_t t = 0; t < ant0[0].size(); ++t) {
      rec.at(s, 0, t) = ant0[s][t];
      rec.at(s, 1, t) = ant1[s][t];
    }
  return rec;
}

}  // namespace

TEST_SUITE("preprocess") {

TEST_CASE("ratio repairs small denominators from the nearest valid sample, earlier on ties") {
  const Complex a(2.0, 0.0);
  std::vector<Complex> den{1.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0, 0.5};
  const auto rec = recording_from({std::vector<Complex>(8, a)}, {den});
  const auto res = csi_ratio(rec, {0, 1, 1e-9});
  CHECK(res.repaired_cells == 5);
  const std::vector<Complex> want{2.0, 2.0, 0.5, 0.5, 0.5, 0.5, 4.0, 4.0};
  for (std::size_t t = 0; t < 8; ++t) CHECK(res.ratio.at(0, t) == want[t]);

  const auto degenerate = recording_from({std::vector<Complex>(4, a)}, {std::vector<Complex>(4, 0.0)});
  CHECK_THROWS_AS(csi_ratio(degenerate), InvalidArgument);
  CHECK_THROWS_AS(csi_ratio(rec, {0, 0, 1e-9}), InvalidArgument);
  CHECK_THROWS_AS(csi_ratio(rec, {0, 5, 1e-9}), InvalidArgument);
}

TEST_CASE("ratio is invariant to a common unit-modulus factor (property)") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 20; ++trial) {
    CsiRecording rec(5, 3, 64, 1000.0, kDefaultCenterHz);
    for (auto& z : rec.samples) z = Complex(g(rng), g(rng));
    CsiRecording rot = rec;
    std::vector<double> theta(64);
    for (auto& t : theta) t = u(rng);
    for (std::size_t s = 0; s < 5; ++s)
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t t = 0; t < 64; ++t) rot.at(s, a, t) *= std::polar(1.0, theta[t]);
    const auto r0 = csi_ratio(rec).ratio, r1 = csi_ratio(rot).ratio;
    for (std::size_t i = 0; i < r0.values.size(); ++i)
      CHECK(std::abs(r0.values[i] - r1.values[i]) <= 1e-12 * std::abs(r0.values[i]) + 1e-15);
  }
}

TEST_CASE("phase lies in (-pi, pi] and -1 maps to +pi") {
  ComplexMatrix m;
  m.rows = 1;
  m.cols = 4;
  m.values = {Complex(-1.0, 0.0), Complex(-1.0, -0.0), Complex(0.0, 1.0), Complex(1.0, -1e-300)};
  const auto p = phase_extract(m, 1000.0, false);
  CHECK(p.values.at(0, 0) == kPi);
  CHECK(p.values.at(0, 1) == kPi);
  CHECK(p.values.at(0, 2) == doctest::Approx(kPi / 2));
  CHECK(p.values.at(0, 3) <= 0.0);
}

TEST_CASE("unwrap matches a nearest-branch oracle on random walks") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> step(-0.95 * kPi, 0.95 * kPi);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> truth(300);
    truth[0] = step(rng);
    for (std::size_t t = 1; t < truth.size(); ++t) truth[t] = truth[t - 1] + step(rng);
    std::vector<double> wrapped(truth.size());
    for (std::size_t t = 0; t < truth.size(); ++t) wrapped[t] = std::atan2(std::sin(truth[t]), std::cos(truth[t]));
    // Oracle: pick the 2*pi branch closest to the previous unwrapped value.
    std::vector<double> oracle = wrapped;
    for (std::size_t t = 1; t < oracle.size(); ++t)
      oracle[t] = wrapped[t] + 2 * kPi * std::round((oracle[t - 1] - wrapped[t]) / (2 * kPi));
    auto got = wrapped;
    unwrap_phase(got);
    for (std::size_t t = 0; t < got.size(); ++t) {
      CHECK(got[t] == doctest::Approx(oracle[t]).epsilon(1e-12));
      CHECK(std::abs(got[t] - truth[t]) < 1e-9);
    }
  }
}

TEST_CASE("STFT power equals a dense windowed DFT") {
  StftConfig cfg;
  cfg.window = 64;
  cfg.hop = 16;
  cfg.fft_len = 100;
  cfg.max_bin = 20;
  const auto m = tone_rows(3, 300, 100.0, 7.0, 0.3);
  const auto spec = dfs_spectrogram(m, 100.0, cfg);
  REQUIRE(spec.power.rows == 41);
  REQUIRE(spec.power.cols == (300 - 64) / 16 + 1);
  for (std::size_t f = 0; f < spec.power.cols; f += 3) {
    CHECK(spec.frame_times[f] == doctest::Approx((static_cast<double>(f * 16) + 32.0) / 100.0));
    for (long k = -20; k <= 20; ++k) {
      const double want = dense_power(m, f * 16, 64, 100, k);
      CHECK(spec.power.at(static_cast<std::size_t>(k + 20), f) ==
            doctest::Approx(want).epsilon(1e-9).scale(1e-12));
    }
  }
  CHECK(spec.bin_hz.front() == doctest::Approx(-20.0));
  CHECK(spec.bin_hz.back() == doctest::Approx(20.0));
}

TEST_CASE("a +20 Hz tone peaks in the +20 Hz bin of every frame") {
  const auto m = tone_rows(4, 2000, 1000.0, 20.0);
  const auto spec = dfs_spectrogram(m, 1000.0);
  for (std::size_t f = 0; f < spec.power.cols; ++f) {
    std::size_t best = 0;
    for (std::size_t b = 0; b < spec.power.rows; ++b)
      if (spec.power.at(b, f) > spec.power.at(best, f)) best = b;
    CHECK(spec.bin_hz[best] == doctest::Approx(20.0));
  }
  CHECK(spec.out_of_band_fraction < 0.01);
}

TEST_CASE("static input vanishes after mean removal") {
  ComplexMatrix m;
  m.rows = 2;
  m.cols = 1000;
  m.values.assign(2000, Complex(0.7, -1.3));
  const auto spec = dfs_spectrogram(m, 1000.0);
  double total = 0.0;
  for (double v : spec.power.values) total += v;
  CHECK(total < 1e-12);
}

TEST_CASE("conjugating the input mirrors the spectrogram about 0 Hz") {
  auto m = tone_rows(2, 1200, 1000.0, 13.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.3);
  for (auto& z : m.values) z += Complex(g(rng), g(rng));
  auto conj = m;
  for (auto& z : conj.values) z = std::conj(z);
  const auto a = dfs_spectrogram(m, 1000.0), b = dfs_spectrogram(conj, 1000.0);
  const std::size_t bins = a.power.rows;
  for (std::size_t k = 0; k < bins; ++k)
    for (std::size_t f = 0; f < a.power.cols; ++f)
      CHECK(a.power.at(k, f) == doctest::Approx(b.power.at(bins - 1 - k, f)).epsilon(1e-9).scale(1e-15));
}

TEST_CASE("STFT errors and out-of-band accounting") {
  const auto m = tone_rows(1, 300, 1000.0, 5.0);
  CHECK_THROWS_AS(dfs_spectrogram(m, 1000.0), InvalidArgument);  // window 400 > 300
  StftConfig cfg;
  cfg.window = 200;
  cfg.fft_len = 100;
  CHECK_THROWS_AS(dfs_spectrogram(m, 1000.0, cfg), InvalidArgument);
  const auto fast = tone_rows(1, 1000, 1000.0, 150.0);
  CHECK(dfs_spectrogram(fast, 1000.0).out_of_band_fraction > 0.9);
}

TEST_CASE("a constant-velocity hand lands on v / lambda") {
  SceneConfig scene;
  scene.static_paths = {{Complex(1.0, 0.0), 3.0, 0.0}};
  scene.dynamic_path = {Complex(0.5, 0.0), 5.0, 0.0};
  scene.offset_step_std = 0.0;
  RecordingSpec spec;
  spec.n_subcarriers = 4;
  for (double v : {-1.2, 0.9}) {
    const GestureProfile g{0, VelocityFamily::kHold, v, 10.0, 0.0};
    const auto rec = synth_recording(scene, g, spec);
    const auto s = dfs_spectrogram(rec);
    const double want = v * spec.f_center / kSpeedOfLight;
    std::size_t best = 0;
    for (std::size_t b = 0; b < s.power.rows; ++b)
      if (s.power.at(b, 50) > s.power.at(best, 50)) best = b;
    CHECK(std::abs(s.bin_hz[best] - want) <= 1.0);
  }
}

TEST_CASE("bilinear resampling follows the closed form of the corner-aligned grid") {
  RealMatrix m(2, 2);
  m.at(0, 1) = 1.0;
  m.at(1, 0) = 1.0;
  const auto img = render_image(m);
  REQUIRE(img.size == 224);
  for (std::size_t r = 0; r < 224; r += 7)
    for (std::size_t c = 0; c < 224; c += 5) {
      const double x = static_cast<double>(c) / 223.0, y = static_cast<double>(r) / 223.0;
      CHECK(img.at(r, c) == doctest::Approx(x + y - 2 * x * y).epsilon(1e-12));
    }
  const double centre = (img.at(111, 111) + img.at(111, 112) + img.at(112, 111) + img.at(112, 112)) / 4;
  CHECK(std::abs(centre - 0.5) < 1e-6);
  CHECK(img.at(0, 0) == 0.0);
  CHECK(img.at(0, 223) == 1.0);
}

TEST_CASE("render_image normalizes to [0, 1] and handles degenerate input") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(3.0, 5.0);
  RealMatrix m(30, 2000);
  for (auto& v : m.values) v = g(rng);
  const auto img = render_image(m);
  const auto [lo, hi] = std::minmax_element(img.plane.begin(), img.plane.end());
  CHECK(*lo == 0.0);
  CHECK(*hi == 1.0);
  CHECK(img.pixels().size() == 3 * 224 * 224);

  RealMatrix flat(5, 5, 2.5);
  for (double v : render_image(flat).plane) CHECK(v == 0.5);
  m.values[17] = std::nan("");
  CHECK_THROWS_AS(render_image(m), InvalidArgument);
}

TEST_CASE("preprocess_recording yields two 224 images in [0, 1]") {
  auto cfg = default_dataset_config();
  cfg.reps = 1;
  const auto data = make_dataset(cfg.classes, {cfg.domains[0]}, 1, 42);
  const auto images = preprocess_recording(data[0].recording);
  for (const auto* im : {&images.phase, &images.dfs}) {
    CHECK(im->plane.size() == 224 * 224);
    for (double v : im->plane) REQUIRE((v >= 0.0 && v <= 1.0));
  }
}

}  // TEST_SUITE
