#include "wicbr/preprocess.hpp"

#include <fftw3.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "wicbr/util.hpp"

namespace wicbr {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& fftw_plan_mutex() {
  static std::mutex mu;
  return mu;
}

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    in_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    out_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    std::lock_guard lock(fftw_plan_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    {
      std::lock_guard lock(fftw_plan_mutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  fftw_complex* in() { return in_; }
  const fftw_complex* out() const { return out_; }
  void execute() { fftw_execute(plan_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace

RatioResult csi_ratio(const CsiRecording& rec, const RatioOptions& opt) {
  if (opt.ant_a == opt.ant_b) throw InvalidArgument("csi_ratio needs two distinct antennas");
  if (opt.ant_a >= rec.n_antennas || opt.ant_b >= rec.n_antennas)
    throw InvalidArgument("csi_ratio antenna index out of range");

  RatioResult res;
  auto& m = res.ratio;
  m.rows = rec.n_subcarriers;
  m.cols = rec.n_samples;
  m.values.assign(m.rows * m.cols, Complex{});
  std::vector<char> valid(m.cols);
  for (std::size_t s = 0; s < m.rows; ++s) {
    const auto num = rec.stream(s, opt.ant_a);
    const auto den = rec.stream(s, opt.ant_b);
    std::size_t n_valid = 0;
    for (std::size_t t = 0; t < m.cols; ++t) {
      valid[t] = std::abs(den[t]) >= opt.epsilon;
      if (valid[t]) {
        m.at(s, t) = num[t] / den[t];
        ++n_valid;
      }
    }
    if (n_valid == 0)
      throw InvalidArgument("csi_ratio: subcarrier " + std::to_string(s) +
                            " of the reference antenna is degenerate");
    if (n_valid == m.cols) continue;
    res.repaired_cells += m.cols - n_valid;
    // Nearest valid neighbour in time; two sweeps track the distance to it.
    std::vector<std::size_t> prev(m.cols, m.cols), next(m.cols, m.cols);
    for (std::size_t t = 0, last = m.cols; t < m.cols; ++t) {
      if (valid[t]) last = t;
      prev[t] = last;
    }
    for (std::size_t t = m.cols, last = m.cols; t-- > 0;) {
      if (valid[t]) last = t;
      next[t] = last;
    }
    for (std::size_t t = 0; t < m.cols; ++t) {
      if (valid[t]) continue;
      std::size_t src;
      if (prev[t] == m.cols) src = next[t];
      else if (next[t] == m.cols) src = prev[t];
      else src = (t - prev[t] <= next[t] - t) ? prev[t] : next[t];
      m.at(s, t) = m.at(s, src);
    }
  }
  return res;
}

void unwrap_phase(std::vector<double>& phase) {
  double correction = 0.0;
  for (std::size_t t = 1; t < phase.size(); ++t) {
    const double raw = phase[t] + correction;
    const double d = raw - phase[t - 1];
    double dd = std::fmod(d + kPi, 2.0 * kPi);
    if (dd < 0) dd += 2.0 * kPi;
    dd -= kPi;
    if (dd == -kPi && d > 0) dd = kPi;
    if (std::abs(d) >= kPi) correction += dd - d;
    phase[t] = phase[t] + correction;
  }
}

PhaseMatrix phase_extract(const ComplexMatrix& ratio, double fs, bool unwrap) {
  PhaseMatrix p;
  p.fs = fs;
  p.values = RealMatrix(ratio.rows, ratio.cols);
  std::vector<double> row(ratio.cols);
  for (std::size_t s = 0; s < ratio.rows; ++s) {
    for (std::size_t t = 0; t < ratio.cols; ++t) {
      const Complex z = ratio.at(s, t);
      double a = std::atan2(z.imag(), z.real());
      if (a <= -kPi) a = kPi;  // keep the half-open interval (-pi, pi]
      row[t] = a;
    }
    if (unwrap) unwrap_phase(row);
    std::copy(row.begin(), row.end(), p.values.values.begin() + static_cast<long>(s * ratio.cols));
  }
  return p;
}

Spectrogram dfs_spectrogram(const ComplexMatrix& streams, double fs, const StftConfig& cfg) {
  const std::size_t n_t = streams.cols;
  if (cfg.window == 0 || cfg.hop == 0) throw InvalidArgument("STFT window and hop must be > 0");
  if (cfg.window > n_t) throw InvalidArgument("STFT window longer than the recording");
  if (cfg.fft_len < cfg.window) throw InvalidArgument("fft_len must be >= window");
  if (cfg.max_bin < 0 || static_cast<std::size_t>(2 * cfg.max_bin + 1) > cfg.fft_len)
    throw InvalidArgument("max_bin does not fit in fft_len");
  if (streams.rows == 0) throw InvalidArgument("no streams to transform");

  const std::size_t n_frames = (n_t - cfg.window) / cfg.hop + 1;
  const std::size_t n_bins = static_cast<std::size_t>(2 * cfg.max_bin + 1);

  std::vector<double> window(cfg.window);
  for (std::size_t n = 0; n < cfg.window; ++n)
    window[n] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(n) /
                                     static_cast<double>(cfg.window));

  Spectrogram out;
  out.fs = fs;
  out.power = RealMatrix(n_bins, n_frames);
  for (int k = -cfg.max_bin; k <= cfg.max_bin; ++k)
    out.bin_hz.push_back(static_cast<double>(k) * fs / static_cast<double>(cfg.fft_len));
  for (std::size_t f = 0; f < n_frames; ++f)
    out.frame_times.push_back((static_cast<double>(f * cfg.hop) +
                               0.5 * static_cast<double>(cfg.window)) / fs);

  FftPlan fft(cfg.fft_len);
  double kept = 0.0, total = 0.0;
  std::vector<Complex> series(n_t);
  for (std::size_t s = 0; s < streams.rows; ++s) {
    for (std::size_t t = 0; t < n_t; ++t) series[t] = streams.at(s, t);
    if (cfg.subtract_mean) {
      Complex mean{};
      for (const auto& z : series) mean += z;
      mean /= static_cast<double>(n_t);
      for (auto& z : series) z -= mean;
    }
    for (std::size_t f = 0; f < n_frames; ++f) {
      const std::size_t start = f * cfg.hop;
      fftw_complex* in = fft.in();
      for (std::size_t n = 0; n < cfg.fft_len; ++n) {
        if (n < cfg.window) {
          in[n][0] = series[start + n].real() * window[n];
          in[n][1] = series[start + n].imag() * window[n];
        } else {
          in[n][0] = 0.0;
          in[n][1] = 0.0;
        }
      }
      fft.execute();
      const fftw_complex* X = fft.out();
      for (std::size_t n = 0; n < cfg.fft_len; ++n) total += X[n][0] * X[n][0] + X[n][1] * X[n][1];
      for (std::size_t b = 0; b < n_bins; ++b) {
        const long k = static_cast<long>(b) - cfg.max_bin;
        const std::size_t idx = static_cast<std::size_t>(
            (k + static_cast<long>(cfg.fft_len)) % static_cast<long>(cfg.fft_len));
        const double p = X[idx][0] * X[idx][0] + X[idx][1] * X[idx][1];
        out.power.at(b, f) += p;
        kept += p;
      }
    }
  }
  const double inv_rows = 1.0 / static_cast<double>(streams.rows);
  for (auto& v : out.power.values) v *= inv_rows;
  out.out_of_band_fraction = total > 0 ? (total - kept) / total : 0.0;
  if (out.out_of_band_fraction > 0.2)
    spdlog::warn("dfs_spectrogram: {:.1f}% of the energy lies outside +-{} bins",
                 100.0 * out.out_of_band_fraction, cfg.max_bin);
  return out;
}

Spectrogram dfs_spectrogram(const CsiRecording& rec, const StftConfig& cfg) {
  if (cfg.antenna >= rec.n_antennas) throw InvalidArgument("DFS antenna index out of range");
  ComplexMatrix streams;
  streams.rows = rec.n_subcarriers;
  streams.cols = rec.n_samples;
  streams.values.resize(streams.rows * streams.cols);
  for (std::size_t s = 0; s < rec.n_subcarriers; ++s) {
    const auto src = rec.stream(s, cfg.antenna);
    std::copy(src.begin(), src.end(), streams.values.begin() + static_cast<long>(s * streams.cols));
  }
  return dfs_spectrogram(streams, rec.fs, cfg);
}

std::vector<double> Image224::pixels() const {
  std::vector<double> out;
  out.reserve(3 * plane.size());
  for (int c = 0; c < 3; ++c) out.insert(out.end(), plane.begin(), plane.end());
  return out;
}

RealMatrix resample_bilinear(const RealMatrix& m, std::size_t out_rows, std::size_t out_cols) {
  if (m.rows == 0 || m.cols == 0) throw InvalidArgument("cannot resample an empty matrix");
  RealMatrix out(out_rows, out_cols);
  auto coord = [](std::size_t i, std::size_t n_out, std::size_t n_in) {
    if (n_out == 1 || n_in == 1) return 0.0;
    return static_cast<double>(i) * static_cast<double>(n_in - 1) /
           static_cast<double>(n_out - 1);
  };
  for (std::size_t r = 0; r < out_rows; ++r) {
    const double y = coord(r, out_rows, m.rows);
    const auto y0 = std::min(static_cast<std::size_t>(y), m.rows - 1);
    const auto y1 = std::min(y0 + 1, m.rows - 1);
    const double fy = y - static_cast<double>(y0);
    for (std::size_t c = 0; c < out_cols; ++c) {
      const double x = coord(c, out_cols, m.cols);
      const auto x0 = std::min(static_cast<std::size_t>(x), m.cols - 1);
      const auto x1 = std::min(x0 + 1, m.cols - 1);
      const double fx = x - static_cast<double>(x0);
      out.at(r, c) = (1 - fy) * ((1 - fx) * m.at(y0, x0) + fx * m.at(y0, x1)) +
                     fy * ((1 - fx) * m.at(y1, x0) + fx * m.at(y1, x1));
    }
  }
  return out;
}

Image224 render_image(const RealMatrix& m, std::size_t size) {
  for (double v : m.values)
    if (!std::isfinite(v)) throw InvalidArgument("render_image: non-finite input");
  RealMatrix r = (m.rows == size && m.cols == size) ? m : resample_bilinear(m, size, size);
  const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
  const double min = *lo, max = *hi;
  Image224 img;
  img.size = size;
  img.plane.resize(size * size);
  if (!(max > min)) {
    std::fill(img.plane.begin(), img.plane.end(), 0.5);
    return img;
  }
  const double scale = 1.0 / (max - min);
  for (std::size_t i = 0; i < r.values.size(); ++i)
    img.plane[i] = std::clamp((r.values[i] - min) * scale, 0.0, 1.0);
  return img;
}

SampleImages preprocess_recording(const CsiRecording& rec, const PreprocessOptions& opt) {
  const auto ratio = csi_ratio(rec, opt.ratio);
  const auto phase = phase_extract(ratio.ratio, rec.fs, opt.unwrap);
  const auto dfs = dfs_spectrogram(rec, opt.stft);
  return {render_image(phase, opt.image_size), render_image(dfs, opt.image_size)};
}

}  // namespace wicbr
