#pragma once

// CSI -> network inputs: ratio phase image and Doppler (DFS) spectrogram image.

#include <cstddef>
#include <vector>

#include "wicbr/csi_model.hpp"

namespace wicbr {

/// Complex matrix [rows x cols], row-major.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> values;

  Complex& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  const Complex& at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Real matrix [rows x cols], row-major.
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

struct RatioOptions {
  std::size_t ant_a = 0;
  std::size_t ant_b = 1;
  double epsilon = 1e-9;
};

struct RatioResult {
  ComplexMatrix ratio;          // [subcarrier x time]
  std::size_t repaired_cells = 0;
};

/// H_a / H_b per (subcarrier, time). Cells with |H_b| < epsilon take the value
/// of the nearest valid cell in time (earlier wins ties). Throws if a whole
/// subcarrier row of antenna b is below epsilon.
RatioResult csi_ratio(const CsiRecording& rec, const RatioOptions& opt = {});

struct PhaseMatrix {
  RealMatrix values;  // [subcarrier x time], radians
  double fs = 0.0;
};

/// angle() in (-pi, pi]; optionally unwrapped along time per subcarrier.
PhaseMatrix phase_extract(const ComplexMatrix& ratio, double fs, bool unwrap = true);

/// Removes 2*pi jumps from a phase series in place (successive differences end up in [-pi, pi)).
void unwrap_phase(std::vector<double>& phase);

struct StftConfig {
  std::size_t window = 400;   // Hann, periodic
  std::size_t hop = 10;
  std::size_t fft_len = 1000;
  bool subtract_mean = true;
  std::size_t antenna = 0;
  int max_bin = 60;           // keep bins -max_bin..+max_bin
};

struct Spectrogram {
  RealMatrix power;                // [bins x frames]
  std::vector<double> bin_hz;      // strictly increasing, symmetric about 0
  std::vector<double> frame_times; // window centers, seconds
  double fs = 0.0;
  double out_of_band_fraction = 0.0;
};

/// Hann-windowed STFT power of one antenna stream, averaged over subcarriers.
/// Throws if window > T. Logs a warning when more than 20% of the energy lies
/// outside the retained bins.
Spectrogram dfs_spectrogram(const CsiRecording& rec, const StftConfig& cfg = {});

/// Same transform applied to an arbitrary set of complex series (rows).
Spectrogram dfs_spectrogram(const ComplexMatrix& streams, double fs, const StftConfig& cfg = {});

inline constexpr std::size_t kImageSize = 224;

/// Grayscale image replicated over three channels, values in [0, 1].
struct Image224 {
  std::size_t size = kImageSize;
  std::vector<double> plane;  // size x size, row-major; all three channels share it

  double at(std::size_t r, std::size_t c) const { return plane[r * size + c]; }
  /// Expanded [3 x size x size] pixel array.
  std::vector<double> pixels() const;
};

/// Bilinear (corner-aligned) resample to size x size, then min-max normalize.
/// A constant result maps to 0.5 everywhere.
Image224 render_image(const RealMatrix& m, std::size_t size = kImageSize);
inline Image224 render_image(const PhaseMatrix& p, std::size_t size = kImageSize) {
  return render_image(p.values, size);
}
inline Image224 render_image(const Spectrogram& s, std::size_t size = kImageSize) {
  return render_image(s.power, size);
}

/// Corner-aligned bilinear resample.
RealMatrix resample_bilinear(const RealMatrix& m, std::size_t out_rows, std::size_t out_cols);

struct PreprocessOptions {
  RatioOptions ratio;
  bool unwrap = true;
  StftConfig stft;
  std::size_t image_size = kImageSize;
};

struct SampleImages {
  Image224 phase;
  Image224 dfs;
};

SampleImages preprocess_recording(const CsiRecording& rec, const PreprocessOptions& opt = {});

}  // namespace wicbr
