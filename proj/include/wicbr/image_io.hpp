#pragma once

// Spectrogram and image file formats.
//
// DFS1:   "DFS1" | u32 n_receivers | u32 n_bins | u32 frames | f64 fs |
//         f32 power, receiver-major then bin then frame.
// img224: raw little-endian f32 [3 x 224 x 224], channel-major. No header.
// PNG:    8-bit RGB, for inspection only.

#include <string>
#include <vector>

#include "wicbr/preprocess.hpp"

namespace wicbr {

void write_dfs1(const std::string& path, const std::vector<Spectrogram>& receivers);
/// Reads back power matrices; bin_hz is rebuilt assuming 1 Hz-equivalent bins
/// centred on zero scaled by fs / 1000.
std::vector<Spectrogram> read_dfs1(const std::string& path);

void write_img224(const std::string& path, const Image224& img);
/// Reads a raw [3 x size x size] f32 image; the file size fixes `size`.
/// Throws unless the three channels are identical.
Image224 read_img224(const std::string& path);

void write_png(const std::string& path, const Image224& img);

}  // namespace wicbr
