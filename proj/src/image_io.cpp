#include "wicbr/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>

#include "wicbr/util.hpp"

namespace wicbr {

void write_dfs1(const std::string& path, const std::vector<Spectrogram>& receivers) {
  if (receivers.empty()) throw InvalidArgument("DFS1 needs at least one receiver");
  const auto& first = receivers.front();
  for (const auto& r : receivers)
    if (r.power.rows != first.power.rows || r.power.cols != first.power.cols)
      throw InvalidArgument("DFS1 receivers must share a shape");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + path);
  write_magic(os, "DFS1");
  write_u32(os, static_cast<std::uint32_t>(receivers.size()));
  write_u32(os, static_cast<std::uint32_t>(first.power.rows));
  write_u32(os, static_cast<std::uint32_t>(first.power.cols));
  write_f64(os, first.fs);
  for (const auto& r : receivers)
    for (double v : r.power.values) write_f32(os, static_cast<float>(v));
}

std::vector<Spectrogram> read_dfs1(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidArgument("cannot open " + path);
  expect_magic(is, "DFS1");
  const std::size_t n_rx = read_u32(is), n_bins = read_u32(is), n_frames = read_u32(is);
  const double fs = read_f64(is);
  if (n_bins % 2 == 0) throw InvalidArgument("DFS1 bin count must be odd");
  std::vector<Spectrogram> out(n_rx);
  const long half = static_cast<long>(n_bins / 2);
  for (auto& s : out) {
    s.fs = fs;
    s.power = RealMatrix(n_bins, n_frames);
    for (long k = -half; k <= half; ++k) s.bin_hz.push_back(static_cast<double>(k) * fs / 1000.0);
    for (auto& v : s.power.values) v = read_f32(is);
  }
  return out;
}

void write_img224(const std::string& path, const Image224& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + path);
  for (int c = 0; c < 3; ++c)
    for (double v : img.plane) write_f32(os, static_cast<float>(v));
}

Image224 read_img224(const std::string& path) {
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(path, ec);
  if (ec) throw InvalidArgument("cannot stat " + path);
  const std::size_t n = bytes / sizeof(float);
  const auto size = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n) / 3.0)));
  if (bytes % sizeof(float) != 0 || 3 * size * size != n || size == 0)
    throw InvalidArgument("img224 file has an invalid size: " + path);
  std::ifstream is(path, std::ios::binary);
  Image224 img;
  img.size = size;
  img.plane.resize(size * size);
  for (auto& v : img.plane) v = read_f32(is);
  // Bitwise so that NaN pixels still count as identical.
  for (int c = 1; c < 3; ++c)
    for (double v : img.plane)
      if (std::bit_cast<std::uint32_t>(static_cast<float>(v)) != std::bit_cast<std::uint32_t>(read_f32(is)))
        throw InvalidArgument("img224 channels differ: " + path);
  return img;
}

void write_png(const std::string& path, const Image224& img) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw InvalidArgument("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng write failed for " + path);
  }
  const auto size = static_cast<png_uint_32>(img.size);
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, size, size, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(3 * img.size);
  for (std::size_t r = 0; r < img.size; ++r) {
    for (std::size_t c = 0; c < img.size; ++c) {
      const auto v = static_cast<png_byte>(std::lround(255.0 * img.at(r, c)));
      row[3 * c] = row[3 * c + 1] = row[3 * c + 2] = v;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace wicbr
