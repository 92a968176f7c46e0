#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "wicbr/tensor.hpp"

namespace testing {

inline wicbr::Tensor random_tensor(wicbr::Shape shape, std::uint64_t seed, double lo = -1.0,
                                   double hi = 1.0) {
  wicbr::Tensor t(std::move(shape));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : t.data()) v = u(rng);
  return t;
}

inline double max_abs_diff(const wicbr::Tensor& a, const wicbr::Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Fresh scratch directory under WICBR_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("WICBR_TEST_TMP");
  std::filesystem::path dir =
      std::filesystem::path(root ? root : std::filesystem::temp_directory_path().string()) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
