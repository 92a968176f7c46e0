#pragma once

// Naive loop implementations used as references for the optimized kernels.
// Accumulation is in long double so disagreements point at the kernel.

#include <cmath>
#include <cstddef>
#include <vector>

#include "wicbr/tensor.hpp"

namespace oracle {

using wicbr::Shape;
using wicbr::Tensor;

inline Tensor conv2d(const Tensor& x, const Tensor& w, const std::vector<double>& bias,
                     std::size_t stride, std::size_t pad) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t o = w.dim(0), k = w.dim(2);
  const std::size_t oh = (h + 2 * pad - k) / stride + 1, ow = (wd + 2 * pad - k) / stride + 1;
  Tensor y({n, o, oh, ow});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t oc = 0; oc < o; ++oc)
      for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
          long double acc = bias.empty() ? 0.0L : bias[oc];
          for (std::size_t ic = 0; ic < c; ++ic)
            for (std::size_t u = 0; u < k; ++u)
              for (std::size_t v = 0; v < k; ++v) {
                const long r = static_cast<long>(i * stride + u) - static_cast<long>(pad);
                const long s = static_cast<long>(j * stride + v) - static_cast<long>(pad);
                if (r < 0 || s < 0 || r >= static_cast<long>(h) || s >= static_cast<long>(wd)) continue;
                acc += static_cast<long double>(x.at(b, ic, r, s)) * w.at(oc, ic, u, v);
              }
          y.at(b, oc, i, j) = static_cast<double>(acc);
        }
  return y;
}

inline Tensor group_norm(const Tensor& x, std::size_t groups, const std::vector<double>& gamma,
                         const std::vector<double>& beta, double eps) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3), cg = c / groups;
  Tensor y(x.shape());
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t g = 0; g < groups; ++g) {
      long double sum = 0.0L, count = 0.0L;
      for (std::size_t ch = g * cg; ch < (g + 1) * cg; ++ch)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) sum += x.at(b, ch, i, j), count += 1;
      const long double mean = sum / count;
      long double var = 0.0L;
      for (std::size_t ch = g * cg; ch < (g + 1) * cg; ++ch)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) {
            const long double d = x.at(b, ch, i, j) - mean;
            var += d * d;
          }
      var /= count;
      const long double inv = 1.0L / std::sqrt(var + eps);
      for (std::size_t ch = g * cg; ch < (g + 1) * cg; ++ch)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j)
            y.at(b, ch, i, j) =
                static_cast<double>(gamma[ch] * (x.at(b, ch, i, j) - mean) * inv + beta[ch]);
    }
  return y;
}

inline Tensor batch_norm(const Tensor& x, const std::vector<double>& gamma,
                         const std::vector<double>& beta, const std::vector<double>& mean,
                         const std::vector<double>& var, double eps) {
  Tensor y(x.shape());
  for (std::size_t b = 0; b < x.dim(0); ++b)
    for (std::size_t c = 0; c < x.dim(1); ++c)
      for (std::size_t i = 0; i < x.dim(2); ++i)
        for (std::size_t j = 0; j < x.dim(3); ++j)
          y.at(b, c, i, j) = gamma[c] * (x.at(b, c, i, j) - mean[c]) / std::sqrt(var[c] + eps) + beta[c];
  return y;
}

inline long double log_sum_exp(const std::vector<long double>& z) {
  long double m = z[0];
  for (auto v : z) m = std::max(m, v);
  long double s = 0.0L;
  for (auto v : z) s += std::exp(v - m);
  return m + std::log(s);
}

inline Tensor softmax(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.dim(0); ++i) {
    std::vector<long double> row(x.dim(1));
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = x.at(i, j);
    const long double lse = log_sum_exp(row);
    for (std::size_t j = 0; j < row.size(); ++j) y.at(i, j) = static_cast<double>(std::exp(row[j] - lse));
  }
  return y;
}

inline Tensor linear(const Tensor& x, const Tensor& w, const std::vector<double>& bias) {
  Tensor y({x.dim(0), w.dim(0)});
  for (std::size_t i = 0; i < x.dim(0); ++i)
    for (std::size_t r = 0; r < w.dim(0); ++r) {
      long double acc = bias.empty() ? 0.0L : bias[r];
      for (std::size_t d = 0; d < x.dim(1); ++d) acc += static_cast<long double>(x.at(i, d)) * w.at(r, d);
      y.at(i, r) = static_cast<double>(acc);
    }
  return y;
}

inline double cross_entropy(const Tensor& logits, const std::vector<std::size_t>& labels) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < logits.dim(0); ++i) {
    std::vector<long double> row(logits.dim(1));
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = logits.at(i, j);
    total += log_sum_exp(row) - row[labels[i]];
  }
  return static_cast<double>(total / logits.dim(0));
}

inline double proxy_contrastive(const Tensor& x, const std::vector<std::size_t>& labels,
                                const Tensor& proxies, double tau, bool cosine) {
  long double total = 0.0L;
  for (std::size_t i = 0; i < x.dim(0); ++i) {
    long double xn = 0.0L;
    for (std::size_t d = 0; d < x.dim(1); ++d) xn += static_cast<long double>(x.at(i, d)) * x.at(i, d);
    std::vector<long double> sims(proxies.dim(0));
    for (std::size_t k = 0; k < sims.size(); ++k) {
      long double dot = 0.0L, wn = 0.0L;
      for (std::size_t d = 0; d < x.dim(1); ++d) {
        dot += static_cast<long double>(x.at(i, d)) * proxies.at(k, d);
        wn += static_cast<long double>(proxies.at(k, d)) * proxies.at(k, d);
      }
      if (cosine) dot /= std::sqrt(xn) * std::sqrt(wn);
      sims[k] = dot / tau;
    }
    total += log_sum_exp(sims) - sims[labels[i]];
  }
  return static_cast<double>(total / x.dim(0));
}

}  // namespace oracle
