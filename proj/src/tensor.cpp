#include "wicbr/tensor.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wicbr/util.hpp"

namespace wicbr {

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

namespace {
std::size_t shape_product(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}
}  // namespace

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_product(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_))
    throw InvalidArgument("tensor data length does not match shape " + shape_string(shape_));
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::reshaped(Shape shape) const { return Tensor(std::move(shape), data_); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape())
    throw InvalidArgument(std::string(what) + ": shape mismatch " + shape_string(a.shape()) +
                          " vs " + shape_string(b.shape()));
}

void write_tensor(std::ostream& os, const Tensor& t) {
  write_magic(os, "TNS1");
  write_u32(os, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.shape()) write_u32(os, static_cast<std::uint32_t>(d));
  for (double v : t.data()) write_f64(os, v);
}

Tensor read_tensor(std::istream& is) {
  expect_magic(is, "TNS1");
  const std::uint32_t rank = read_u32(is);
  if (rank > 8) throw InvalidArgument("tensor rank too large");
  Shape shape(rank);
  for (auto& d : shape) d = read_u32(is);
  Tensor t(shape);
  for (auto& v : t.data()) v = read_f64(is);
  return t;
}

namespace ops {

namespace {

struct ConvGeom {
  std::size_t n, c, h, w, o, k, stride, pad, ho, wo;
};

ConvGeom conv_geometry(const Tensor& x, const Tensor& w, std::size_t stride, std::size_t pad) {
  if (x.rank() != 4 || w.rank() != 4) throw InvalidArgument("conv2d expects rank-4 x and w");
  if (w.dim(2) != w.dim(3) || w.dim(2) % 2 == 0)
    throw InvalidArgument("conv2d kernel must be square with odd size");
  if (w.dim(1) != x.dim(1))
    throw InvalidArgument("conv2d channel mismatch: x " + shape_string(x.shape()) + " w " +
                          shape_string(w.shape()));
  if (stride == 0) throw InvalidArgument("conv2d stride must be >= 1");
  ConvGeom g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(2), stride, pad, 0, 0};
  if (g.h + 2 * pad < g.k || g.w + 2 * pad < g.k)
    throw InvalidArgument("conv2d kernel larger than padded input");
  g.ho = (g.h + 2 * pad - g.k) / stride + 1;
  g.wo = (g.w + 2 * pad - g.k) / stride + 1;
  return g;
}

// Range of output indices o with 0 <= o*stride + off < in, off = tap - pad.
std::pair<std::size_t, std::size_t> valid_range(std::size_t tap, std::size_t pad,
                                                std::size_t in, std::size_t out,
                                                std::size_t stride) {
  const long off = static_cast<long>(tap) - static_cast<long>(pad);
  const long s = static_cast<long>(stride);
  long lo = off >= 0 ? 0 : (-off + s - 1) / s;
  long hi = (static_cast<long>(in) - off + s - 1) / s;  // first invalid
  hi = std::clamp(hi, 0L, static_cast<long>(out));
  lo = std::clamp(lo, 0L, hi);
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

// im2col for one sample: cols[(c*k + ki)*k + kj][oh*wo + ow].
void im2col(const double* x, const ConvGeom& g, double* cols) {
  const std::size_t plane = g.ho * g.wo;
  for (std::size_t c = 0; c < g.c; ++c)
    for (std::size_t ki = 0; ki < g.k; ++ki)
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        double* row = cols + ((c * g.k + ki) * g.k + kj) * plane;
        std::fill(row, row + plane, 0.0);
        const auto [oh0, oh1] = valid_range(ki, g.pad, g.h, g.ho, g.stride);
        const auto [ow0, ow1] = valid_range(kj, g.pad, g.w, g.wo, g.stride);
        for (std::size_t oh = oh0; oh < oh1; ++oh) {
          const double* xr = x + (c * g.h + oh * g.stride + ki - g.pad) * g.w;
          double* rr = row + oh * g.wo;
          for (std::size_t ow = ow0; ow < ow1; ++ow) rr[ow] = xr[ow * g.stride + kj - g.pad];
        }
      }
}

void col2im_add(const double* cols, const ConvGeom& g, double* dx) {
  const std::size_t plane = g.ho * g.wo;
  for (std::size_t c = 0; c < g.c; ++c)
    for (std::size_t ki = 0; ki < g.k; ++ki)
      for (std::size_t kj = 0; kj < g.k; ++kj) {
        const double* row = cols + ((c * g.k + ki) * g.k + kj) * plane;
        const auto [oh0, oh1] = valid_range(ki, g.pad, g.h, g.ho, g.stride);
        const auto [ow0, ow1] = valid_range(kj, g.pad, g.w, g.wo, g.stride);
        for (std::size_t oh = oh0; oh < oh1; ++oh) {
          double* xr = dx + (c * g.h + oh * g.stride + ki - g.pad) * g.w;
          const double* rr = row + oh * g.wo;
          for (std::size_t ow = ow0; ow < ow1; ++ow) xr[ow * g.stride + kj - g.pad] += rr[ow];
        }
      }
}

// Shifted multiply-accumulate used by the stride-1 direct path:
// dst[oh, ow] += s * src[oh + ki - pad, ow + kj - pad] over the valid window.
void shifted_axpy(double s, const double* src, std::size_t src_h, std::size_t src_w, double* dst,
                  std::size_t dst_h, std::size_t dst_w, std::size_t ki, std::size_t kj,
                  std::size_t pad) {
  const auto [r0, r1] = valid_range(ki, pad, src_h, dst_h, 1);
  const auto [c0, c1] = valid_range(kj, pad, src_w, dst_w, 1);
  for (std::size_t r = r0; r < r1; ++r) {
    const double* sr = src + (r + ki - pad) * src_w;
    double* dr = dst + r * dst_w;
    for (std::size_t c = c0; c < c1; ++c) dr[c] += s * sr[c + kj - pad];
  }
}

Tensor conv2d_direct(const Tensor& x, const Tensor& w, std::span<const double> bias,
                     const ConvGeom& g) {
  Tensor y({g.n, g.o, g.ho, g.wo});
  const std::size_t in_plane = g.h * g.w, out_plane = g.ho * g.wo;
  for (std::size_t n = 0; n < g.n; ++n)
    for (std::size_t o = 0; o < g.o; ++o) {
      double* yp = y.ptr() + (n * g.o + o) * out_plane;
      if (!bias.empty()) std::fill(yp, yp + out_plane, bias[o]);
      for (std::size_t c = 0; c < g.c; ++c) {
        const double* xp = x.ptr() + (n * g.c + c) * in_plane;
        for (std::size_t ki = 0; ki < g.k; ++ki)
          for (std::size_t kj = 0; kj < g.k; ++kj)
            shifted_axpy(w.at(o, c, ki, kj), xp, g.h, g.w, yp, g.ho, g.wo, ki, kj, g.pad);
      }
    }
  return y;
}

Tensor conv2d_gemm(const Tensor& x, const Tensor& w, std::span<const double> bias,
                   const ConvGeom& g) {
  Tensor y({g.n, g.o, g.ho, g.wo});
  const std::size_t plane = g.ho * g.wo, ckk = g.c * g.k * g.k;
  std::vector<double> cols(ckk * plane);
  for (std::size_t n = 0; n < g.n; ++n) {
    im2col(x.ptr() + n * g.c * g.h * g.w, g, cols.data());
    double* yp = y.ptr() + n * g.o * plane;
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(g.o),
                static_cast<int>(plane), static_cast<int>(ckk), 1.0, w.ptr(),
                static_cast<int>(ckk), cols.data(), static_cast<int>(plane), 0.0, yp,
                static_cast<int>(plane));
    if (!bias.empty())
      for (std::size_t o = 0; o < g.o; ++o)
        for (std::size_t i = 0; i < plane; ++i) yp[o * plane + i] += bias[o];
  }
  return y;
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& w, std::span<const double> bias, std::size_t stride,
              std::size_t pad) {
  const ConvGeom g = conv_geometry(x, w, stride, pad);
  if (!bias.empty() && bias.size() != g.o) throw InvalidArgument("conv2d bias length mismatch");
  return stride == 1 ? conv2d_direct(x, w, bias, g) : conv2d_gemm(x, w, bias, g);
}

Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy,
                            std::size_t stride, std::size_t pad, bool need_dx) {
  const ConvGeom g = conv_geometry(x, w, stride, pad);
  if (dy.shape() != Shape{g.n, g.o, g.ho, g.wo})
    throw InvalidArgument("conv2d_backward: dy shape " + shape_string(dy.shape()));
  Conv2dGrads out;
  out.dw = Tensor(w.shape());
  out.db.assign(g.o, 0.0);
  if (need_dx) out.dx = Tensor(x.shape());
  const std::size_t in_plane = g.h * g.w, out_plane = g.ho * g.wo;

  for (std::size_t n = 0; n < g.n; ++n)
    for (std::size_t o = 0; o < g.o; ++o) {
      const double* dyp = dy.ptr() + (n * g.o + o) * out_plane;
      double s = 0.0;
      for (std::size_t i = 0; i < out_plane; ++i) s += dyp[i];
      out.db[o] += s;
    }

  if (stride == 1) {
    std::vector<double> acc(g.wo);
    for (std::size_t n = 0; n < g.n; ++n)
      for (std::size_t o = 0; o < g.o; ++o) {
        const double* dyp = dy.ptr() + (n * g.o + o) * out_plane;
        for (std::size_t c = 0; c < g.c; ++c) {
          const double* xp = x.ptr() + (n * g.c + c) * in_plane;
          for (std::size_t ki = 0; ki < g.k; ++ki)
            for (std::size_t kj = 0; kj < g.k; ++kj) {
              // Row-vector accumulator keeps the inner loop free of a scalar reduction.
              std::fill(acc.begin(), acc.end(), 0.0);
              const auto [r0, r1] = valid_range(ki, g.pad, g.h, g.ho, 1);
              const auto [c0, c1] = valid_range(kj, g.pad, g.w, g.wo, 1);
              for (std::size_t r = r0; r < r1; ++r) {
                const double* xr = xp + (r + ki - g.pad) * g.w;
                const double* dr = dyp + r * g.wo;
                for (std::size_t cc = c0; cc < c1; ++cc) acc[cc] += dr[cc] * xr[cc + kj - g.pad];
              }
              double s = 0.0;
              for (std::size_t cc = c0; cc < c1; ++cc) s += acc[cc];
              out.dw.at(o, c, ki, kj) += s;
              if (need_dx) {
                // Transposed shift: dx[r + ki - pad, c + kj - pad] += w * dy[r, c].
                double* dxp = out.dx.ptr() + (n * g.c + c) * in_plane;
                const double wv = w.at(o, c, ki, kj);
                for (std::size_t r = r0; r < r1; ++r) {
                  double* xr = dxp + (r + ki - g.pad) * g.w;
                  const double* dr = dyp + r * g.wo;
                  for (std::size_t cc = c0; cc < c1; ++cc) xr[cc + kj - g.pad] += wv * dr[cc];
                }
              }
            }
        }
      }
    return out;
  }

  const std::size_t ckk = g.c * g.k * g.k;
  std::vector<double> cols(ckk * out_plane);
  std::vector<double> dcols(need_dx ? ckk * out_plane : 0);
  for (std::size_t n = 0; n < g.n; ++n) {
    im2col(x.ptr() + n * g.c * in_plane, g, cols.data());
    const double* dyp = dy.ptr() + n * g.o * out_plane;
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(g.o),
                static_cast<int>(ckk), static_cast<int>(out_plane), 1.0, dyp,
                static_cast<int>(out_plane), cols.data(), static_cast<int>(out_plane), 1.0,
                out.dw.ptr(), static_cast<int>(ckk));
    if (need_dx) {
      cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(ckk),
                  static_cast<int>(out_plane), static_cast<int>(g.o), 1.0, w.ptr(),
                  static_cast<int>(ckk), dyp, static_cast<int>(out_plane), 0.0, dcols.data(),
                  static_cast<int>(out_plane));
      col2im_add(dcols.data(), g, out.dx.ptr() + n * g.c * in_plane);
    }
  }
  return out;
}

Tensor group_norm(const Tensor& x, std::size_t groups, std::span<const double> gamma,
                  std::span<const double> beta, double eps, GroupNormCache* cache) {
  if (x.rank() != 4) throw InvalidArgument("group_norm expects (N, C, H, W)");
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  if (groups == 0 || c % groups != 0) throw InvalidArgument("group_norm: C % groups != 0");
  if (gamma.size() != c || beta.size() != c) throw InvalidArgument("group_norm affine length");
  if (!(eps > 0)) throw InvalidArgument("group_norm eps must be > 0");
  const std::size_t cg = c / groups, count = cg * plane;

  Tensor y(x.shape());
  Tensor xhat(x.shape());
  std::vector<double> inv_std(n * groups);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t gi = 0; gi < groups; ++gi) {
      const std::size_t base = (i * c + gi * cg) * plane;
      double mean = 0.0;
      for (std::size_t k = 0; k < count; ++k) mean += x[base + k];
      mean /= static_cast<double>(count);
      double var = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        const double d = x[base + k] - mean;
        var += d * d;
      }
      var /= static_cast<double>(count);
      const double is = 1.0 / std::sqrt(var + eps);
      inv_std[i * groups + gi] = is;
      for (std::size_t ch = 0; ch < cg; ++ch) {
        const std::size_t channel = gi * cg + ch;
        for (std::size_t p = 0; p < plane; ++p) {
          const std::size_t idx = base + ch * plane + p;
          xhat[idx] = (x[idx] - mean) * is;
          y[idx] = gamma[channel] * xhat[idx] + beta[channel];
        }
      }
    }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

NormGrads group_norm_backward(const Tensor& dy, std::size_t groups,
                              std::span<const double> gamma, const GroupNormCache& cache) {
  require_same_shape(dy, cache.xhat, "group_norm_backward");
  const std::size_t n = dy.dim(0), c = dy.dim(1), plane = dy.dim(2) * dy.dim(3);
  const std::size_t cg = c / groups, count = cg * plane;
  NormGrads g{Tensor(dy.shape()), std::vector<double>(c, 0.0), std::vector<double>(c, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t gi = 0; gi < groups; ++gi) {
      const std::size_t base = (i * c + gi * cg) * plane;
      double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
      for (std::size_t ch = 0; ch < cg; ++ch) {
        const std::size_t channel = gi * cg + ch;
        for (std::size_t p = 0; p < plane; ++p) {
          const std::size_t idx = base + ch * plane + p;
          const double dxh = dy[idx] * gamma[channel];
          sum_dxhat += dxh;
          sum_dxhat_xhat += dxh * cache.xhat[idx];
          g.dgamma[channel] += dy[idx] * cache.xhat[idx];
          g.dbeta[channel] += dy[idx];
        }
      }
      const double is = cache.inv_std[i * groups + gi];
      const double inv_count = 1.0 / static_cast<double>(count);
      for (std::size_t ch = 0; ch < cg; ++ch) {
        const std::size_t channel = gi * cg + ch;
        for (std::size_t p = 0; p < plane; ++p) {
          const std::size_t idx = base + ch * plane + p;
          const double dxh = dy[idx] * gamma[channel];
          g.dx[idx] = is * (dxh - inv_count * sum_dxhat -
                            cache.xhat[idx] * inv_count * sum_dxhat_xhat);
        }
      }
    }
  return g;
}

namespace {
void check_bn(const Tensor& x, const BatchNormView& bn) {
  if (x.rank() != 4) throw InvalidArgument("batch_norm expects (N, C, H, W)");
  const std::size_t c = x.dim(1);
  if (bn.gamma.size() != c || bn.beta.size() != c || bn.running_mean.size() != c ||
      bn.running_var.size() != c)
    throw InvalidArgument("batch_norm parameter length mismatch");
}
}  // namespace

Tensor batch_norm(const Tensor& x, const BatchNormView& bn) {
  check_bn(x, bn);
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double is = 1.0 / std::sqrt(bn.running_var[ch] + bn.eps);
      const double a = bn.gamma[ch] * is;
      const double b = bn.beta[ch] - a * bn.running_mean[ch];
      const std::size_t base = (i * c + ch) * plane;
      for (std::size_t p = 0; p < plane; ++p) y[base + p] = a * x[base + p] + b;
    }
  return y;
}

NormGrads batch_norm_backward(const Tensor& x, const Tensor& dy, const BatchNormView& bn) {
  check_bn(x, bn);
  require_same_shape(x, dy, "batch_norm_backward");
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  NormGrads g{Tensor(x.shape()), std::vector<double>(c, 0.0), std::vector<double>(c, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double is = 1.0 / std::sqrt(bn.running_var[ch] + bn.eps);
      const std::size_t base = (i * c + ch) * plane;
      double sg = 0.0, sb = 0.0;
      for (std::size_t p = 0; p < plane; ++p) {
        const double d = dy[base + p];
        g.dx[base + p] = d * bn.gamma[ch] * is;
        sg += d * (x[base + p] - bn.running_mean[ch]) * is;
        sb += d;
      }
      g.dgamma[ch] += sg;
      g.dbeta[ch] += sb;
    }
  return g;
}

double sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y;
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& dy) {
  require_same_shape(y, dy, "sigmoid_backward");
  Tensor dx(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) dx[i] = dy[i] * y[i] * (1.0 - y[i]);
  return dx;
}

Tensor relu(const Tensor& x) {
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] < 0 ? 0.0 : x[i];  // NaN passes through
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  require_same_shape(x, dy, "relu_backward");
  Tensor dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0 ? dy[i] : 0.0;
  return dx;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] * b[i];
  return y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
  return y;
}

Tensor scale(const Tensor& a, double s) {
  Tensor y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] * s;
  return y;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.rank() != 4 || b.rank() != 4 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) ||
      a.dim(3) != b.dim(3))
    throw InvalidArgument("concat_channels: incompatible " + shape_string(a.shape()) + " and " +
                          shape_string(b.shape()));
  const std::size_t n = a.dim(0), ca = a.dim(1), cb = b.dim(1), plane = a.dim(2) * a.dim(3);
  Tensor y({n, ca + cb, a.dim(2), a.dim(3)});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(a.ptr() + i * ca * plane, ca * plane, y.ptr() + i * (ca + cb) * plane);
    std::copy_n(b.ptr() + i * cb * plane, cb * plane, y.ptr() + (i * (ca + cb) + ca) * plane);
  }
  return y;
}

std::pair<Tensor, Tensor> split_channels(const Tensor& x, std::size_t at) {
  if (x.rank() != 4 || at > x.dim(1)) throw InvalidArgument("split_channels: bad split");
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  Tensor a({n, at, x.dim(2), x.dim(3)}), b({n, c - at, x.dim(2), x.dim(3)});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(x.ptr() + i * c * plane, at * plane, a.ptr() + i * at * plane);
    std::copy_n(x.ptr() + (i * c + at) * plane, (c - at) * plane, b.ptr() + i * (c - at) * plane);
  }
  return {std::move(a), std::move(b)};
}

Tensor global_avg_pool(const Tensor& x) {
  if (x.rank() != 4) throw InvalidArgument("global_avg_pool expects (N, C, H, W)");
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  Tensor y({n, c});
  for (std::size_t i = 0; i < n * c; ++i) {
    double s = 0.0;
    for (std::size_t p = 0; p < plane; ++p) s += x[i * plane + p];
    y[i] = s / static_cast<double>(plane);
  }
  return y;
}

Tensor global_avg_pool_backward(const Tensor& dy, const Shape& x_shape) {
  const std::size_t plane = x_shape.at(2) * x_shape.at(3);
  if (dy.shape() != Shape{x_shape.at(0), x_shape.at(1)})
    throw InvalidArgument("global_avg_pool_backward: shape mismatch");
  Tensor dx(x_shape);
  for (std::size_t i = 0; i < dy.size(); ++i) {
    const double g = dy[i] / static_cast<double>(plane);
    for (std::size_t p = 0; p < plane; ++p) dx[i * plane + p] = g;
  }
  return dx;
}

Tensor linear(const Tensor& x, const Tensor& w, std::span<const double> bias) {
  if (x.rank() != 2 || w.rank() != 2 || x.dim(1) != w.dim(1))
    throw InvalidArgument("linear: incompatible " + shape_string(x.shape()) + " and " +
                          shape_string(w.shape()));
  const std::size_t n = x.dim(0), d = x.dim(1), r = w.dim(0);
  if (!bias.empty() && bias.size() != r) throw InvalidArgument("linear: bias length mismatch");
  Tensor y({n, r});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      double s = bias.empty() ? 0.0 : bias[j];
      for (std::size_t k = 0; k < d; ++k) s += w.at(j, k) * x.at(i, k);
      y.at(i, j) = s;
    }
  return y;
}

LinearGrads linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy) {
  const std::size_t n = x.dim(0), d = x.dim(1), r = w.dim(0);
  if (dy.shape() != Shape{n, r}) throw InvalidArgument("linear_backward: dy shape mismatch");
  LinearGrads g{Tensor(x.shape()), Tensor(w.shape()), std::vector<double>(r, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const double gy = dy.at(i, j);
      g.db[j] += gy;
      for (std::size_t k = 0; k < d; ++k) {
        g.dx.at(i, k) += gy * w.at(j, k);
        g.dw.at(j, k) += gy * x.at(i, k);
      }
    }
  return g;
}

Tensor softmax(const Tensor& x) {
  if (x.rank() != 2) throw InvalidArgument("softmax expects a rank-2 tensor");
  const std::size_t n = x.dim(0), r = x.dim(1);
  Tensor y(x.shape());
  for (std::size_t i = 0; i < n; ++i) {
    double m = x.at(i, 0);
    for (std::size_t j = 1; j < r; ++j) m = std::max(m, x.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
      y.at(i, j) = std::exp(x.at(i, j) - m);
      s += y.at(i, j);
    }
    for (std::size_t j = 0; j < r; ++j) y.at(i, j) /= s;
  }
  return y;
}

Tensor softmax_backward(const Tensor& y, const Tensor& dy) {
  require_same_shape(y, dy, "softmax_backward");
  const std::size_t n = y.dim(0), r = y.dim(1);
  Tensor dx(y.shape());
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < r; ++j) dot += dy.at(i, j) * y.at(i, j);
    for (std::size_t j = 0; j < r; ++j) dx.at(i, j) = y.at(i, j) * (dy.at(i, j) - dot);
  }
  return dx;
}

}  // namespace ops

double grad_check(const std::function<double(const Tensor&)>& f, const Tensor& x,
                  const Tensor& analytic, double delta) {
  require_same_shape(x, analytic, "grad_check");
  Tensor probe = x;
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + delta;
    const double up = f(probe);
    probe[i] = orig - delta;
    const double down = f(probe);
    probe[i] = orig;
    const double fd = (up - down) / (2.0 * delta);
    worst = std::max(worst, std::abs(fd - analytic[i]) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

}  // namespace wicbr
