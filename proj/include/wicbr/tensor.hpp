#pragma once

// Dense real tensors and the handful of differentiable operations the network
// needs. Every op has a hand-written backward; tests check each against naive
// loop oracles and central finite differences.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wicbr {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& vec() const { return data_; }
  double* ptr() { return data_.data(); }
  const double* ptr() const { return data_.data(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Rank-4 (N, C, H, W) element access.
  double& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  double at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  /// Rank-2 (row, col) element access.
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  void fill(double v);
  Tensor reshaped(Shape shape) const;
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Throws InvalidArgument with `what` if the shapes differ.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

/// Shape header + f64 payload: "TNS1" | u32 rank | u32 dims... | f64 data.
void write_tensor(std::ostream& os, const Tensor& t);
Tensor read_tensor(std::istream& is);

namespace ops {

// ---- convolution -----------------------------------------------------------

/// Cross-correlation with zero padding. x: (N, C, H, W), w: (O, C, k, k) with k
/// odd, bias empty or length O. Output spatial size (H + 2*pad - k) / stride + 1.
Tensor conv2d(const Tensor& x, const Tensor& w, std::span<const double> bias, std::size_t stride,
              std::size_t pad);

struct Conv2dGrads {
  Tensor dx;  // empty unless requested
  Tensor dw;
  std::vector<double> db;
};

Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy,
                            std::size_t stride, std::size_t pad, bool need_dx);

// ---- normalization ---------------------------------------------------------

struct GroupNormCache {
  Tensor xhat;                 // standardized input
  std::vector<double> inv_std; // per (sample, group)
};

/// Per (sample, group) standardization over channels-in-group x H x W, then a
/// per-channel affine gamma * xhat + beta. Variance is the biased estimator.
Tensor group_norm(const Tensor& x, std::size_t groups, std::span<const double> gamma,
                  std::span<const double> beta, double eps, GroupNormCache* cache = nullptr);

struct NormGrads {
  Tensor dx;
  std::vector<double> dgamma;
  std::vector<double> dbeta;
};

NormGrads group_norm_backward(const Tensor& dy, std::size_t groups,
                              std::span<const double> gamma, const GroupNormCache& cache);

/// Inference-style batch norm with fixed running statistics (per channel).
struct BatchNormView {
  std::span<const double> gamma;
  std::span<const double> beta;
  std::span<const double> running_mean;
  std::span<const double> running_var;
  double eps = 1e-5;
};

Tensor batch_norm(const Tensor& x, const BatchNormView& bn);
NormGrads batch_norm_backward(const Tensor& x, const Tensor& dy, const BatchNormView& bn);

// ---- elementwise -----------------------------------------------------------

double sigmoid(double v);
Tensor sigmoid(const Tensor& x);
/// Backward through y = sigmoid(x), given y.
Tensor sigmoid_backward(const Tensor& y, const Tensor& dy);

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& dy);

Tensor mul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

// ---- structure -------------------------------------------------------------

/// Concatenate two (N, C_i, H, W) tensors along channels.
Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Split (N, C, H, W) at channel `at` into (N, at, H, W) and (N, C - at, H, W).
std::pair<Tensor, Tensor> split_channels(const Tensor& x, std::size_t at);

/// (N, C, H, W) -> (N, C).
Tensor global_avg_pool(const Tensor& x);
Tensor global_avg_pool_backward(const Tensor& dy, const Shape& x_shape);

// ---- dense -----------------------------------------------------------------

/// x: (N, D), w: (R, D), bias empty or length R -> (N, R).
Tensor linear(const Tensor& x, const Tensor& w, std::span<const double> bias);

struct LinearGrads {
  Tensor dx;
  Tensor dw;
  std::vector<double> db;
};
LinearGrads linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy);

/// Row-wise softmax over the last axis of a rank-2 tensor (max-subtracted).
Tensor softmax(const Tensor& x);
Tensor softmax_backward(const Tensor& y, const Tensor& dy);

}  // namespace ops

/// Central-difference gradient check. Returns the largest
/// |g_fd - g_an| / max(1, |g_fd|) over all coordinates of x.
double grad_check(const std::function<double(const Tensor&)>& f, const Tensor& x,
                  const Tensor& analytic, double delta = 1e-5);

}  // namespace wicbr
