#include "wicbr/loss.hpp"

#include <algorithm>
#include <cmath>

#include "wicbr/util.hpp"

namespace wicbr {

nlohmann::json to_json(const LossReport& r) {
  return {{"ce", r.ce}, {"con", r.con}, {"total", r.total}, {"beta", r.beta}, {"tau", r.tau}};
}

Tensor one_hot(const std::vector<std::size_t>& labels, std::size_t classes) {
  Tensor t({labels.size(), classes});
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) throw InvalidArgument("label out of range");
    t.at(i, labels[i]) = 1.0;
  }
  return t;
}

namespace {

// Row-wise log-softmax with max subtraction.
std::vector<double> log_softmax_row(const double* z, std::size_t r) {
  const double m = *std::max_element(z, z + r);
  double s = 0.0;
  for (std::size_t k = 0; k < r; ++k) s += std::exp(z[k] - m);
  const double lse = m + std::log(s);
  std::vector<double> out(r);
  for (std::size_t k = 0; k < r; ++k) out[k] = z[k] - lse;
  return out;
}

void check_labels(const Tensor& x, const std::vector<std::size_t>& labels, std::size_t classes,
                  const char* what) {
  if (x.rank() != 2 || x.dim(0) != labels.size())
    throw InvalidArgument(std::string(what) + ": expected (N, .) with N = label count, got " +
                          shape_string(x.shape()));
  for (auto l : labels)
    if (l >= classes) throw InvalidArgument(std::string(what) + ": label out of range");
}

}  // namespace

double cross_entropy(const Tensor& logits, const Tensor& targets) {
  require_same_shape(logits, targets, "cross_entropy");
  if (logits.rank() != 2 || logits.dim(0) == 0) throw InvalidArgument("cross_entropy needs (N, R)");
  const std::size_t n = logits.dim(0), r = logits.dim(1);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const double y = targets.at(i, k);
      if (y != 0.0 && y != 1.0) throw InvalidArgument("cross_entropy targets must be one-hot");
      row_sum += y;
    }
    if (row_sum != 1.0) throw InvalidArgument("cross_entropy targets must be one-hot");
    const auto ls = log_softmax_row(logits.ptr() + i * r, r);
    for (std::size_t k = 0; k < r; ++k) loss -= targets.at(i, k) * ls[k];
  }
  return loss / static_cast<double>(n);
}

LossValue cross_entropy_grad(const Tensor& logits, const std::vector<std::size_t>& labels) {
  if (logits.rank() != 2) throw InvalidArgument("cross_entropy needs (N, R)");
  check_labels(logits, labels, logits.dim(1), "cross_entropy");
  const std::size_t n = logits.dim(0), r = logits.dim(1);
  if (n == 0) throw InvalidArgument("cross_entropy on an empty batch");
  LossValue out;
  out.d_input = Tensor(logits.shape());
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ls = log_softmax_row(logits.ptr() + i * r, r);
    out.value -= ls[labels[i]];
    for (std::size_t k = 0; k < r; ++k)
      out.d_input.at(i, k) = (std::exp(ls[k]) - (k == labels[i] ? 1.0 : 0.0)) * inv_n;
  }
  out.value *= inv_n;
  return out;
}

LossValue proxy_contrastive_grad(const Tensor& x, const std::vector<std::size_t>& labels,
                                 const Tensor& w, double tau, bool cosine) {
  if (!(tau > 0.0)) throw InvalidArgument("proxy_contrastive: tau must be > 0");
  if (w.rank() != 2 || x.rank() != 2 || w.dim(1) != x.dim(1))
    throw InvalidArgument("proxy_contrastive: embedding " + shape_string(x.shape()) +
                          " and proxies " + shape_string(w.shape()) + " disagree");
  check_labels(x, labels, w.dim(0), "proxy_contrastive");
  const std::size_t n = x.dim(0), r = w.dim(0), d = x.dim(1);
  if (n == 0) throw InvalidArgument("proxy_contrastive on an empty batch");

  std::vector<double> w_norm(r, 1.0);
  if (cosine)
    for (std::size_t k = 0; k < r; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += w.at(k, j) * w.at(k, j);
      w_norm[k] = std::sqrt(s);
      if (w_norm[k] == 0.0) throw InvalidArgument("proxy_contrastive: zero proxy under cosine");
    }

  LossValue out;
  out.d_input = Tensor(x.shape());
  out.d_proxies = Tensor(w.shape());
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> dots(r), z(r);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x.ptr() + i * d;
    double x_norm = 1.0;
    if (cosine) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += xi[j] * xi[j];
      x_norm = std::sqrt(s);
      if (x_norm == 0.0) throw InvalidArgument("proxy_contrastive: zero embedding under cosine");
    }
    for (std::size_t k = 0; k < r; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += w.at(k, j) * xi[j];
      dots[k] = s;
      z[k] = s / (w_norm[k] * x_norm * tau);
    }
    const auto ls = log_softmax_row(z.data(), r);
    out.value -= ls[labels[i]];
    for (std::size_t k = 0; k < r; ++k) {
      // dL/dz_k, then chain through z_k = dots_k / (|w_k||x| tau).
      const double g = (std::exp(ls[k]) - (k == labels[i] ? 1.0 : 0.0)) * inv_n;
      const double scale = 1.0 / (w_norm[k] * x_norm * tau);
      for (std::size_t j = 0; j < d; ++j) {
        double dx = w.at(k, j) * scale;
        double dw = xi[j] * scale;
        if (cosine) {
          dx -= z[k] * xi[j] / (x_norm * x_norm);
          dw -= z[k] * w.at(k, j) / (w_norm[k] * w_norm[k]);
        }
        out.d_input.at(i, j) += g * dx;
        out.d_proxies.at(k, j) += g * dw;
      }
    }
  }
  out.value *= inv_n;
  return out;
}

double proxy_contrastive(const Tensor& x, const std::vector<std::size_t>& labels,
                         const Tensor& w, double tau, bool cosine) {
  return proxy_contrastive_grad(x, labels, w, tau, cosine).value;
}

LossReport total_loss(double ce, double con, double beta, double tau) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  return {ce, con, ce + beta * con, beta, tau};
}

}  // namespace wicbr
