#pragma once

// Joint objective: softmax cross-entropy on the logits plus a proxy-based
// contrastive term whose proxies are the rows of the classifier weight.

#include <cstddef>
#include <vector>

#include <json.hpp>

#include "wicbr/tensor.hpp"

namespace wicbr {

struct LossReport {
  double ce = 0.0;
  double con = 0.0;
  double total = 0.0;
  double beta = 0.1;
  double tau = 0.1;
};

nlohmann::json to_json(const LossReport& r);

struct LossOptions {
  double beta = 0.1;
  double tau = 0.1;
  bool cosine = false;  // cosine similarity instead of raw inner products
};

/// Loss value plus gradients w.r.t. the first input (logits or embeddings)
/// and, for the contrastive term, the proxies.
struct LossValue {
  double value = 0.0;
  Tensor d_input;
  Tensor d_proxies;
};

/// (N, R) one-hot rows from class indices.
Tensor one_hot(const std::vector<std::size_t>& labels, std::size_t classes);

/// Mean over the batch of -sum_s y_s log softmax(logits)_s. `targets` must be
/// one-hot rows of the same shape as `logits`.
double cross_entropy(const Tensor& logits, const Tensor& targets);
LossValue cross_entropy_grad(const Tensor& logits, const std::vector<std::size_t>& labels);

/// Mean over i of -log softmax_c(w_k . x_i / tau) with c the label of x_i.
/// The bias of the classifier does not enter the similarity.
double proxy_contrastive(const Tensor& embeddings, const std::vector<std::size_t>& labels,
                         const Tensor& proxies, double tau, bool cosine = false);
LossValue proxy_contrastive_grad(const Tensor& embeddings, const std::vector<std::size_t>& labels,
                                 const Tensor& proxies, double tau, bool cosine = false);

/// total = ce + beta * con. Throws for beta < 0.
LossReport total_loss(double ce, double con, double beta, double tau = 0.1);

}  // namespace wicbr
