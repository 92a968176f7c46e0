#include "wicbr/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "wicbr/util.hpp"

namespace wicbr {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw InvalidArgument("lr must be > 0");
  if (batch < 1) throw InvalidArgument("batch must be >= 1");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  if (!(tau > 0.0)) throw InvalidArgument("tau must be > 0");
  if (!(val_fraction >= 0.0 && val_fraction <= 1.0))
    throw InvalidArgument("val_fraction must lie in [0, 1]");
  if (no_dfs && no_phase) throw InvalidArgument("no_dfs and no_phase together leave no input");
  net.validate();
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"lr", c.lr},         {"batch", c.batch},
          {"epochs", c.epochs}, {"seed", c.seed},
          {"beta", c.beta},     {"tau", c.tau},
          {"cosine", c.cosine}, {"val_fraction", c.val_fraction},
          {"net", to_json(c.net)}, {"no_dfs", c.no_dfs},
          {"no_phase", c.no_phase}, {"no_contrastive", c.no_contrastive}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.batch = j.value("batch", c.batch);
  c.epochs = j.value("epochs", c.epochs);
  c.seed = j.value("seed", c.seed);
  c.beta = j.value("beta", c.beta);
  c.tau = j.value("tau", c.tau);
  c.cosine = j.value("cosine", c.cosine);
  c.val_fraction = j.value("val_fraction", c.val_fraction);
  if (j.contains("net")) c.net = net_config_from_json(j.at("net"));
  if (j.contains("c_b")) {
    const std::size_t cb = j.at("c_b");
    c.net.backbone_channels.back() = cb;
    if (c.net.backbone_channels.size() >= 2) c.net.backbone_channels[c.net.backbone_channels.size() - 2] = cb;
  }
  if (j.contains("gn_groups")) c.net.gn_groups = j.at("gn_groups");
  if (j.contains("gate_threshold")) c.net.gate_threshold = j.at("gate_threshold");
  if (j.contains("num_classes")) c.net.num_classes = j.at("num_classes");
  if (j.contains("fuse_mode")) c.net.fuse_mode = fuse_mode_from_string(j.at("fuse_mode"));
  if (j.value("channel_attention", false)) c.net.fuse_mode = FuseMode::kChannelAttention;
  c.no_dfs = j.value("no_dfs", c.no_dfs);
  c.no_phase = j.value("no_phase", c.no_phase);
  c.no_contrastive = j.value("no_contrastive", c.no_contrastive);
  c.validate();
  return c;
}

std::vector<Sample> build_samples(const std::vector<LabeledRecording>& data,
                                  const PreprocessOptions& opt) {
  std::vector<Sample> out(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    const auto images = preprocess_recording(data[i].recording, opt);
    out[i] = {data[i].id, static_cast<std::size_t>(data[i].class_id), data[i].tag,
              images.phase.plane, images.dfs.plane};
  });
  return out;
}

// ---- splits ---------------------------------------------------------------------

std::string to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kInDomain: return "in_domain";
    case SplitKind::kCrossLocation: return "cross_location";
    case SplitKind::kCrossOrientation: return "cross_orientation";
    case SplitKind::kCrossEnvironment: return "cross_environment";
  }
  return "?";
}

SplitKind split_kind_from_string(const std::string& name) {
  static const std::map<std::string, SplitKind> names{
      {"id", SplitKind::kInDomain},          {"in_domain", SplitKind::kInDomain},
      {"cl", SplitKind::kCrossLocation},     {"cross_location", SplitKind::kCrossLocation},
      {"co", SplitKind::kCrossOrientation},  {"cross_orientation", SplitKind::kCrossOrientation},
      {"ce", SplitKind::kCrossEnvironment},  {"cross_environment", SplitKind::kCrossEnvironment}};
  auto it = names.find(name);
  if (it == names.end()) throw InvalidArgument("unknown split protocol '" + name + "'");
  return it->second;
}

namespace {

std::map<std::size_t, std::vector<std::size_t>> shuffled_by_class(const std::vector<Sample>& data,
                                                                 std::uint64_t seed) {
  std::map<std::size_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[data[i].label].push_back(i);
  for (auto& [label, idx] : by_class) {
    std::mt19937_64 rng(mix_seed(seed, label));
    std::shuffle(idx.begin(), idx.end(), rng);
  }
  return by_class;
}

int tag_component(const DomainTag& t, SplitKind kind) {
  switch (kind) {
    case SplitKind::kCrossLocation: return t.location;
    case SplitKind::kCrossOrientation: return t.orientation;
    case SplitKind::kCrossEnvironment: return t.environment;
    case SplitKind::kInDomain: break;
  }
  return 0;
}

}  // namespace

SplitIndices split(const std::vector<Sample>& data, const SplitProtocol& protocol,
                   std::uint64_t seed) {
  SplitIndices s;
  if (protocol.kind == SplitKind::kInDomain) {
    if (!(protocol.train_fraction > 0.0 && protocol.train_fraction < 1.0))
      throw InvalidArgument("train_fraction must lie in (0, 1)");
    for (auto& [label, idx] : shuffled_by_class(data, seed)) {
      const auto n_train =
          static_cast<std::size_t>(std::llround(protocol.train_fraction * static_cast<double>(idx.size())));
      s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<long>(n_train));
      s.test.insert(s.test.end(), idx.begin() + static_cast<long>(n_train), idx.end());
    }
  } else {
    for (std::size_t i = 0; i < data.size(); ++i)
      (tag_component(data[i].tag, protocol.kind) == protocol.held_out ? s.test : s.train).push_back(i);
    if (s.test.empty())
      throw InvalidArgument(to_string(protocol.kind) + ": held-out value " +
                            std::to_string(protocol.held_out) + " does not occur");
  }
  if (s.train.empty() || s.test.empty()) throw InvalidArgument("split leaves an empty side");
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<SplitIndices> kfold(const std::vector<Sample>& data, std::size_t folds,
                                std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("k-fold needs at least two folds");
  std::vector<SplitIndices> out(folds);
  for (auto& [label, idx] : shuffled_by_class(data, seed))
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t f = 0; f < folds; ++f) (j % folds == f ? out[f].test : out[f].train).push_back(idx[j]);
  for (auto& s : out) {
    if (s.train.empty() || s.test.empty()) throw InvalidArgument("k-fold leaves an empty side");
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
  }
  return out;
}

std::vector<Sample> subset(const std::vector<Sample>& data, const std::vector<std::size_t>& idx) {
  std::vector<Sample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(data.at(i));
  return out;
}

// ---- training -------------------------------------------------------------------

nlohmann::json to_json(const EpochLog& e) {
  return {{"epoch", e.epoch}, {"ce", e.ce}, {"con", e.con}, {"total", e.total}, {"val_acc", e.val_acc}};
}

namespace {

struct SampleGrad {
  ModelParams grad;
  double ce = 0.0;
  double con = 0.0;
};

std::pair<Tensor, Tensor> input_pair(const Sample& s, const TrainConfig& cfg) {
  const std::size_t size = cfg.net.image_size;
  const std::vector<double> neutral(size * size, 0.5);
  const auto* p = cfg.no_phase ? &neutral : &s.phase;
  const auto* d = cfg.no_dfs ? &neutral : &s.dfs;
  return {image_batch({p}, size), image_batch({d}, size)};
}

// Loss and gradient of one sample, scaled by 1/batch_size.
SampleGrad sample_grad(const ModelParams& params, const Sample& s, const TrainConfig& cfg,
                       double weight, bool need_grad) {
  auto [p, d] = input_pair(s, cfg);
  const ForwardResult f = forward(params, cfg.net, p, d);
  const std::vector<std::size_t> label{s.label};
  auto ce = cross_entropy_grad(f.logits, label);
  auto con = proxy_contrastive_grad(f.embedding, label, params.head.weight, cfg.tau, cfg.cosine);
  SampleGrad out;
  out.ce = ce.value;
  out.con = con.value;
  if (!need_grad) return out;
  const double beta = cfg.effective_beta();
  for (auto& v : ce.d_input.data()) v *= weight;
  for (auto& v : con.d_input.data()) v *= beta * weight;
  out.grad = backward(params, cfg.net, f, ce.d_input, con.d_input);
  for (std::size_t i = 0; i < con.d_proxies.size(); ++i)
    out.grad.head.weight[i] += beta * weight * con.d_proxies[i];
  return out;
}

std::vector<Tensor*> trainable(ModelParams& p) {
  std::vector<Tensor*> out;
  p.visit([&](const std::string&, Tensor& t, bool train) {
    if (train) out.push_back(&t);
  });
  return out;
}

class Adam {
 public:
  Adam(const ModelParams& like, double lr) : m_(like.zeros_like()), v_(like.zeros_like()), lr_(lr) {}

  void step(ModelParams& params, ModelParams& grad) {
    ++t_;
    auto p = trainable(params), g = trainable(grad), m = trainable(m_), v = trainable(v_);
    const double c1 = 1.0 - std::pow(kB1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kB2, static_cast<double>(t_));
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t i = 0; i < p[a]->size(); ++i) {
        const double gi = (*g[a])[i];
        double& mi = (*m[a])[i];
        double& vi = (*v[a])[i];
        mi = kB1 * mi + (1.0 - kB1) * gi;
        vi = kB2 * vi + (1.0 - kB2) * gi * gi;
        (*p[a])[i] -= lr_ * (mi / c1) / (std::sqrt(vi / c2) + kEps);
      }
  }

 private:
  static constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8;
  ModelParams m_, v_;
  double lr_;
  std::uint64_t t_ = 0;
};

}  // namespace

LossReport batch_loss(const ModelParams& params, const std::vector<Sample>& batch,
                      const TrainConfig& cfg) {
  if (batch.empty()) throw InvalidArgument("batch_loss on an empty batch");
  std::vector<SampleGrad> parts(batch.size());
  parallel_for(batch.size(), [&](std::size_t i) {
    parts[i] = sample_grad(params, batch[i], cfg, 1.0, false);
  });
  double ce = 0.0, con = 0.0;
  for (const auto& p : parts) {
    ce += p.ce;
    con += p.con;
  }
  const double n = static_cast<double>(batch.size());
  return total_loss(ce / n, con / n, cfg.effective_beta(), cfg.tau);
}

FitResult fit(const std::vector<Sample>& train, const TrainConfig& cfg, std::ostream* log_stream) {
  cfg.validate();
  return fit(train, cfg, init_params(cfg.net, mix_seed(cfg.seed, 1)), log_stream);
}

FitResult fit(const std::vector<Sample>& train, const TrainConfig& cfg, ModelParams init,
              std::ostream* log_stream) {
  cfg.validate();
  if (train.empty()) throw InvalidArgument("fit on an empty training set");
  for (const auto& s : train)
    if (s.label >= cfg.net.num_classes) throw InvalidArgument("label exceeds num_classes: " + s.id);

  FitResult result{std::move(init), {}};
  Adam adam(result.params, cfg.lr);

  // Held-in validation slice: a fixed seeded subset of the training set.
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> val_idx = order;
  {
    std::mt19937_64 rng(mix_seed(cfg.seed, 2));
    std::shuffle(val_idx.begin(), val_idx.end(), rng);
    const auto n_val = static_cast<std::size_t>(
        std::ceil(cfg.val_fraction * static_cast<double>(train.size())));
    val_idx.resize(std::min(n_val, train.size()));
    std::sort(val_idx.begin(), val_idx.end());
  }
  const auto val = subset(train, val_idx);

  const double beta = cfg.effective_beta();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::mt19937_64 rng(mix_seed(cfg.seed, 3, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double ce_sum = 0.0, con_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch);
      const std::size_t n = stop - start;
      std::vector<SampleGrad> parts(n);
      parallel_for(n, [&](std::size_t i) {
        parts[i] = sample_grad(result.params, train[order[start + i]], cfg,
                               1.0 / static_cast<double>(n), true);
      });
      double ce = 0.0, con = 0.0;
      ModelParams grad = std::move(parts[0].grad);
      for (std::size_t i = 0; i < n; ++i) {
        ce += parts[i].ce;
        con += parts[i].con;
        if (i > 0) grad.accumulate(parts[i].grad);
      }
      ce /= static_cast<double>(n);
      con /= static_cast<double>(n);
      const double total = ce + beta * con;
      if (!std::isfinite(total)) {
        nlohmann::json dump{{"epoch", epoch}, {"batch_start", start}, {"ce", ce}, {"con", con}};
        for (std::size_t i = 0; i < n; ++i)
          dump["samples"].push_back({{"id", train[order[start + i]].id},
                                     {"ce", parts[i].ce},
                                     {"con", parts[i].con}});
        throw NonFiniteLoss("non-finite loss at epoch " + std::to_string(epoch), dump);
      }
      ce_sum += ce * static_cast<double>(n);
      con_sum += con * static_cast<double>(n);
      adam.step(result.params, grad);
    }
    EpochLog e;
    e.epoch = epoch;
    e.ce = ce_sum / static_cast<double>(train.size());
    e.con = con_sum / static_cast<double>(train.size());
    e.total = e.ce + beta * e.con;
    e.val_acc = val.empty() ? 0.0 : evaluate(result.params, val, cfg).accuracy;
    result.log.push_back(e);
    spdlog::info("epoch {} ce {:.4f} con {:.4f} total {:.4f} val_acc {:.3f}", e.epoch, e.ce, e.con,
                 e.total, e.val_acc);
    if (log_stream) *log_stream << to_json(e).dump() << '\n';
  }
  return result;
}

// ---- evaluation -----------------------------------------------------------------

nlohmann::json to_json(const Metrics& m) {
  return {{"accuracy", m.accuracy},
          {"macro_f1", m.macro_f1},
          {"confusion", m.confusion},
          {"loss_curve", m.loss_curve}};
}

std::string confusion_csv(const Metrics& m) {
  std::ostringstream os;
  os << "true\\pred";
  for (std::size_t k = 0; k < m.confusion.size(); ++k) os << ',' << k;
  os << '\n';
  for (std::size_t r = 0; r < m.confusion.size(); ++r) {
    os << r;
    for (auto v : m.confusion[r]) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

Metrics score(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& predicted,
              std::size_t classes) {
  if (truth.size() != predicted.size()) throw InvalidArgument("score: length mismatch");
  if (truth.empty()) throw InvalidArgument("score on an empty set");
  Metrics m;
  m.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= classes || predicted[i] >= classes) throw InvalidArgument("score: label out of range");
    ++m.confusion[truth[i]][predicted[i]];
    correct += truth[i] == predicted[i];
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  // Classes absent from both truth and predictions are left out of the average.
  double f1_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < classes; ++k) {
    std::size_t tp = m.confusion[k][k], fn = 0, fp = 0;
    for (std::size_t j = 0; j < classes; ++j)
      if (j != k) {
        fn += m.confusion[k][j];
        fp += m.confusion[j][k];
      }
    if (tp + fn + fp == 0) continue;
    f1_sum += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    ++counted;
  }
  m.macro_f1 = counted ? f1_sum / static_cast<double>(counted) : 0.0;
  return m;
}

std::vector<std::size_t> predict(const ModelParams& params, const std::vector<Sample>& data,
                                 const TrainConfig& cfg) {
  std::vector<std::size_t> out(data.size());
  parallel_for(data.size(), [&](std::size_t i) {
    auto [p, d] = input_pair(data[i], cfg);
    const auto f = forward(params, cfg.net, p, d);
    const auto row = f.logits.data();
    out[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  });
  return out;
}

Metrics evaluate(const ModelParams& params, const std::vector<Sample>& data,
                 const TrainConfig& cfg) {
  std::vector<std::size_t> truth;
  for (const auto& s : data) truth.push_back(s.label);
  return score(truth, predict(params, data, cfg), cfg.net.num_classes);
}

}  // namespace wicbr

namespace wicbr {

NetworkGradCheck network_grad_check(const NetConfig& cfg, const LossOptions& loss,
                                    std::uint64_t seed, std::size_t batch, double delta) {
  cfg.validate();
  ModelParams params = init_params(cfg, seed);
  std::mt19937_64 rng(mix_seed(seed, 17));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Move the norms and gates off their identity initialization so every
  // branch of the backward pass is exercised.
  params.visit([&](const std::string& name, Tensor& t, bool) {
    const bool var = name.find("running_var") != std::string::npos;
    if (name.find(".bn") != std::string::npos || name.rfind("saliency", 0) == 0 ||
        name.rfind("channel_gate", 0) == 0)
      for (auto& v : t.data()) v = var ? 0.5 + unit(rng) : v + 0.5 * (unit(rng) - 0.5);
  });
  const std::size_t s = cfg.image_size;
  Tensor p({batch, 3, s, s}), d({batch, 3, s, s});
  for (auto& v : p.data()) v = unit(rng);
  for (auto& v : d.data()) v = unit(rng);
  std::vector<std::size_t> labels(batch);
  for (std::size_t i = 0; i < batch; ++i) labels[i] = (i * 7 + seed) % cfg.num_classes;

  const ForwardResult f0 = forward(params, cfg, p, d);
  const Tensor g1 = f0.split.g1;
  const Tensor* frozen = cfg.fuse_mode == FuseMode::kChannelAttention ? nullptr : &g1;
  auto objective = [&](const ModelParams& pp) {
    const auto f = forward(pp, cfg, p, d, frozen);
    const double ce = cross_entropy_grad(f.logits, labels).value;
    const double con = proxy_contrastive(f.embedding, labels, pp.head.weight, loss.tau, loss.cosine);
    return total_loss(ce, con, loss.beta, loss.tau).total;
  };

  auto ce = cross_entropy_grad(f0.logits, labels);
  auto con = proxy_contrastive_grad(f0.embedding, labels, params.head.weight, loss.tau, loss.cosine);
  for (auto& v : con.d_input.data()) v *= loss.beta;
  ModelParams grad = backward(params, cfg, f0, ce.d_input, con.d_input);
  for (std::size_t i = 0; i < con.d_proxies.size(); ++i)
    grad.head.weight[i] += loss.beta * con.d_proxies[i];

  std::vector<std::pair<std::string, Tensor*>> arrays;
  params.visit([&](const std::string& name, Tensor& t, bool train) {
    if (train) arrays.push_back({name, &t});
  });
  const auto grads = trainable(grad);

  NetworkGradCheck out;
  for (std::size_t a = 0; a < arrays.size(); ++a) {
    Tensor& target = *arrays[a].second;
    const Tensor original = target;
    const double err = grad_check(
        [&](const Tensor& x) {
          target = x;
          const double l = objective(params);
          target = original;
          return l;
        },
        original, *grads[a], delta);
    out.per_array.emplace_back(arrays[a].first, err);
    out.max_rel_error = std::max(out.max_rel_error, err);
  }
  return out;
}

}  // namespace wicbr
