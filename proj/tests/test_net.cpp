#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "wicbr/net.hpp"
#include "wicbr/train.hpp"
#include "wicbr/util.hpp"

using namespace wicbr;
using testing::max_abs_diff;
using testing::random_tensor;

namespace {

Tensor random_images(std::size_t n, std::size_t size, std::uint64_t seed) {
  return random_tensor({n, 3, size, size}, seed, 0.0, 1.0);
}

// Saliency parameters away from the identity so both gate states occur.
SaliencyParams random_saliency(std::size_t channels, std::uint64_t seed) {
  SaliencyParams sp{random_tensor({channels}, seed, 0.2, 2.0), random_tensor({channels}, seed + 1)};
  return sp;
}

}  // namespace

TEST_SUITE("net") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(NetConfig::desk().validate());
  CHECK_NOTHROW(NetConfig::toy().validate());
  CHECK_NOTHROW(NetConfig::full_width().validate());
  auto c = NetConfig::desk();
  c.image_size = 200;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = NetConfig::desk();
  c.gn_groups = 7;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = NetConfig::desk();
  c.gate_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = NetConfig::desk();
  c.attention_kernel = 6;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(fuse_mode_from_string("sideways"), InvalidArgument);
  CHECK(net_config_from_json(to_json(NetConfig::toy())).backbone_channels == NetConfig::toy().backbone_channels);
}

TEST_CASE("concat shape is 2 C_b x 7 x 7") {
  const auto desk = NetConfig::desk();
  const auto p = init_params(desk, 1);
  const auto x = extract_concat(random_images(2, 224, 1), random_images(2, 224, 2), p, desk);
  CHECK(x.shape() == Shape{2, 64, 7, 7});

  const auto full = NetConfig::full_width();
  const auto pf = init_params(full, 1);
  const auto xf = extract_concat(random_images(1, 224, 3), random_images(1, 224, 4), pf, full);
  CHECK(xf.shape() == Shape{1, 1024, 7, 7});
}

TEST_CASE("saliency split invariants hold exactly on random inputs (property)") {
  const auto cfg = NetConfig::toy();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_tensor({2, 8, 7, 7}, rng(), -2, 2);
    const auto s = saliency_separate(x, random_saliency(8, rng()), cfg);
    double wsum = 0.0;
    for (double w : s.weights) wsum += w;
    CHECK(std::abs(wsum - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < x.size(); ++i) {
      REQUIRE((s.g1[i] == 0.0 || s.g1[i] == 1.0));
      REQUIRE(s.g1[i] + s.g2[i] == 1.0);
      REQUIRE(s.x_s[i] + s.x_w[i] == x[i]);
    }
    for (auto mode : {FuseMode::kCross, FuseMode::kSame}) {
      const auto y = saliency_fuse(s.x_s, s.x_w, mode);
      REQUIRE(y.shape() == x.shape());
      for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t c = 0; c < 4; ++c)
          for (std::size_t h = 0; h < 7; ++h)
            for (std::size_t w = 0; w < 7; ++w)
              REQUIRE(y.at(n, c, h, w) + y.at(n, c + 4, h, w) ==
                      x.at(n, c, h, w) + x.at(n, c + 4, h, w));
    }
  }
}

TEST_CASE("cross fusion pairs enhanced DFS with weakened phase") {
  Tensor xs({1, 4, 1, 1}, {1.0, 2.0, 3.0, 4.0});   // S_P = (1, 2), S_D = (3, 4)
  Tensor xw({1, 4, 1, 1}, {10.0, 20.0, 30.0, 40.0});
  const auto cross = saliency_fuse(xs, xw, FuseMode::kCross);
  CHECK(cross.vec() == std::vector<double>{13.0, 24.0, 31.0, 42.0});
  const auto same = saliency_fuse(xs, xw, FuseMode::kSame);
  CHECK(same.vec() == std::vector<double>{4.0, 6.0, 40.0, 60.0});
  CHECK_THROWS_AS(saliency_fuse(xs, xw, FuseMode::kChannelAttention), InvalidArgument);
}

TEST_CASE("channel weights need a non-zero gamma sum") {
  CHECK_THROWS_AS(channel_weights(Tensor({4}, {1.0, -1.0, 2.0, -2.0})), InvalidArgument);
  const auto w = channel_weights(Tensor({3}, {1.0, 2.0, 5.0}));
  CHECK(w == std::vector<double>{0.125, 0.25, 0.625});
}

TEST_CASE("a strongly positive group-norm shift opens every gate") {
  const auto cfg = NetConfig::toy();
  SaliencyParams sp{Tensor({8}, 1.0), Tensor({8}, 50.0)};
  const auto s = saliency_separate(random_tensor({1, 8, 7, 7}, 3), sp, cfg);
  for (double g : s.g1.data()) CHECK(g == 1.0);
  const auto y = saliency_fuse(s.x_s, s.x_w);
  // All salient: Y1 = S_D, Y2 = S_P.
  const auto [yp, yd] = ops::split_channels(y, 4);
  const auto [xp, xd] = ops::split_channels(s.x_s, 4);
  CHECK(yp == xd);
  CHECK(yd == xp);
}

TEST_CASE("refinement is x * A + x") {
  const auto x = random_tensor({2, 3, 5, 5}, 1);
  const auto half = branch_refine(x, Tensor({2, 1, 5, 5}, 0.5));
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(half[i] == 1.5 * x[i]);
  const auto a = random_tensor({2, 1, 5, 5}, 2, 0.0, 1.0);
  const auto r = branch_refine(x, a);
  CHECK(r.at(1, 2, 3, 4) == doctest::Approx(x.at(1, 2, 3, 4) * (1 + a.at(1, 0, 3, 4))).epsilon(1e-15));
  const auto att = spatial_attention(random_images(2, 28, 4), init_params(NetConfig::toy(), 1).phase_attention,
                                     NetConfig::toy());
  CHECK(att.shape() == Shape{2, 1, 28, 28});
  for (double v : att.data()) REQUIRE((v > 0.0 && v < 1.0));
}

TEST_CASE("the DFS image does not reach the phase backbone") {
  const auto cfg = NetConfig::toy();
  const auto params = init_params(cfg, 3);
  const auto p = random_images(2, 28, 1), d = random_images(2, 28, 2);
  auto d2 = d;
  for (auto& v : d2.data()) v = 1.0 - v;
  const auto f1 = forward(params, cfg, p, d), f2 = forward(params, cfg, p, d2);
  CHECK(f1.phase_bb.out == f2.phase_bb.out);
  CHECK(f1.dfs_bb.out != f2.dfs_bb.out);
  const auto [ph, dh] = ops::split_channels(f1.x_pd, cfg.c_b());
  CHECK(ph == f1.phase_bb.out);
  CHECK(dh == f1.dfs_bb.out);
}

TEST_CASE("forward equals the composition of its stages") {
  for (auto mode : {FuseMode::kCross, FuseMode::kSame}) {
    auto cfg = NetConfig::toy();
    cfg.fuse_mode = mode;
    auto params = init_params(cfg, 9);
    params.saliency = random_saliency(8, 10);
    const auto p = random_images(3, 28, 11), d = random_images(3, 28, 12);
    const auto f = forward(params, cfg, p, d);

    const auto rp = branch_refine(p, spatial_attention(p, params.phase_attention, cfg));
    const auto rd = branch_refine(d, spatial_attention(d, params.dfs_attention, cfg));
    const auto x_pd = ops::concat_channels(backbone_forward(rp, params.phase_backbone),
                                           backbone_forward(rd, params.dfs_backbone));
    CHECK(max_abs_diff(x_pd, extract_concat(p, d, params, cfg)) == 0.0);
    const auto s = saliency_separate(x_pd, params.saliency, cfg);
    const auto out = classify(saliency_fuse(s.x_s, s.x_w, mode), params.head);
    CHECK(max_abs_diff(out.logits, f.logits) <= 1e-9);
    CHECK(max_abs_diff(out.embedding, f.embedding) <= 1e-9);
    CHECK(f.logits.shape() == Shape{3, 6});
  }
}

TEST_CASE("init is seeded and covers every array") {
  const auto cfg = NetConfig::toy();
  const auto a = init_params(cfg, 1), b = init_params(cfg, 1), c = init_params(cfg, 2);
  std::vector<Tensor> ta, tb, tc;
  a.visit([&](const std::string&, const Tensor& t, bool) { ta.push_back(t); });
  b.visit([&](const std::string&, const Tensor& t, bool) { tb.push_back(t); });
  c.visit([&](const std::string&, const Tensor& t, bool) { tc.push_back(t); });
  CHECK(ta == tb);
  CHECK(ta != tc);
  std::size_t trainable = 0;
  a.visit([&](const std::string& name, const Tensor& t, bool train) {
    CHECK(!t.empty());
    if (name.find("running_") != std::string::npos) CHECK_FALSE(train);
    if (train) trainable += t.size();
  });
  CHECK(trainable == a.trainable_count());
}

TEST_CASE("full-network gradient check under every fusion variant") {
  for (auto mode : {FuseMode::kCross, FuseMode::kSame, FuseMode::kChannelAttention})
    for (bool bn_each : {false, true}) {
      auto cfg = NetConfig::toy();
      cfg.fuse_mode = mode;
      cfg.bn_after_each_conv = bn_each;
      const auto r = network_grad_check(cfg, LossOptions{}, 3);
      INFO(to_string(mode), " bn_each=", bn_each);
      CHECK(r.max_rel_error < 1e-4);
      CHECK(!r.per_array.empty());
    }
  const auto cos = network_grad_check(NetConfig::toy(), LossOptions{0.5, 0.2, true}, 4);
  CHECK(cos.max_rel_error < 1e-4);
}

TEST_CASE("image_batch replicates the plane over channels") {
  std::vector<double> a(28 * 28, 0.25), b(28 * 28, 0.75);
  const auto t = image_batch({&a, &b}, 28);
  CHECK(t.shape() == Shape{2, 3, 28, 28});
  CHECK(t.at(0, 2, 5, 5) == 0.25);
  CHECK(t.at(1, 1, 27, 0) == 0.75);
  std::vector<double> bad(10);
  CHECK_THROWS_AS(image_batch({&bad}, 28), InvalidArgument);
}

}  // TEST_SUITE
