#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "firecast/error.hpp"
#include "firecast/hash.hpp"
#include "firecast/loss.hpp"
#include "firecast/metrics.hpp"
#include "firecast/segnet.hpp"
#include "firecast/train.hpp"

using namespace firecast;

TEST(Loss, HandValues) {
  const std::vector<double> p{0.5, 0.5};
  const std::vector<std::uint8_t> y{1, 0};
  EXPECT_NEAR(wbce_loss(p, y, {3.0, 1e-7}).loss, 2 * std::numbers::ln2, 1e-12);
  EXPECT_NEAR(wbce_loss(p, y, {1.0, 1e-7}).loss, std::numbers::ln2, 1e-12);
}

TEST(Loss, PerfectPredictionNearZero) {
  const std::vector<double> p{1.0, 0.0, 1.0};
  const std::vector<std::uint8_t> y{1, 0, 1};
  const double l = wbce_loss(p, y, {}).loss;
  EXPECT_GE(l, 0.0);
  EXPECT_LE(l, 3.0 * -std::log(1 - 1e-7) + 1e-15);
}

TEST(Loss, DecompositionAndGradient) {
  SplitMixStream rng(2);
  std::vector<double> p(200);
  std::vector<std::uint8_t> y(200);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = 0.01 + 0.98 * rng.uniform();
    y[i] = rng.uniform() < 0.2;
  }
  const LossTerms t = wbce_terms(p, y, 1e-7);
  for (double w : {0.5, 1.0, 3.0, 10.0}) {
    const LossResult r = wbce_loss(p, y, {w, 1e-7});
    EXPECT_NEAR(r.loss, w * t.positive + t.negative, 1e-12);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double want = y[i] ? w * (p[i] - 1) / 200 : p[i] / 200;
      ASSERT_NEAR(r.grad[i], want, 1e-15);
    }
  }
  // Two-pixel case term by term: w * d(positive)/dz + d(negative)/dz.
  const std::vector<double> q{0.7, 0.2};
  const std::vector<std::uint8_t> z{1, 0};
  const LossResult r = wbce_loss(q, z, {3.0, 1e-7});
  EXPECT_NEAR(r.grad[0], 3 * (-(1 - 0.7) / 2), 1e-15);
  EXPECT_NEAR(r.grad[1], 0.2 / 2, 1e-15);
}

TEST(Loss, Monotone) {
  const std::vector<std::uint8_t> pos{1}, neg{0};
  double last_pos = 1e9, last_neg = -1e9;
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const std::vector<double> v{p};
    const double lp = wbce_loss(v, pos, {}).loss;
    const double ln = wbce_loss(v, neg, {}).loss;
    EXPECT_LT(lp, last_pos);
    EXPECT_GT(ln, last_neg);
    last_pos = lp;
    last_neg = ln;
  }
}

TEST(Loss, LogitPathAgreesAndShapeChecked) {
  SplitMixStream rng(8);
  std::vector<double> z(64), p(64), g(64);
  std::vector<std::uint8_t> y(64);
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = 6 * rng.uniform() - 3;
    p[i] = sigmoid(z[i]);
    y[i] = rng.uniform() < 0.3;
  }
  const double a = wbce_from_logits<double>(z, y, {}, g);
  const LossResult r = wbce_loss(p, y, {});
  EXPECT_NEAR(a, r.loss, 1e-12);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], r.grad[i], 1e-15);
  const std::vector<std::uint8_t> short_y(3);
  try {
    wbce_loss(p, short_y, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape_mismatch);
  }
  EXPECT_THROW((LossSpec{0.0, 1e-7}.validate()), Error);
  EXPECT_THROW((LossSpec{3.0, 0.5}.validate()), Error);
}

namespace {

struct GradCheck {
  std::size_t params = 0;
  std::size_t within = 0;
  double worst = 0;
};

GradCheck gradient_check(const SegNetArch& arch, int rows, int cols, std::uint64_t seed,
                         double w = 3.0) {
  SegNet<double> net(arch);
  net.init(seed);
  SplitMixStream rng(seed + 100);
  for (double& p : net.params()) p += 0.1 * (rng.uniform() - 0.5);
  std::vector<double> in(static_cast<std::size_t>(arch.in_channels) * rows * cols);
  for (double& v : in) v = 2 * rng.uniform() - 1;
  std::vector<std::uint8_t> t(static_cast<std::size_t>(net.out_rows(rows)) * net.out_cols(cols));
  for (auto& v : t) v = rng.uniform() < 0.3;
  const LossSpec spec{w, 1e-7};
  std::vector<double> g(net.num_params(), 0.0);
  net.loss_and_grad(in, arch.in_channels, rows, cols, t, spec, g);
  GradCheck out;
  out.params = g.size();
  const double h = 1e-4;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double p0 = net.params()[i];
    net.params()[i] = p0 + h;
    const double lp = wbce_from_logits<double>(net.forward(in, arch.in_channels, rows, cols), t, spec);
    net.params()[i] = p0 - h;
    const double lm = wbce_from_logits<double>(net.forward(in, arch.in_channels, rows, cols), t, spec);
    net.params()[i] = p0;
    const double rel = std::abs(g[i] - (lp - lm) / (2 * h)) / (std::abs(g[i]) + 1e-8);
    out.worst = std::max(out.worst, rel);
    out.within += rel < 1e-4;
  }
  return out;
}

}  // namespace

TEST(SegNet, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed : {1, 2}) {
    GradCheck gc = gradient_check({4, 2, 2, 3}, 16, 16, seed);
    EXPECT_GE(static_cast<double>(gc.within), 0.999 * static_cast<double>(gc.params)) << "worst " << gc.worst;
  }
  GradCheck deep = gradient_check({3, 3, 2, 3}, 24, 24, 5, 1.0);
  EXPECT_GE(static_cast<double>(deep.within), 0.999 * static_cast<double>(deep.params)) << "worst " << deep.worst;
}

TEST(SegNet, ZeroNetworkGivesZeroLogits) {
  SegNet<float> net({4, 2, 4, 3});
  std::fill(net.params().begin(), net.params().end(), 0.0f);
  std::vector<float> in(4 * 48 * 48, 0.0f);
  auto z = net.forward(in, 4, 48, 48);
  ASSERT_EQ(z.size(), 16u * 16u);
  for (float v : z) ASSERT_EQ(v, 0.0f);
  for (float v : z) EXPECT_EQ(sigmoid(v), 0.5);
}

TEST(SegNet, ForwardDeterministicAndChecked) {
  SegNet<float> net({4, 2, 4, 3});
  net.init(3);
  SplitMixStream rng(1);
  std::vector<float> in(4 * 48 * 48);
  for (float& v : in) v = static_cast<float>(rng.uniform());
  auto a = net.forward(in, 4, 48, 48);
  auto b = net.forward(in, 4, 48, 48);
  EXPECT_EQ(a, b);
  for (float v : a) ASSERT_TRUE(std::isfinite(v));
  try {
    net.forward(in, 3, 48, 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::channel_mismatch);
  }
  std::vector<float> odd(4 * 42 * 42);
  try {
    net.forward(odd, 4, 42, 42);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape_mismatch);
  }
}

TEST(SegNet, ShiftEquivariantInInterior) {
  const SegNetArch arch{2, 2, 4, 3};
  SegNet<double> net(arch);
  net.init(9);
  const int n = 96, shift = 12;  // a multiple of both 2^levels and the output pool
  SplitMixStream rng(4);
  std::vector<double> a(2 * n * n), b(2 * n * n);
  for (double& v : a) v = rng.uniform() - 0.5;
  for (int ch = 0; ch < 2; ++ch)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        b[(ch * n + r) * n + c] = c + shift < n ? a[(ch * n + r) * n + c + shift] : rng.uniform();
  auto za = net.forward(a, 2, n, n);
  auto zb = net.forward(b, 2, n, n);
  const int m = n / 3, s = shift / 3, border = 8;
  for (int r = border; r < m - border; ++r)
    for (int c = border; c + s < m - border; ++c)
      ASSERT_NEAR(zb[r * m + c], za[r * m + c + s], 1e-12) << r << "," << c;
}

TEST(SegNet, StationaryAtConstantOptimum) {
  // With all weights zero the logits equal the head bias everywhere; the
  // weighted loss is then minimised at p = w*pi / (w*pi + 1 - pi).
  SegNet<double> net({4, 2, 2, 3});
  std::fill(net.params().begin(), net.params().end(), 0.0);
  std::vector<double> in(4 * 16 * 16, 0.25);
  std::vector<std::uint8_t> t(25, 0);
  for (int i = 0; i < 5; ++i) t[i * 5] = 1;
  const double pi = 0.2, w = 3.0;
  const double p = w * pi / (w * pi + 1 - pi);
  net.params().back() = std::log(p / (1 - p));
  for (double z : net.forward(in, 4, 16, 16)) ASSERT_NEAR(z, net.params().back(), 1e-15);
  std::vector<double> g(net.num_params(), 0.0);
  net.loss_and_grad(in, 4, 16, 16, t, {w, 1e-7}, g);
  EXPECT_NEAR(g.back(), 0.0, 1e-12);
  net.params().back() += 0.1;
  std::fill(g.begin(), g.end(), 0.0);
  net.loss_and_grad(in, 4, 16, 16, t, {w, 1e-7}, g);
  EXPECT_GT(g.back(), 1e-4);
}

TEST(SegNet, ParameterGradientLinearInWeight) {
  SegNet<double> net({4, 2, 2, 3});
  net.init(6);
  SplitMixStream rng(6);
  std::vector<double> in(4 * 16 * 16);
  for (double& v : in) v = rng.uniform();
  std::vector<std::uint8_t> t(25);
  for (auto& v : t) v = rng.uniform() < 0.4;
  auto grad_at = [&](double w) {
    std::vector<double> g(net.num_params(), 0.0);
    net.loss_and_grad(in, 4, 16, 16, t, {w, 1e-7}, g);
    return g;
  };
  const auto g1 = grad_at(1), g2 = grad_at(2), g3 = grad_at(3);
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const double pos = g2[i] - g1[i];
    const double neg = g1[i] - pos;
    ASSERT_NEAR(g3[i], 3 * pos + neg, 1e-12 * (1 + std::abs(g3[i])));
  }
}

namespace {

struct ToyData {
  std::vector<FloatImage> inputs;
  std::vector<Mask> targets;
  std::vector<TrainExample> examples(std::size_t from, std::size_t to) const {
    std::vector<TrainExample> out;
    for (std::size_t i = from; i < to; ++i) out.push_back({&inputs[i], &targets[i]});
    return out;
  }
};

/// Channel 0 holds blobs; the target is their block-max at one third scale.
ToyData toy_data(int n, std::uint64_t seed) {
  ToyData d;
  SplitMixStream rng(seed);
  for (int k = 0; k < n; ++k) {
    FloatImage in(3, 48, 48, 0.0f);
    for (int b = 0; b < 4; ++b) {
      const int r0 = static_cast<int>(rng.below(44)), c0 = static_cast<int>(rng.below(44));
      const int h = 2 + static_cast<int>(rng.below(6)), w = 2 + static_cast<int>(rng.below(6));
      for (int r = r0; r < std::min(48, r0 + h); ++r)
        for (int c = c0; c < std::min(48, c0 + w); ++c) in.at(0, r, c) = 1.0f;
    }
    for (int ch = 1; ch < 3; ++ch)
      for (float& v : in.plane(ch)) v = static_cast<float>(rng.uniform() - 0.5);
    Mask t(1, 16, 16, 0);
    for (int r = 0; r < 48; ++r)
      for (int c = 0; c < 48; ++c)
        if (in.at(0, r, c) > 0.5f) t.at(r / 3, c / 3) = 1;
    d.inputs.push_back(std::move(in));
    d.targets.push_back(std::move(t));
  }
  return d;
}

}  // namespace

TEST(Train, LearnsThresholdedChannel) {
  ToyData d = toy_data(40, 1);
  const auto tr = d.examples(0, 32), va = d.examples(32, 40);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.batch_size = 4;
  cfg.max_epochs = 30;
  TrainResult r = train(tr, va, {3, 2, 4, 3}, cfg, {});
  EXPECT_GT(r.best.val_iou, 0.95);
  ASSERT_EQ(r.log.size(), 30u);
  double best = -1;
  int best_epoch = 0;
  for (const auto& e : r.log)
    if (e.val_iou > best) best = e.val_iou, best_epoch = e.epoch;
  EXPECT_EQ(r.best.val_iou, best);
  EXPECT_EQ(r.best.epoch, best_epoch);
}

TEST(Train, DeterministicGivenSeed) {
  ToyData d = toy_data(12, 2);
  const auto tr = d.examples(0, 8), va = d.examples(8, 12);
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.batch_size = 3;
  cfg.seed = 4;
  TrainResult a = train(tr, va, {3, 2, 4, 3}, cfg, {});
  TrainResult b = train(tr, va, {3, 2, 4, 3}, cfg, {});
  EXPECT_EQ(a.best, b.best);
  cfg.seed = 5;
  EXPECT_NE(train(tr, va, {3, 2, 4, 3}, cfg, {}).best.params, a.best.params);
}

TEST(Train, ZeroLearningRateKeepsInitialisation) {
  ToyData d = toy_data(12, 3);
  const auto tr = d.examples(0, 8), va = d.examples(8, 12);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.max_epochs = 3;
  cfg.seed = 7;
  const SegNetArch arch{3, 2, 4, 3};
  TrainResult r = train(tr, va, arch, cfg, {});
  SegNet<float> fresh(arch);
  fresh.init(hash_mix({7, 1}));
  EXPECT_EQ(r.best.params, fresh.params());
  EXPECT_EQ(r.best.epoch, 1);
  ConfusionCounts c;
  for (const auto& ex : va) c = accumulate(c, binarize(predict_proba(fresh, *ex.input)), *ex.target);
  EXPECT_EQ(r.best.val_iou, score(c).iou);
  for (const auto& e : r.log) EXPECT_EQ(e.val_iou, r.best.val_iou);
}

TEST(Train, EmptySplit) {
  ToyData d = toy_data(2, 4);
  const auto one = d.examples(0, 1);
  try {
    train({}, one, {3, 2, 4, 3}, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_split);
    EXPECT_NE(std::string(e.what()).find("empty sample set"), std::string::npos);
  }
  EXPECT_THROW(train(one, {}, {3, 2, 4, 3}, {}, {}), Error);
}

TEST(Checkpoint, RoundTripAndCorruption) {
  Checkpoint c;
  c.arch = {3, 2, 4, 3};
  SegNet<float> net(c.arch);
  net.init(1);
  c.params = net.params();
  c.epoch = 7;
  c.val_iou = 0.625;
  const auto dir = std::filesystem::temp_directory_path() / "firecast_ckpt";
  std::filesystem::create_directories(dir);
  write_checkpoint(dir / "a.ckpt", c);
  EXPECT_EQ(read_checkpoint(dir / "a.ckpt"), c);
  SegNet<float> loaded = load_network(read_checkpoint(dir / "a.ckpt"));
  EXPECT_EQ(loaded.params(), c.params);
  {
    std::ofstream f(dir / "a.ckpt", std::ios::app | std::ios::binary);
    f << 'x';
  }
  EXPECT_THROW(read_checkpoint(dir / "a.ckpt"), Error);
  std::filesystem::remove_all(dir);
}

TEST(Persistence, Identity) {
  Mask zero(1, 64, 64, 0);
  EXPECT_EQ(persistence_predict(zero), zero);
  Mask m(1, 64, 64, 0);
  m.at(3, 9) = 1;
  m.at(60, 2) = 1;
  EXPECT_EQ(persistence_predict(m), m);
}
