#include "firecast/train.hpp"

#include <json.hpp>
#include <numeric>

#include "firecast/binio.hpp"
#include "firecast/error.hpp"
#include "firecast/hash.hpp"
#include "firecast/metrics.hpp"

namespace firecast {
namespace {

constexpr char kCkptMagic[5] = "CKPT";
constexpr std::uint16_t kCkptVersion = 1;

double validation_iou(SegNet<float>& net, std::span<const TrainExample> set, double threshold) {
  ConfusionCounts counts;
  for (const TrainExample& ex : set)
    counts = accumulate(counts, binarize(predict_proba(net, *ex.input), threshold), *ex.target);
  return score(counts).iou;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0) || !(momentum >= 0 && momentum < 1) || batch_size < 1 ||
      max_epochs < 1 || !(threshold > 0 && threshold < 1))
    throw Error(ErrorCode::invalid_argument, "invalid training configuration");
}

FloatImage predict_proba(SegNet<float>& net, const FloatImage& input) {
  const std::vector<float> logits =
      net.forward(input.data(), input.channels(), input.rows(), input.cols());
  FloatImage out(1, net.out_rows(input.rows()), net.out_cols(input.cols()));
  for (std::size_t i = 0; i < logits.size(); ++i)
    out.data()[i] = static_cast<float>(sigmoid(logits[i]));
  return out;
}

TrainResult train(std::span<const TrainExample> train_set, std::span<const TrainExample> val_set,
                  const SegNetArch& arch, const TrainConfig& cfg, const LossSpec& spec) {
  cfg.validate();
  spec.validate();
  if (train_set.empty()) throw Error(ErrorCode::empty_split, "empty sample set: no TRAIN samples");
  if (val_set.empty()) throw Error(ErrorCode::empty_split, "empty sample set: no VAL samples");

  SegNet<float> net(arch);
  net.init(hash_mix({cfg.seed, 1}));
  std::vector<float>& params = net.params();
  std::vector<float> grad(params.size()), velocity(params.size(), 0.0f);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMixStream shuffle(hash_mix({cfg.seed, 2}));

  TrainResult result;
  result.best = {arch, params, 0, -1.0};
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0f);
      for (std::size_t j = start; j < end; ++j) {
        const TrainExample& ex = train_set[order[j]];
        loss_sum += net.loss_and_grad(ex.input->data(), ex.input->channels(), ex.input->rows(),
                                      ex.input->cols(), ex.target->data(), spec, grad);
      }
      const float inv = 1.0f / static_cast<float>(end - start);
      const auto mu = static_cast<float>(cfg.momentum);
      const auto lr = static_cast<float>(cfg.learning_rate);
      for (std::size_t k = 0; k < params.size(); ++k) {
        velocity[k] = mu * velocity[k] + grad[k] * inv;
        params[k] -= lr * velocity[k];
      }
    }
    const double iou = validation_iou(net, val_set, cfg.threshold);
    result.log.push_back({epoch, loss_sum / static_cast<double>(order.size()), iou});
    if (iou > result.best.val_iou) result.best = {arch, params, epoch, iou};
  }
  return result;
}

TrainResult train(const Dataset& ds, const std::string& target_product, const SegNetArch& arch,
                  const TrainConfig& cfg, const LossSpec& spec) {
  auto examples = [&](const std::vector<Sample>& samples) {
    std::vector<TrainExample> out;
    for (const Sample& s : samples) {
      auto it = s.target.find(target_product);
      if (it == s.target.end())
        throw Error(ErrorCode::target_missing, "sample lacks a " + target_product + " target");
      out.push_back({&s.input, &it->second});
    }
    return out;
  };
  const auto tr = examples(ds.train);
  const auto va = examples(ds.val);
  return train(tr, va, arch, cfg, spec);
}

SegNet<float> load_network(const Checkpoint& ckpt) {
  SegNet<float> net(ckpt.arch);
  if (ckpt.params.size() != net.num_params())
    throw Error(ErrorCode::corrupt_entry, "checkpoint parameter count does not match its architecture");
  net.params() = ckpt.params;
  return net;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  binio::Writer w;
  w.magic(kCkptMagic);
  w.u16(kCkptVersion);
  w.i64(ckpt.arch.in_channels);
  w.i64(ckpt.arch.levels);
  w.i64(ckpt.arch.width);
  w.i64(ckpt.arch.out_pool);
  w.u64(ckpt.params.size());
  for (float p : ckpt.params) w.f32(p);
  w.i64(ckpt.epoch);
  w.f64(ckpt.val_iou);
  binio::write_file_atomic(path, w.buffer());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> buf = binio::read_file(path);
  binio::Reader r(buf);
  if (!r.magic(kCkptMagic))
    throw Error(ErrorCode::bad_magic, path.string() + " is not a checkpoint");
  if (r.u16() != kCkptVersion)
    throw Error(ErrorCode::version_mismatch, path.string() + ": unsupported checkpoint version");
  Checkpoint c;
  c.arch.in_channels = static_cast<int>(r.i64());
  c.arch.levels = static_cast<int>(r.i64());
  c.arch.width = static_cast<int>(r.i64());
  c.arch.out_pool = static_cast<int>(r.i64());
  const std::uint64_t n = r.u64();
  if (n > r.remaining() / 4) throw Error(ErrorCode::truncated_file, path.string() + ": truncated");
  c.params.resize(n);
  r.f32s(c.params);
  c.epoch = static_cast<int>(r.i64());
  c.val_iou = r.f64();
  if (r.remaining() != 0) throw Error(ErrorCode::length_mismatch, path.string() + ": trailing bytes");
  return c;
}

void write_train_log(const std::filesystem::path& path, std::span<const EpochRecord> log) {
  std::string text;
  for (const EpochRecord& e : log)
    text += nlohmann::json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_iou", e.val_iou}}
                .dump() +
            "\n";
  binio::write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

}  // namespace firecast
