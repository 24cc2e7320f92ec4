#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "firecast/dataset.hpp"
#include "firecast/loss.hpp"
#include "firecast/segnet.hpp"

namespace firecast {

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 8;
  int max_epochs = 20;
  std::uint64_t seed = 0;
  double threshold = 0.5;

  void validate() const;
};

struct Checkpoint {
  SegNetArch arch;
  std::vector<float> params;
  int epoch = 0;
  double val_iou = 0;

  bool operator==(const Checkpoint&) const = default;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0;
  double val_iou = 0;
};

struct TrainResult {
  Checkpoint best;
  std::vector<EpochRecord> log;
};

/// One input stack with its binary 64x64 target.
struct TrainExample {
  const FloatImage* input;
  const Mask* target;
};

/// Mini-batch SGD with momentum; after every epoch the validation IoU is
/// computed and the best epoch kept (earliest on ties).
/// Throws Error(empty_split) if either set is empty.
TrainResult train(std::span<const TrainExample> train_set, std::span<const TrainExample> val_set,
                  const SegNetArch& arch, const TrainConfig& cfg, const LossSpec& spec);

/// Trains on `ds.train` / `ds.val` against the given target product.
TrainResult train(const Dataset& ds, const std::string& target_product, const SegNetArch& arch,
                  const TrainConfig& cfg, const LossSpec& spec);

/// Tomorrow's fire equals today's.
inline Mask persistence_predict(const Mask& current) { return current; }

/// Sigmoid probabilities of a 64x64 prediction for one input stack.
FloatImage predict_proba(SegNet<float>& net, const FloatImage& input);

SegNet<float> load_network(const Checkpoint& ckpt);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// One JSON object per line: epoch, train_loss, val_iou.
void write_train_log(const std::filesystem::path& path, std::span<const EpochRecord> log);

}  // namespace firecast
