#pragma once

#include <cstdint>

#include "firecast/image.hpp"

namespace firecast {

/// Pixel confusion counts, summed over every evaluated sample.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct Scores {
  double f1 = 0;
  double iou = 0;
};

/// Adds one prediction/target pair. Throws Error(shape_mismatch).
ConfusionCounts accumulate(ConfusionCounts counts, const Mask& pred, const Mask& target);

/// F1 = 2TP/(2TP+FP+FN), IoU = TP/(TP+FP+FN); (1, 1) when TP+FP+FN = 0.
Scores score(const ConfusionCounts& c);

/// Binarizes `prob > threshold`.
Mask binarize(const FloatImage& prob, double threshold = 0.5);

}  // namespace firecast
