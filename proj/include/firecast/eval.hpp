#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "firecast/dataset.hpp"
#include "firecast/metrics.hpp"
#include "firecast/segnet.hpp"

namespace firecast {

/// Maps a sample to a 64x64 fire probability map.
using Predictor = std::function<FloatImage(const Sample&)>;

struct Evaluation {
  Scores scores;
  ConfusionCounts counts;
};

/// Micro-averaged over every pixel of every sample: counts are summed first,
/// then scored once. Throws Error(empty_set) or Error(target_missing).
Evaluation evaluate(const Predictor& predictor, std::span<const Sample> samples,
                    const std::string& target_product, double threshold = 0.5);

/// Day-t mask of `product` as the prediction.
Predictor persistence_predictor(const std::string& product);
/// Network prediction; the network must outlive the predictor.
Predictor model_predictor(SegNet<float>& net);

struct RunSummary {
  std::vector<Scores> runs;
  Scores mean;
  std::optional<Scores> stddev;  // sample std, n >= 2

  /// "mean ± std" in percent with two decimals; "—" for the std of one run.
  std::string f1_text() const;
  std::string iou_text() const;
};

/// Throws Error(invalid_argument) on an empty list.
RunSummary aggregate_runs(std::span<const Scores> runs);

struct ReportRow {
  std::string input;
  std::string train_target;
  std::string eval_target;
  RunSummary summary;
};

/// Pipe-delimited table: Input | Training Target | Evaluation Target | F1 (%) | IoU (%).
std::string format_report(std::span<const ReportRow> rows);

}  // namespace firecast
