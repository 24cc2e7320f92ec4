#include "firecast/eval.hpp"

#include <cmath>
#include <cstdio>

#include "firecast/error.hpp"
#include "firecast/train.hpp"

namespace firecast {

Evaluation evaluate(const Predictor& predictor, std::span<const Sample> samples,
                    const std::string& target_product, double threshold) {
  if (samples.empty()) throw Error(ErrorCode::empty_set, "empty sample set");
  ConfusionCounts counts;
  for (const Sample& s : samples) {
    auto it = s.target.find(target_product);
    if (it == s.target.end())
      throw Error(ErrorCode::target_missing, "sample lacks a " + target_product + " target");
    counts = accumulate(counts, binarize(predictor(s), threshold), it->second);
  }
  return {score(counts), counts};
}

Predictor persistence_predictor(const std::string& product) {
  return [product](const Sample& s) {
    auto it = s.current.find(product);
    if (it == s.current.end())
      throw Error(ErrorCode::target_missing, "sample lacks a current-day " + product + " mask");
    const Mask pred = persistence_predict(it->second);
    FloatImage out(1, pred.rows(), pred.cols());
    for (std::size_t i = 0; i < pred.size(); ++i) out.data()[i] = pred.data()[i];
    return out;
  };
}

Predictor model_predictor(SegNet<float>& net) {
  return [&net](const Sample& s) { return predict_proba(net, s.input); };
}

namespace {

std::string percent_text(double mean, std::optional<double> sd) {
  char buf[64];
  if (sd) std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100 * mean, 100 * *sd);
  else std::snprintf(buf, sizeof buf, "%.2f ± —", 100 * mean);
  return buf;
}

}  // namespace

std::string RunSummary::f1_text() const {
  return percent_text(mean.f1, stddev ? std::optional(stddev->f1) : std::nullopt);
}

std::string RunSummary::iou_text() const {
  return percent_text(mean.iou, stddev ? std::optional(stddev->iou) : std::nullopt);
}

RunSummary aggregate_runs(std::span<const Scores> runs) {
  if (runs.empty()) throw Error(ErrorCode::invalid_argument, "no runs to aggregate");
  RunSummary s;
  s.runs.assign(runs.begin(), runs.end());
  const double n = static_cast<double>(runs.size());
  for (const Scores& r : runs) {
    s.mean.f1 += r.f1 / n;
    s.mean.iou += r.iou / n;
  }
  if (runs.size() >= 2) {
    Scores var;
    for (const Scores& r : runs) {
      var.f1 += (r.f1 - s.mean.f1) * (r.f1 - s.mean.f1);
      var.iou += (r.iou - s.mean.iou) * (r.iou - s.mean.iou);
    }
    s.stddev = Scores{std::sqrt(var.f1 / (n - 1)), std::sqrt(var.iou / (n - 1))};
  }
  return s;
}

std::string format_report(std::span<const ReportRow> rows) {
  std::string out = "Input | Training Target | Evaluation Target | F1 (%) | IoU (%)\n";
  for (const ReportRow& r : rows)
    out += r.input + " | " + r.train_target + " | " + r.eval_target + " | " + r.summary.f1_text() +
           " | " + r.summary.iou_text() + "\n";
  return out;
}

}  // namespace firecast
