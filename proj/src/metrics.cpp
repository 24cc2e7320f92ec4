#include "firecast/metrics.hpp"

#include "firecast/error.hpp"

namespace firecast {

ConfusionCounts accumulate(ConfusionCounts counts, const Mask& pred, const Mask& target) {
  if (!pred.same_shape(target))
    throw Error(ErrorCode::shape_mismatch, "prediction and target shapes differ");
  const auto& p = pred.data();
  const auto& t = target.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool a = p[i] != 0;
    const bool b = t[i] != 0;
    if (a && b) ++counts.tp;
    else if (a) ++counts.fp;
    else if (b) ++counts.fn;
    else ++counts.tn;
  }
  return counts;
}

Scores score(const ConfusionCounts& c) {
  const double err = static_cast<double>(c.fp) + static_cast<double>(c.fn);
  if (c.tp == 0 && err == 0) return {1.0, 1.0};
  const double tp = static_cast<double>(c.tp);
  return {2 * tp / (2 * tp + err), tp / (tp + err)};
}

Mask binarize(const FloatImage& prob, double threshold) {
  Mask out(prob.channels(), prob.rows(), prob.cols(), 0);
  for (std::size_t i = 0; i < prob.data().size(); ++i) out.data()[i] = prob.data()[i] > threshold;
  return out;
}

}  // namespace firecast
