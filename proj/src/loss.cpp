#include "firecast/loss.hpp"

#include <algorithm>

namespace firecast {

void LossSpec::validate() const {
  if (!(w > 0)) throw Error(ErrorCode::invalid_argument, "loss weight w must be positive");
  if (!(eps > 0 && eps < 0.5)) throw Error(ErrorCode::invalid_argument, "eps must lie in (0, 0.5)");
}

LossTerms wbce_terms(std::span<const double> prob, std::span<const std::uint8_t> target,
                     double eps) {
  if (prob.size() != target.size() || prob.empty())
    throw Error(ErrorCode::shape_mismatch, "prediction and target sizes differ");
  LossTerms t;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double p = std::clamp(prob[i], eps, 1.0 - eps);
    if (target[i]) t.positive -= std::log(p);
    else t.negative -= std::log(1.0 - p);
  }
  const double n = static_cast<double>(prob.size());
  t.positive /= n;
  t.negative /= n;
  return t;
}

LossResult wbce_loss(std::span<const double> prob, std::span<const std::uint8_t> target,
                     const LossSpec& spec) {
  spec.validate();
  LossResult r;
  r.loss = wbce_terms(prob, target, spec.eps).total(spec.w);
  const double n = static_cast<double>(prob.size());
  r.grad.resize(prob.size());
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double y = target[i] ? 1.0 : 0.0;
    r.grad[i] = ((spec.w * y + 1.0 - y) * prob[i] - spec.w * y) / n;
  }
  return r;
}

}  // namespace firecast
