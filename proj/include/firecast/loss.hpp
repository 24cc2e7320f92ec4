#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "firecast/error.hpp"

namespace firecast {

/// Weighted binary cross-entropy settings.
struct LossSpec {
  double w = 3.0;     // positive-class weight
  double eps = 1e-7;  // probability clamp

  void validate() const;
};

/// Positive and negative partial sums of the loss, each already divided by N:
/// loss = w * positive + negative.
struct LossTerms {
  double positive = 0;
  double negative = 0;

  double total(double w) const { return w * positive + negative; }
};

struct LossResult {
  double loss = 0;
  std::vector<double> grad;  // d loss / d logit, per pixel
};

LossTerms wbce_terms(std::span<const double> prob, std::span<const std::uint8_t> target,
                     double eps);

/// Loss over clamped probabilities and its gradient with respect to the
/// logits z with prob = sigmoid(z). Throws Error(shape_mismatch).
LossResult wbce_loss(std::span<const double> prob, std::span<const std::uint8_t> target,
                     const LossSpec& spec);

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

/// Loss straight from logits; writes d loss / d z into `grad` when non-null.
template <typename Real>
double wbce_from_logits(std::span<const Real> logits, std::span<const std::uint8_t> target,
                        const LossSpec& spec, std::span<Real> grad = {}) {
  if (logits.size() != target.size() || (!grad.empty() && grad.size() != logits.size()))
    throw Error(ErrorCode::shape_mismatch, "logit and target sizes differ");
  const double n = static_cast<double>(logits.size());
  double sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = sigmoid(static_cast<double>(logits[i]));
    const double pc = std::clamp(p, spec.eps, 1.0 - spec.eps);
    const double y = target[i] ? 1.0 : 0.0;
    sum += y > 0 ? spec.w * std::log(pc) : std::log(1.0 - pc);
    if (!grad.empty()) grad[i] = static_cast<Real>(((spec.w * y + 1.0 - y) * p - spec.w * y) / n);
  }
  return -sum / n;
}

}  // namespace firecast
