#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "firecast/loss.hpp"

namespace firecast {

/// Shape of the encoder-decoder.
///
/// Encoder level l: conv3x3 (width * 2^l channels) + SiLU, then 2x2 average
/// pooling. A bottleneck conv follows the last level. Each decoder level
/// upsamples by nearest neighbour, concatenates the matching encoder output
/// and applies conv3x3 + SiLU. A 1x1 head gives one logit per input pixel;
/// an `out_pool` x `out_pool` max pool (floor mode) reduces it to the target
/// grid.
struct SegNetArch {
  int in_channels = 4;
  int levels = 3;
  int width = 8;
  int out_pool = 3;

  void validate() const;
  bool operator==(const SegNetArch&) const = default;
};

template <typename Real>
class SegNet {
 public:
  explicit SegNet(const SegNetArch& arch);

  const SegNetArch& arch() const { return arch_; }
  std::size_t num_params() const { return params_.size(); }
  std::vector<Real>& params() { return params_; }
  const std::vector<Real>& params() const { return params_; }

  /// Fan-in scaled uniform weights, zero biases.
  void init(std::uint64_t seed);

  /// Logits at (rows / out_pool) x (cols / out_pool). `input` is CHW.
  /// Throws Error(channel_mismatch) or Error(shape_mismatch).
  std::vector<Real> forward(std::span<const Real> input, int channels, int rows, int cols);

  /// Loss of one sample; adds d loss / d params into `grad`.
  double loss_and_grad(std::span<const Real> input, int channels, int rows, int cols,
                       std::span<const std::uint8_t> target, const LossSpec& spec,
                       std::span<Real> grad);

  int out_rows(int rows) const { return rows / arch_.out_pool; }
  int out_cols(int cols) const { return cols / arch_.out_pool; }

 private:
  struct Conv {
    int cin, cout, k;
    std::size_t w, b;  // parameter offsets
  };
  struct Level {
    int ch, rows, cols;
    std::vector<Real> pre, act, sg;  // conv output, SiLU output, sigmoid(pre)
  };

  void run_forward(std::span<const Real> input, int rows, int cols);
  void check_input(std::size_t size, int channels, int rows, int cols) const;

  SegNetArch arch_;
  std::vector<Real> params_;
  std::vector<Conv> enc_, dec_;
  Conv mid_{}, head_{};

  // Activations of the last forward pass.
  std::vector<Level> enc_out_, dec_out_;
  Level mid_out_;
  std::vector<std::vector<Real>> pooled_;   // input of encoder level l + 1 / bottleneck
  std::vector<std::vector<Real>> dec_in_;   // concatenated decoder inputs
  std::vector<Real> logits_full_;
  std::vector<std::int32_t> argmax_;
  std::vector<Real> scratch_;
};

extern template class SegNet<float>;
extern template class SegNet<double>;

}  // namespace firecast
