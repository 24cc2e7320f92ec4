#include "firecast/segnet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "firecast/error.hpp"
#include "firecast/hash.hpp"

namespace firecast {
namespace {

template <typename Real>
void pad_input(const Real* in, int ch, int rows, int cols, int p, std::vector<Real>& out) {
  const int pr = rows + 2 * p, pc = cols + 2 * p;
  out.assign(static_cast<std::size_t>(ch) * pr * pc, Real(0));
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < rows; ++y)
      std::copy_n(in + (static_cast<std::size_t>(c) * rows + y) * cols, cols,
                  out.data() + (static_cast<std::size_t>(c) * pr + y + p) * pc + p);
}

constexpr int kBlock = 4;

// "Same" convolution over a pre-padded input. Output rows are summed in
// cache-resident buffers, kBlock output channels per pass over the input.
template <typename Real>
void conv_forward(const Real* pin, int cin, int rows, int cols, const Real* w, const Real* b,
                  int cout, int k, Real* out) {
  const int pr = rows + k - 1, pc = cols + k - 1;
  const std::size_t wstride = static_cast<std::size_t>(cin) * k * k;
  std::vector<Real> acc(static_cast<std::size_t>(kBlock) * cols);
  for (int co0 = 0; co0 < cout; co0 += kBlock) {
    const int nb = std::min(kBlock, cout - co0);
    for (int y = 0; y < rows; ++y) {
      for (int j = 0; j < nb; ++j) std::fill_n(acc.data() + j * cols, cols, b[co0 + j]);
      Real* a0 = acc.data();
      Real* a1 = a0 + cols;
      Real* a2 = a1 + cols;
      Real* a3 = a2 + cols;
      for (int ci = 0; ci < cin; ++ci)
        for (int ky = 0; ky < k; ++ky) {
          const Real* srow = pin + (static_cast<std::size_t>(ci) * pr + y + ky) * pc;
          const Real* wr = w + static_cast<std::size_t>(co0) * wstride + (ci * k + ky) * k;
          for (int kx = 0; kx < k; ++kx) {
            const Real* src = srow + kx;
            if (nb == kBlock) {
              const Real w0 = wr[kx], w1 = wr[wstride + kx], w2 = wr[2 * wstride + kx],
                         w3 = wr[3 * wstride + kx];
#pragma omp simd
              for (int x = 0; x < cols; ++x) {
                const Real v = src[x];
                a0[x] += w0 * v;
                a1[x] += w1 * v;
                a2[x] += w2 * v;
                a3[x] += w3 * v;
              }
            } else {
              for (int j = 0; j < nb; ++j) {
                const Real wv = wr[j * wstride + kx];
                Real* dst = acc.data() + j * cols;
#pragma omp simd
                for (int x = 0; x < cols; ++x) dst[x] += wv * src[x];
              }
            }
          }
        }
      for (int j = 0; j < nb; ++j)
        std::copy_n(acc.data() + j * cols, cols,
                    out + (static_cast<std::size_t>(co0 + j) * rows + y) * cols);
    }
  }
}

// Accumulates weight/bias gradients; writes the input gradient when `din` is set.
template <typename Real>
void conv_backward(const Real* pin, int cin, int rows, int cols, const Real* w, int cout, int k,
                   const Real* dout, Real* dw, Real* db, Real* din) {
  const int p = k / 2;
  const int pr = rows + k - 1, pc = cols + k - 1;
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  const std::size_t wstride = static_cast<std::size_t>(cin) * k * k;
  for (int co = 0; co < cout; ++co) {
    const Real* g = dout + co * plane;
    Real bs = 0;
#pragma omp simd reduction(+ : bs)
    for (std::size_t i = 0; i < plane; ++i) bs += g[i];
    db[co] += bs;
  }
  for (int co0 = 0; co0 < cout; co0 += kBlock) {
    const int nb = std::min(kBlock, cout - co0);
    for (int ci = 0; ci < cin; ++ci)
      for (int ky = 0; ky < k; ++ky)
        for (int kx = 0; kx < k; ++kx) {
          Real s[kBlock] = {};
          for (int y = 0; y < rows; ++y) {
            const Real* src = pin + (static_cast<std::size_t>(ci) * pr + y + ky) * pc + kx;
            const Real* g0 = dout + co0 * plane + static_cast<std::size_t>(y) * cols;
            if (nb == kBlock) {
              const Real* g1 = g0 + plane;
              const Real* g2 = g1 + plane;
              const Real* g3 = g2 + plane;
              Real s0 = 0, s1 = 0, s2 = 0, s3 = 0;
#pragma omp simd reduction(+ : s0, s1, s2, s3)
              for (int x = 0; x < cols; ++x) {
                const Real v = src[x];
                s0 += g0[x] * v;
                s1 += g1[x] * v;
                s2 += g2[x] * v;
                s3 += g3[x] * v;
              }
              s[0] += s0;
              s[1] += s1;
              s[2] += s2;
              s[3] += s3;
            } else {
              for (int j = 0; j < nb; ++j) {
                const Real* gj = g0 + j * plane;
                Real sj = 0;
#pragma omp simd reduction(+ : sj)
                for (int x = 0; x < cols; ++x) sj += gj[x] * src[x];
                s[j] += sj;
              }
            }
          }
          for (int j = 0; j < nb; ++j)
            dw[(co0 + j) * wstride + (static_cast<std::size_t>(ci) * k + ky) * k + kx] += s[j];
        }
  }
  if (!din) return;
  // din[ci, py, px] = sum over co, ky, kx of w * dout[co, py - ky, px - kx]
  // in padded coordinates, cropped back to the interior.
  std::vector<Real> acc(static_cast<std::size_t>(kBlock) * pc);
  for (int ci0 = 0; ci0 < cin; ci0 += kBlock) {
    const int nb = std::min(kBlock, cin - ci0);
    for (int y = 0; y < rows; ++y) {
      const int py = y + p;
      std::fill(acc.begin(), acc.end(), Real(0));
      for (int co = 0; co < cout; ++co)
        for (int ky = 0; ky < k; ++ky) {
          const int gy = py - ky;
          if (gy < 0 || gy >= rows) continue;
          const Real* gr = dout + co * plane + static_cast<std::size_t>(gy) * cols;
          const Real* wr = w + co * wstride + (static_cast<std::size_t>(ci0) * k + ky) * k;
          const std::size_t cstep = static_cast<std::size_t>(k) * k;
          for (int kx = 0; kx < k; ++kx) {
            if (nb == kBlock) {
              const Real w0 = wr[kx], w1 = wr[cstep + kx], w2 = wr[2 * cstep + kx],
                         w3 = wr[3 * cstep + kx];
              Real* d0 = acc.data() + kx;
              Real* d1 = d0 + pc;
              Real* d2 = d1 + pc;
              Real* d3 = d2 + pc;
#pragma omp simd
              for (int x = 0; x < cols; ++x) {
                const Real v = gr[x];
                d0[x] += w0 * v;
                d1[x] += w1 * v;
                d2[x] += w2 * v;
                d3[x] += w3 * v;
              }
            } else {
              for (int j = 0; j < nb; ++j) {
                const Real wv = wr[j * cstep + kx];
                Real* dst = acc.data() + j * pc + kx;
#pragma omp simd
                for (int x = 0; x < cols; ++x) dst[x] += wv * gr[x];
              }
            }
          }
        }
      for (int j = 0; j < nb; ++j)
        std::copy_n(acc.data() + j * pc + p, cols,
                    din + (static_cast<std::size_t>(ci0 + j) * rows + y) * cols);
    }
  }
}

template <typename Real>
Real sig(Real z) {
  return Real(1) / (Real(1) + std::exp(-z));
}

template <typename Real>
void silu(const std::vector<Real>& pre, std::vector<Real>& act, std::vector<Real>& sg) {
  act.resize(pre.size());
  sg.resize(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    sg[i] = sig(pre[i]);
    act[i] = pre[i] * sg[i];
  }
}

// In place: g <- g * silu'(pre), given sg = sigmoid(pre).
template <typename Real>
void silu_backward(const std::vector<Real>& pre, const std::vector<Real>& sg, std::vector<Real>& g) {
  for (std::size_t i = 0; i < pre.size(); ++i) g[i] *= sg[i] * (Real(1) + pre[i] * (Real(1) - sg[i]));
}

template <typename Real>
void avgpool2(const std::vector<Real>& in, int ch, int rows, int cols, std::vector<Real>& out) {
  const int r2 = rows / 2, c2 = cols / 2;
  out.assign(static_cast<std::size_t>(ch) * r2 * c2, Real(0));
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < r2; ++y)
      for (int x = 0; x < c2; ++x) {
        const Real* a = in.data() + (static_cast<std::size_t>(c) * rows + 2 * y) * cols + 2 * x;
        out[(static_cast<std::size_t>(c) * r2 + y) * c2 + x] =
            Real(0.25) * (a[0] + a[1] + a[cols] + a[cols + 1]);
      }
}

// Adds the pooled gradient spread back onto the full-resolution gradient.
template <typename Real>
void avgpool2_backward(const std::vector<Real>& g, int ch, int rows, int cols,
                       std::vector<Real>& gin) {
  const int r2 = rows / 2, c2 = cols / 2;
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < r2; ++y)
      for (int x = 0; x < c2; ++x) {
        const Real v = Real(0.25) * g[(static_cast<std::size_t>(c) * r2 + y) * c2 + x];
        Real* a = gin.data() + (static_cast<std::size_t>(c) * rows + 2 * y) * cols + 2 * x;
        a[0] += v;
        a[1] += v;
        a[cols] += v;
        a[cols + 1] += v;
      }
}

// Nearest x2 upsampling written into the first `ch` channels of `out`.
template <typename Real>
void upsample2(const std::vector<Real>& in, int ch, int rows, int cols, Real* out) {
  const int r2 = rows * 2, c2 = cols * 2;
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < r2; ++y)
      for (int x = 0; x < c2; ++x)
        out[(static_cast<std::size_t>(c) * r2 + y) * c2 + x] =
            in[(static_cast<std::size_t>(c) * rows + y / 2) * cols + x / 2];
}

template <typename Real>
void upsample2_backward(const Real* g, int ch, int rows, int cols, std::vector<Real>& gin) {
  const int r2 = rows * 2, c2 = cols * 2;
  gin.assign(static_cast<std::size_t>(ch) * rows * cols, Real(0));
  for (int c = 0; c < ch; ++c)
    for (int y = 0; y < r2; ++y)
      for (int x = 0; x < c2; ++x)
        gin[(static_cast<std::size_t>(c) * rows + y / 2) * cols + x / 2] +=
            g[(static_cast<std::size_t>(c) * r2 + y) * c2 + x];
}

}  // namespace

void SegNetArch::validate() const {
  if (in_channels < 1 || levels < 0 || width < 1 || out_pool < 1 || levels > 8)
    throw Error(ErrorCode::invalid_argument, "invalid network architecture");
}

template <typename Real>
SegNet<Real>::SegNet(const SegNetArch& arch) : arch_(arch) {
  arch_.validate();
  std::size_t n = 0;
  auto add = [&](int cin, int cout, int k) {
    Conv c{cin, cout, k, n, 0};
    n += static_cast<std::size_t>(cout) * cin * k * k;
    c.b = n;
    n += cout;
    return c;
  };
  int cin = arch_.in_channels;
  for (int l = 0; l < arch_.levels; ++l) {
    enc_.push_back(add(cin, arch_.width << l, 3));
    cin = arch_.width << l;
  }
  mid_ = add(cin, arch_.width << arch_.levels, 3);
  dec_.resize(arch_.levels);
  int below = arch_.width << arch_.levels;
  for (int l = arch_.levels - 1; l >= 0; --l) {
    dec_[l] = add(below + (arch_.width << l), arch_.width << l, 3);
    below = arch_.width << l;
  }
  head_ = add(below, 1, 1);
  params_.assign(n, Real(0));
}

template <typename Real>
void SegNet<Real>::init(std::uint64_t seed) {
  SplitMixStream rng(seed);
  std::fill(params_.begin(), params_.end(), Real(0));
  auto fill = [&](const Conv& c) {
    const double bound = std::sqrt(6.0 / (c.cin * c.k * c.k));
    for (std::size_t i = c.w; i < c.b; ++i)
      params_[i] = static_cast<Real>((2 * rng.uniform() - 1) * bound);
  };
  for (const Conv& c : enc_) fill(c);
  fill(mid_);
  for (int l = arch_.levels - 1; l >= 0; --l) fill(dec_[l]);
  fill(head_);
}

template <typename Real>
void SegNet<Real>::check_input(std::size_t size, int channels, int rows, int cols) const {
  if (channels != arch_.in_channels)
    throw Error(ErrorCode::channel_mismatch, "network expects " +
                                                 std::to_string(arch_.in_channels) +
                                                 " channels, input has " + std::to_string(channels));
  const int f = 1 << arch_.levels;
  if (rows <= 0 || cols <= 0 || rows % f || cols % f ||
      size != static_cast<std::size_t>(channels) * rows * cols || rows < arch_.out_pool ||
      cols < arch_.out_pool)
    throw Error(ErrorCode::shape_mismatch, "input size must be a multiple of " + std::to_string(f));
}

template <typename Real>
void SegNet<Real>::run_forward(std::span<const Real> input, int rows, int cols) {
  const int levels = arch_.levels;
  enc_out_.resize(levels);
  pooled_.resize(levels);
  dec_out_.resize(levels);
  dec_in_.resize(levels);
  const Real* cur = input.data();
  int r = rows, c = cols;
  auto run_conv = [&](const Conv& cv, const Real* in, Level& lv) {
    pad_input(in, cv.cin, r, c, cv.k / 2, scratch_);
    lv.ch = cv.cout;
    lv.rows = r;
    lv.cols = c;
    lv.pre.resize(static_cast<std::size_t>(cv.cout) * r * c);
    conv_forward(scratch_.data(), cv.cin, r, c, params_.data() + cv.w, params_.data() + cv.b,
                 cv.cout, cv.k, lv.pre.data());
    silu(lv.pre, lv.act, lv.sg);
  };
  for (int l = 0; l < levels; ++l) {
    run_conv(enc_[l], cur, enc_out_[l]);
    avgpool2(enc_out_[l].act, enc_[l].cout, r, c, pooled_[l]);
    r /= 2;
    c /= 2;
    cur = pooled_[l].data();
  }
  run_conv(mid_, cur, mid_out_);
  const Level* below = &mid_out_;
  for (int l = levels - 1; l >= 0; --l) {
    const Level& skip = enc_out_[l];
    r = skip.rows;
    c = skip.cols;
    const std::size_t plane = static_cast<std::size_t>(r) * c;
    auto& in = dec_in_[l];
    in.resize(static_cast<std::size_t>(below->ch + skip.ch) * plane);
    upsample2(below->act, below->ch, below->rows, below->cols, in.data());
    std::copy(skip.act.begin(), skip.act.end(), in.begin() + below->ch * plane);
    run_conv(dec_[l], in.data(), dec_out_[l]);
    below = &dec_out_[l];
  }
  // 1x1 head.
  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  logits_full_.assign(plane, params_[head_.b]);
  for (int ch = 0; ch < below->ch; ++ch) {
    const Real wv = params_[head_.w + ch];
    const Real* a = below->act.data() + ch * plane;
#pragma omp simd
    for (std::size_t i = 0; i < plane; ++i) logits_full_[i] += wv * a[i];
  }
}

template <typename Real>
std::vector<Real> SegNet<Real>::forward(std::span<const Real> input, int channels, int rows,
                                        int cols) {
  check_input(input.size(), channels, rows, cols);
  run_forward(input, rows, cols);
  const int p = arch_.out_pool;
  const int orows = rows / p, ocols = cols / p;
  std::vector<Real> out(static_cast<std::size_t>(orows) * ocols);
  argmax_.resize(out.size());
  for (int y = 0; y < orows; ++y)
    for (int x = 0; x < ocols; ++x) {
      std::int32_t best = (y * p) * cols + x * p;
      for (int dy = 0; dy < p; ++dy)
        for (int dx = 0; dx < p; ++dx) {
          const std::int32_t i = (y * p + dy) * cols + x * p + dx;
          if (logits_full_[i] > logits_full_[best]) best = i;
        }
      argmax_[static_cast<std::size_t>(y) * ocols + x] = best;
      out[static_cast<std::size_t>(y) * ocols + x] = logits_full_[best];
    }
  return out;
}

template <typename Real>
double SegNet<Real>::loss_and_grad(std::span<const Real> input, int channels, int rows, int cols,
                                   std::span<const std::uint8_t> target, const LossSpec& spec,
                                   std::span<Real> grad) {
  if (grad.size() != params_.size())
    throw Error(ErrorCode::shape_mismatch, "gradient buffer does not match parameter count");
  const std::vector<Real> logits = forward(input, channels, rows, cols);
  std::vector<Real> g_out(logits.size());
  const double loss = wbce_from_logits<Real>(logits, target, spec, g_out);

  const std::size_t plane = static_cast<std::size_t>(rows) * cols;
  std::vector<Real> g_full(plane, Real(0));
  for (std::size_t i = 0; i < g_out.size(); ++i) g_full[argmax_[i]] += g_out[i];

  const Level& top = arch_.levels > 0 ? dec_out_[0] : mid_out_;
  std::vector<Real> g(top.act.size());
  Real gb = 0;
  for (std::size_t i = 0; i < plane; ++i) gb += g_full[i];
  grad[head_.b] += gb;
  for (int ch = 0; ch < top.ch; ++ch) {
    const Real wv = params_[head_.w + ch];
    const Real* a = top.act.data() + ch * plane;
    Real* gc = g.data() + ch * plane;
    Real acc = 0;
    for (std::size_t i = 0; i < plane; ++i) {
      acc += g_full[i] * a[i];
      gc[i] = wv * g_full[i];
    }
    grad[head_.w + ch] += acc;
  }

  std::vector<Real> g_in;
  auto conv_back = [&](const Conv& cv, const Real* in, const Level& lv,
                       std::vector<Real>& gact, bool need_input) {
    silu_backward(lv.pre, lv.sg, gact);
    pad_input(in, cv.cin, lv.rows, lv.cols, cv.k / 2, scratch_);
    g_in.assign(need_input ? static_cast<std::size_t>(cv.cin) * lv.rows * lv.cols : 0, Real(0));
    conv_backward(scratch_.data(), cv.cin, lv.rows, lv.cols, params_.data() + cv.w, cv.cout,
                  cv.k, gact.data(), grad.data() + cv.w, grad.data() + cv.b,
                  need_input ? g_in.data() : nullptr);
  };

  const int levels = arch_.levels;
  std::vector<std::vector<Real>> g_skip(levels);
  for (int l = 0; l < levels; ++l) {
    const Level& lv = dec_out_[l];
    conv_back(dec_[l], dec_in_[l].data(), lv, g, true);
    const std::size_t lplane = static_cast<std::size_t>(lv.rows) * lv.cols;
    const Level& below = l + 1 < levels ? dec_out_[l + 1] : mid_out_;
    g_skip[l].assign(g_in.begin() + below.ch * lplane, g_in.end());
    upsample2_backward(g_in.data(), below.ch, below.rows, below.cols, g);
  }
  if (levels == 0) {
    conv_back(mid_, input.data(), mid_out_, g, false);
    return loss;
  }
  conv_back(mid_, pooled_[levels - 1].data(), mid_out_, g, true);
  for (int l = levels - 1; l >= 0; --l) {
    const Level& lv = enc_out_[l];
    std::vector<Real>& ga = g_skip[l];
    avgpool2_backward(g_in, lv.ch, lv.rows, lv.cols, ga);
    if (l > 0) {
      conv_back(enc_[l], pooled_[l - 1].data(), lv, ga, true);
    } else {
      conv_back(enc_[0], input.data(), lv, ga, false);
    }
  }
  return loss;
}

template class SegNet<float>;
template class SegNet<double>;

}  // namespace firecast
