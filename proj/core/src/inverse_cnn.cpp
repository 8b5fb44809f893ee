#include "gazeguard/inverse_cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "gazeguard/errors.hpp"
#include "gazeguard/rng.hpp"
#include "gazeguard/stream_ops.hpp"

namespace gazeguard {

namespace {

constexpr int kLen = static_cast<int>(kSegmentLength);
constexpr int kArrays = InverseRegressor::kBlocks * 4;

std::array<const std::vector<double>*, kArrays> param_arrays(
    const InverseRegressor& m) {
  std::array<const std::vector<double>*, kArrays> arr{};
  for (int b = 0; b < InverseRegressor::kBlocks; ++b) {
    arr[b * 4 + 0] = &m.blocks[b].conv.weight;
    arr[b * 4 + 1] = &m.blocks[b].conv.bias;
    arr[b * 4 + 2] = &m.blocks[b].bn.gamma;
    arr[b * 4 + 3] = &m.blocks[b].bn.beta;
  }
  return arr;
}

std::array<std::vector<double>*, kArrays> param_arrays(InverseRegressor& m) {
  std::array<std::vector<double>*, kArrays> arr{};
  for (int b = 0; b < InverseRegressor::kBlocks; ++b) {
    arr[b * 4 + 0] = &m.blocks[b].conv.weight;
    arr[b * 4 + 1] = &m.blocks[b].conv.bias;
    arr[b * 4 + 2] = &m.blocks[b].bn.gamma;
    arr[b * 4 + 3] = &m.blocks[b].bn.beta;
  }
  return arr;
}

using GradArrays = std::array<std::vector<double>, kArrays>;

GradArrays make_grads(const InverseRegressor& m) {
  GradArrays g;
  const auto params = param_arrays(m);
  for (int i = 0; i < kArrays; ++i) g[i].assign(params[i]->size(), 0.0);
  return g;
}

void conv_forward(const double* x, double* z, const ConvLayer& c, int B) {
  const int P = c.kernel / 2;
  for (int b = 0; b < B; ++b) {
    for (int o = 0; o < c.out_ch; ++o) {
      double* zp = z + (static_cast<std::size_t>(b) * c.out_ch + o) * kLen;
      std::fill(zp, zp + kLen, c.bias[o]);
      for (int i = 0; i < c.in_ch; ++i) {
        const double* xp =
            x + (static_cast<std::size_t>(b) * c.in_ch + i) * kLen;
        const double* wp = &c.weight[(static_cast<std::size_t>(o) * c.in_ch + i) *
                                     c.kernel];
        for (int k = 0; k < c.kernel; ++k) {
          const int off = k - P;
          const int p0 = std::max(0, -off);
          const int p1 = std::min(kLen, kLen - off);
          const double w = wp[k];
          for (int p = p0; p < p1; ++p) zp[p] += w * xp[p + off];
        }
      }
    }
  }
}

// dz -> dx (transposed convolution) plus weight and bias gradients.
void conv_backward(const double* x, const double* dz, const ConvLayer& c,
                   int B, std::vector<double>& dw, std::vector<double>& db,
                   double* dx) {
  const int P = c.kernel / 2;
  for (int b = 0; b < B; ++b) {
    for (int o = 0; o < c.out_ch; ++o) {
      const double* dzp = dz + (static_cast<std::size_t>(b) * c.out_ch + o) * kLen;
      double bias_sum = 0.0;
      for (int p = 0; p < kLen; ++p) bias_sum += dzp[p];
      db[o] += bias_sum;
      for (int i = 0; i < c.in_ch; ++i) {
        const double* xp =
            x + (static_cast<std::size_t>(b) * c.in_ch + i) * kLen;
        double* dwp = &dw[(static_cast<std::size_t>(o) * c.in_ch + i) * c.kernel];
        for (int k = 0; k < c.kernel; ++k) {
          const int off = k - P;
          const int p0 = std::max(0, -off);
          const int p1 = std::min(kLen, kLen - off);
          double acc = 0.0;
          for (int p = p0; p < p1; ++p) acc += dzp[p] * xp[p + off];
          dwp[k] += acc;
        }
      }
    }
  }
  if (dx == nullptr) return;
  std::fill(dx, dx + static_cast<std::size_t>(B) * c.in_ch * kLen, 0.0);
  for (int b = 0; b < B; ++b) {
    for (int o = 0; o < c.out_ch; ++o) {
      const double* dzp = dz + (static_cast<std::size_t>(b) * c.out_ch + o) * kLen;
      for (int i = 0; i < c.in_ch; ++i) {
        double* dxp = dx + (static_cast<std::size_t>(b) * c.in_ch + i) * kLen;
        const double* wp = &c.weight[(static_cast<std::size_t>(o) * c.in_ch + i) *
                                     c.kernel];
        for (int k = 0; k < c.kernel; ++k) {
          const int off = P - k;
          const int p0 = std::max(0, -off);
          const int p1 = std::min(kLen, kLen - off);
          const double w = wp[k];
          for (int p = p0; p < p1; ++p) dxp[p] += w * dzp[p + off];
        }
      }
    }
  }
}

struct Activations {
  int B = 0;
  std::vector<double> input;
  std::array<std::vector<double>, InverseRegressor::kBlocks> xhat;
  std::array<std::vector<double>, InverseRegressor::kBlocks> act;
  std::array<std::vector<double>, InverseRegressor::kBlocks> invstd;
};

// Training-mode pass: batch statistics normalize, running statistics are
// optionally updated with the configured momentum.
void forward_train(InverseRegressor& m, const std::vector<double>& x, int B,
                   Activations& cache, bool update_running) {
  cache.B = B;
  cache.input = x;
  std::vector<double> z;
  const double* in = cache.input.data();
  for (int bi = 0; bi < InverseRegressor::kBlocks; ++bi) {
    auto& blk = m.blocks[bi];
    const int C = blk.conv.out_ch;
    const std::size_t total = static_cast<std::size_t>(B) * C * kLen;
    z.resize(total);
    conv_forward(in, z.data(), blk.conv, B);

    cache.xhat[bi].resize(total);
    cache.act[bi].resize(total);
    cache.invstd[bi].assign(C, 0.0);
    const double n = static_cast<double>(B) * kLen;
    for (int c = 0; c < C; ++c) {
      double sum = 0.0;
      for (int b = 0; b < B; ++b) {
        const double* zp = z.data() + (static_cast<std::size_t>(b) * C + c) * kLen;
        for (int p = 0; p < kLen; ++p) sum += zp[p];
      }
      const double mean = sum / n;
      double var = 0.0;
      for (int b = 0; b < B; ++b) {
        const double* zp = z.data() + (static_cast<std::size_t>(b) * C + c) * kLen;
        for (int p = 0; p < kLen; ++p) {
          const double d = zp[p] - mean;
          var += d * d;
        }
      }
      var /= n;
      const double invstd = 1.0 / std::sqrt(var + kBatchNormEps);
      cache.invstd[bi][c] = invstd;
      if (update_running) {
        blk.bn.running_mean[c] = (1.0 - kBatchNormMomentum) * blk.bn.running_mean[c] +
                                 kBatchNormMomentum * mean;
        blk.bn.running_var[c] = (1.0 - kBatchNormMomentum) * blk.bn.running_var[c] +
                                kBatchNormMomentum * var;
      }
      const double g = blk.bn.gamma[c];
      const double be = blk.bn.beta[c];
      for (int b = 0; b < B; ++b) {
        const std::size_t base = (static_cast<std::size_t>(b) * C + c) * kLen;
        const double* zp = z.data() + base;
        double* xh = cache.xhat[bi].data() + base;
        double* a = cache.act[bi].data() + base;
        for (int p = 0; p < kLen; ++p) {
          const double h = (zp[p] - mean) * invstd;
          xh[p] = h;
          a[p] = std::tanh(g * h + be);
        }
      }
    }
    in = cache.act[bi].data();
  }
}

// Inference pass with frozen running statistics.
std::vector<double> forward_eval(const InverseRegressor& m,
                                 const std::vector<double>& x, int B) {
  std::vector<double> cur = x;
  std::vector<double> z;
  for (int bi = 0; bi < InverseRegressor::kBlocks; ++bi) {
    const auto& blk = m.blocks[bi];
    const int C = blk.conv.out_ch;
    const std::size_t total = static_cast<std::size_t>(B) * C * kLen;
    z.resize(total);
    conv_forward(cur.data(), z.data(), blk.conv, B);
    cur.resize(total);
    for (int c = 0; c < C; ++c) {
      const double invstd = 1.0 / std::sqrt(blk.bn.running_var[c] + kBatchNormEps);
      const double mean = blk.bn.running_mean[c];
      const double g = blk.bn.gamma[c];
      const double be = blk.bn.beta[c];
      for (int b = 0; b < B; ++b) {
        const std::size_t base = (static_cast<std::size_t>(b) * C + c) * kLen;
        for (int p = 0; p < kLen; ++p) {
          cur[base + p] = std::tanh(g * (z[base + p] - mean) * invstd + be);
        }
      }
    }
  }
  return cur;
}

double mse_loss(const std::vector<double>& pred,
                const std::vector<double>& target) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

void backward(const InverseRegressor& m, const Activations& cache,
              const std::vector<double>& target, GradArrays& grads) {
  const int B = cache.B;
  const std::size_t out_total = cache.act[InverseRegressor::kBlocks - 1].size();

  std::vector<double> da(out_total);
  const std::vector<double>& out = cache.act[InverseRegressor::kBlocks - 1];
  const double scale = 2.0 / static_cast<double>(out_total);
  for (std::size_t i = 0; i < out_total; ++i) {
    da[i] = scale * (out[i] - target[i]);
  }

  std::vector<double> dz;
  std::vector<double> dx;
  for (int bi = InverseRegressor::kBlocks - 1; bi >= 0; --bi) {
    const auto& blk = m.blocks[bi];
    const int C = blk.conv.out_ch;
    const std::size_t total = static_cast<std::size_t>(B) * C * kLen;
    const double n = static_cast<double>(B) * kLen;

    // Through tanh: dy = da * (1 - a^2).
    std::vector<double>& dy = da;
    const double* a = cache.act[bi].data();
    for (std::size_t i = 0; i < total; ++i) dy[i] *= 1.0 - a[i] * a[i];

    // Through batch normalization with batch statistics.
    dz.resize(total);
    const double* xh = cache.xhat[bi].data();
    for (int c = 0; c < C; ++c) {
      double s0 = 0.0;
      double s1 = 0.0;
      for (int b = 0; b < B; ++b) {
        const std::size_t base = (static_cast<std::size_t>(b) * C + c) * kLen;
        for (int p = 0; p < kLen; ++p) {
          s0 += dy[base + p];
          s1 += dy[base + p] * xh[base + p];
        }
      }
      grads[bi * 4 + 2][c] += s1;
      grads[bi * 4 + 3][c] += s0;
      const double g = blk.bn.gamma[c];
      const double invstd = cache.invstd[bi][c];
      const double k0 = s0 / n;
      const double k1 = s1 / n;
      for (int b = 0; b < B; ++b) {
        const std::size_t base = (static_cast<std::size_t>(b) * C + c) * kLen;
        for (int p = 0; p < kLen; ++p) {
          dz[base + p] =
              g * invstd * (dy[base + p] - k0 - xh[base + p] * k1);
        }
      }
    }

    const double* block_input =
        bi == 0 ? cache.input.data() : cache.act[bi - 1].data();
    if (bi == 0) {
      conv_backward(block_input, dz.data(), blk.conv, B, grads[0], grads[1],
                    nullptr);
    } else {
      dx.resize(static_cast<std::size_t>(B) * blk.conv.in_ch * kLen);
      conv_backward(block_input, dz.data(), blk.conv, B, grads[bi * 4],
                    grads[bi * 4 + 1], dx.data());
      da.swap(dx);
    }
  }
}

void check_pair(const SegmentPair& pair, std::size_t index) {
  if (pair.first.theta.size() != kSegmentLength ||
      pair.first.psi.size() != kSegmentLength ||
      pair.second.theta.size() != kSegmentLength ||
      pair.second.psi.size() != kSegmentLength) {
    throw InvalidSegment("training pair " + std::to_string(index) +
                         " is not a pair of " +
                         std::to_string(kSegmentLength) + "-sample windows");
  }
}

// Channel-major [B][2][625] batch from standardized segments.
void fill_batch(std::vector<double>& x, int slot, const Segment& seg,
                const std::array<double, 2>& mean,
                const std::array<double, 2>& scale) {
  double* th = x.data() + static_cast<std::size_t>(slot) * 2 * kLen;
  double* ps = th + kLen;
  for (int p = 0; p < kLen; ++p) {
    th[p] = (seg.theta[p] - mean[0]) / scale[0];
    ps[p] = (seg.psi[p] - mean[1]) / scale[1];
  }
}

struct ChannelStats {
  std::array<double, 2> mean;
  std::array<double, 2> scale;
};

ChannelStats standardization_stats(const std::vector<SegmentPair>& pairs,
                                   bool of_targets) {
  double sum[2] = {0.0, 0.0};
  double sum_sq[2] = {0.0, 0.0};
  std::size_t n = 0;
  for (const SegmentPair& pair : pairs) {
    const Segment& seg = of_targets ? pair.second : pair.first;
    for (int p = 0; p < kLen; ++p) {
      sum[0] += seg.theta[p];
      sum_sq[0] += seg.theta[p] * seg.theta[p];
      sum[1] += seg.psi[p];
      sum_sq[1] += seg.psi[p] * seg.psi[p];
    }
    n += kSegmentLength;
  }
  ChannelStats stats;
  for (int c = 0; c < 2; ++c) {
    const double mean = sum[c] / static_cast<double>(n);
    const double var =
        std::max(0.0, sum_sq[c] / static_cast<double>(n) - mean * mean);
    const double sd = std::sqrt(var);
    stats.mean[c] = mean;
    stats.scale[c] = sd > 1e-12 ? 3.0 * sd : 1.0;
  }
  return stats;
}

}  // namespace

std::size_t InverseRegressor::parameter_count() const {
  std::size_t total = 0;
  for (const auto* arr : param_arrays(*this)) total += arr->size();
  return total;
}

InverseRegressor init_inverse_regressor(std::uint64_t seed) {
  InverseRegressor m;
  for (int b = 0; b < InverseRegressor::kBlocks; ++b) {
    auto& blk = m.blocks[b];
    blk.conv.in_ch = InverseRegressor::kChannels[b];
    blk.conv.out_ch = InverseRegressor::kChannels[b + 1];
    blk.conv.kernel = InverseRegressor::kKernel;
    const std::size_t n_weights = static_cast<std::size_t>(blk.conv.out_ch) *
                                  blk.conv.in_ch * blk.conv.kernel;
    blk.conv.weight.resize(n_weights);
    blk.conv.bias.assign(static_cast<std::size_t>(blk.conv.out_ch), 0.0);
    const double bound =
        1.0 / std::sqrt(static_cast<double>(blk.conv.in_ch) * blk.conv.kernel);
    Rng rng = Rng::substream(seed, std::string_view("inverse-init"),
                             static_cast<std::uint64_t>(b));
    for (double& w : blk.conv.weight) w = rng.uniform(-bound, bound);

    const int C = blk.conv.out_ch;
    blk.bn.channels = C;
    // Gamma starts at 0.5 so the normalized activations enter tanh in its
    // near-linear region; at 1.0 a third of them start saturated and the
    // stack trains noticeably slower.
    blk.bn.gamma.assign(static_cast<std::size_t>(C), 0.5);
    blk.bn.beta.assign(static_cast<std::size_t>(C), 0.0);
    blk.bn.running_mean.assign(static_cast<std::size_t>(C), 0.0);
    blk.bn.running_var.assign(static_cast<std::size_t>(C), 1.0);
  }
  return m;
}

InverseRegressor train_inverse_regressor(const std::vector<SegmentPair>& pairs,
                                         const TrainHyper& hyper) {
  if (pairs.size() < 32) {
    throw InsufficientData("training needs at least 32 window pairs, got " +
                           std::to_string(pairs.size()));
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) check_pair(pairs[i], i);

  InverseRegressor m = init_inverse_regressor(hyper.seed);
  m.hyper = hyper;
  const ChannelStats in_stats = standardization_stats(pairs, false);
  const ChannelStats tg_stats = standardization_stats(pairs, true);
  m.input_mean = in_stats.mean;
  m.input_scale = in_stats.scale;
  m.target_mean = tg_stats.mean;
  m.target_scale = tg_stats.scale;

  GradArrays adam_m = make_grads(m);
  GradArrays adam_v = make_grads(m);
  long step = 0;

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Activations cache;
  std::vector<double> x;
  std::vector<double> t;
  const auto params = param_arrays(m);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    Rng shuffle_rng = Rng::substream(hyper.seed, std::string_view("shuffle"),
                                     static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t epoch_samples = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(hyper.batch_size)) {
      const int B = static_cast<int>(
          std::min<std::size_t>(hyper.batch_size, order.size() - start));
      x.resize(static_cast<std::size_t>(B) * 2 * kLen);
      t.resize(static_cast<std::size_t>(B) * 2 * kLen);
      for (int s = 0; s < B; ++s) {
        const SegmentPair& pair = pairs[order[start + s]];
        fill_batch(x, s, pair.first, m.input_mean, m.input_scale);
        fill_batch(t, s, pair.second, m.target_mean, m.target_scale);
      }

      forward_train(m, x, B, cache, true);
      const double loss =
          mse_loss(cache.act[InverseRegressor::kBlocks - 1], t);
      if (!std::isfinite(loss)) {
        throw DivergenceError("training loss became non-finite at epoch " +
                              std::to_string(epoch));
      }
      epoch_loss += loss * B;
      epoch_samples += static_cast<std::size_t>(B);

      GradArrays grads = make_grads(m);
      backward(m, cache, t, grads);

      ++step;
      const double corr1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
      const double corr2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
      for (int ai = 0; ai < kArrays; ++ai) {
        std::vector<double>& p = *params[ai];
        for (std::size_t i = 0; i < p.size(); ++i) {
          const double g = grads[ai][i];
          adam_m[ai][i] = hyper.beta1 * adam_m[ai][i] + (1.0 - hyper.beta1) * g;
          adam_v[ai][i] =
              hyper.beta2 * adam_v[ai][i] + (1.0 - hyper.beta2) * g * g;
          const double mh = adam_m[ai][i] / corr1;
          const double vh = adam_v[ai][i] / corr2;
          p[i] -= hyper.learning_rate * mh / (std::sqrt(vh) + hyper.adam_eps);
        }
      }
    }
    epoch_loss /= static_cast<double>(epoch_samples);
    if (epoch == 0) m.initial_epoch_loss = epoch_loss;
    m.final_epoch_loss = epoch_loss;
  }

  m.trained = true;
  return m;
}

GazeStream apply_inverse(const InverseRegressor& model,
                         const GazeStream& stream) {
  if (!model.trained) {
    throw ModelNotTrained("apply_inverse needs a trained regressor");
  }
  if (stream.empty()) return stream;

  const double t0 = stream.samples.front().timestamp_s;
  bool on_grid = stream.nominal_rate_hz == kSegmentRateHz;
  if (on_grid) {
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const double expected = t0 + static_cast<double>(i) / kSegmentRateHz;
      if (std::abs(stream.samples[i].timestamp_s - expected) > 1e-9) {
        on_grid = false;
        break;
      }
    }
  }
  const GazeStream grid =
      on_grid ? stream : resample_linear(stream, kSegmentRateHz);

  const std::size_t n = grid.size();
  const int windows =
      static_cast<int>((n + kSegmentLength - 1) / kSegmentLength);
  std::vector<double> x(static_cast<std::size_t>(windows) * 2 * kLen, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w = i / kSegmentLength;
    const std::size_t p = i % kSegmentLength;
    const std::size_t base = w * 2 * kLen;
    x[base + p] =
        (grid.samples[i].theta_deg - model.input_mean[0]) / model.input_scale[0];
    x[base + kLen + p] =
        (grid.samples[i].psi_deg - model.input_mean[1]) / model.input_scale[1];
  }

  const std::vector<double> out = forward_eval(model, x, windows);

  GazeStream mapped = grid;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t w = i / kSegmentLength;
    const std::size_t p = i % kSegmentLength;
    const std::size_t base = w * 2 * kLen;
    mapped.samples[i].theta_deg =
        out[base + p] * model.target_scale[0] + model.target_mean[0];
    mapped.samples[i].psi_deg =
        out[base + kLen + p] * model.target_scale[1] + model.target_mean[1];
  }
  if (on_grid) return mapped;

  // Interpolate the processed 125 Hz series back onto the original
  // timestamps so the output matches the input frame for frame.
  GazeStream result = stream;
  std::size_t hi = 1;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const double t = stream.samples[i].timestamp_s;
    while (hi + 1 < mapped.size() && mapped.samples[hi].timestamp_s < t) ++hi;
    const GazeSample& a = mapped.samples[hi - 1];
    const GazeSample& b = mapped.samples[hi];
    if (t <= a.timestamp_s) {
      result.samples[i].theta_deg = a.theta_deg;
      result.samples[i].psi_deg = a.psi_deg;
    } else if (t >= b.timestamp_s) {
      result.samples[i].theta_deg = b.theta_deg;
      result.samples[i].psi_deg = b.psi_deg;
    } else {
      const double u = (t - a.timestamp_s) / (b.timestamp_s - a.timestamp_s);
      result.samples[i].theta_deg =
          a.theta_deg + u * (b.theta_deg - a.theta_deg);
      result.samples[i].psi_deg = a.psi_deg + u * (b.psi_deg - a.psi_deg);
    }
  }
  return result;
}

double regressor_grad_check(const InverseRegressor& model,
                            const SegmentPair& probe, int n_params,
                            std::uint64_t seed) {
  check_pair(probe, 0);
  InverseRegressor m = model;

  std::vector<double> x(2 * kLen);
  std::vector<double> t(2 * kLen);
  fill_batch(x, 0, probe.first, m.input_mean, m.input_scale);
  fill_batch(t, 0, probe.second, m.target_mean, m.target_scale);

  Activations cache;
  forward_train(m, x, 1, cache, false);
  GradArrays grads = make_grads(m);
  backward(m, cache, t, grads);

  const auto params = param_arrays(m);
  std::size_t total = 0;
  for (const auto* arr : params) total += arr->size();

  Rng rng(seed);
  std::set<std::size_t> chosen;
  while (chosen.size() < static_cast<std::size_t>(n_params) &&
         chosen.size() < total) {
    chosen.insert(rng.uniform_index(total));
  }

  const double h = 1e-4;
  double max_rel = 0.0;
  for (std::size_t flat : chosen) {
    std::size_t ai = 0;
    std::size_t off = flat;
    while (off >= params[ai]->size()) {
      off -= params[ai]->size();
      ++ai;
    }
    double& p = (*params[ai])[off];
    const double saved = p;

    p = saved + h;
    forward_train(m, x, 1, cache, false);
    const double lp = mse_loss(cache.act[InverseRegressor::kBlocks - 1], t);
    p = saved - h;
    forward_train(m, x, 1, cache, false);
    const double lm = mse_loss(cache.act[InverseRegressor::kBlocks - 1], t);
    p = saved;

    const double numeric = (lp - lm) / (2.0 * h);
    const double analytic = grads[ai][off];
    const double denom =
        std::max({std::abs(numeric), std::abs(analytic), 1e-5});
    max_rel = std::max(max_rel, std::abs(numeric - analytic) / denom);
  }
  return max_rel;
}

namespace {

// Serialization order: per block conv.weight, conv.bias, bn.gamma, bn.beta,
// bn.running_mean, bn.running_var; then the four standardization pairs.
std::vector<const std::vector<double>*> blob_arrays(const InverseRegressor& m) {
  std::vector<const std::vector<double>*> arrays;
  for (const auto& blk : m.blocks) {
    arrays.push_back(&blk.conv.weight);
    arrays.push_back(&blk.conv.bias);
    arrays.push_back(&blk.bn.gamma);
    arrays.push_back(&blk.bn.beta);
    arrays.push_back(&blk.bn.running_mean);
    arrays.push_back(&blk.bn.running_var);
  }
  return arrays;
}

std::vector<std::vector<double>*> blob_arrays(InverseRegressor& m) {
  std::vector<std::vector<double>*> arrays;
  for (auto& blk : m.blocks) {
    arrays.push_back(&blk.conv.weight);
    arrays.push_back(&blk.conv.bias);
    arrays.push_back(&blk.bn.gamma);
    arrays.push_back(&blk.bn.beta);
    arrays.push_back(&blk.bn.running_mean);
    arrays.push_back(&blk.bn.running_var);
  }
  return arrays;
}

}  // namespace

void save_regressor(const InverseRegressor& model, const std::string& path) {
  std::vector<double> blob;
  for (const auto* arr : blob_arrays(model)) {
    blob.insert(blob.end(), arr->begin(), arr->end());
  }
  for (const auto& stats : {model.input_mean, model.input_scale,
                            model.target_mean, model.target_scale}) {
    blob.push_back(stats[0]);
    blob.push_back(stats[1]);
  }

  std::ofstream bin(path, std::ios::binary);
  if (!bin) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  bin.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(double)));
  if (!bin) {
    throw IoError("failed writing '" + path + "'");
  }

  nlohmann::json j;
  j["format"] = "gazeguard-inverse-regressor";
  j["version"] = 1;
  j["channels"] = InverseRegressor::kChannels;
  j["kernel"] = InverseRegressor::kKernel;
  j["blocks"] = InverseRegressor::kBlocks;
  j["doubles"] = blob.size();
  j["byte_order"] = "little";
  j["trained"] = model.trained;
  j["initial_epoch_loss"] = model.initial_epoch_loss;
  j["final_epoch_loss"] = model.final_epoch_loss;
  j["hyper"] = {{"epochs", model.hyper.epochs},
                {"batch_size", model.hyper.batch_size},
                {"learning_rate", model.hyper.learning_rate},
                {"beta1", model.hyper.beta1},
                {"beta2", model.hyper.beta2},
                {"adam_eps", model.hyper.adam_eps},
                {"seed", model.hyper.seed}};
  std::ofstream sidecar(path + ".json");
  if (!sidecar) {
    throw IoError("cannot open '" + path + ".json' for writing");
  }
  sidecar << j.dump(2) << "\n";
  if (!sidecar) {
    throw IoError("failed writing '" + path + ".json'");
  }
}

InverseRegressor load_regressor(const std::string& path) {
  std::ifstream sidecar(path + ".json");
  if (!sidecar) {
    throw IoError("cannot open '" + path + ".json'");
  }
  nlohmann::json j;
  try {
    sidecar >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("regressor sidecar is not valid JSON: ") +
                     e.what());
  }
  if (j.value("format", "") != "gazeguard-inverse-regressor") {
    throw SchemaError("'" + path + ".json' is not a regressor sidecar");
  }
  if (j.value("kernel", 0) != InverseRegressor::kKernel ||
      j.value("blocks", 0) != InverseRegressor::kBlocks ||
      j.value("channels", std::vector<int>{}) !=
          std::vector<int>(InverseRegressor::kChannels.begin(),
                           InverseRegressor::kChannels.end())) {
    throw SchemaError("regressor architecture in sidecar does not match");
  }

  InverseRegressor m = init_inverse_regressor(0);
  m.trained = j.value("trained", false);
  m.initial_epoch_loss = j.value("initial_epoch_loss", 0.0);
  m.final_epoch_loss = j.value("final_epoch_loss", 0.0);
  if (j.contains("hyper") && j["hyper"].is_object()) {
    const auto& h = j["hyper"];
    m.hyper.epochs = h.value("epochs", m.hyper.epochs);
    m.hyper.batch_size = h.value("batch_size", m.hyper.batch_size);
    m.hyper.learning_rate = h.value("learning_rate", m.hyper.learning_rate);
    m.hyper.beta1 = h.value("beta1", m.hyper.beta1);
    m.hyper.beta2 = h.value("beta2", m.hyper.beta2);
    m.hyper.adam_eps = h.value("adam_eps", m.hyper.adam_eps);
    m.hyper.seed = h.value("seed", m.hyper.seed);
  }

  std::size_t expected = 8;
  for (const auto* arr : blob_arrays(m)) expected += arr->size();
  if (j.value("doubles", std::size_t{0}) != expected) {
    throw SchemaError("regressor sidecar declares " +
                      std::to_string(j.value("doubles", std::size_t{0})) +
                      " doubles, architecture needs " +
                      std::to_string(expected));
  }

  std::ifstream bin(path, std::ios::binary);
  if (!bin) {
    throw IoError("cannot open '" + path + "'");
  }
  std::vector<double> blob(expected);
  bin.read(reinterpret_cast<char*>(blob.data()),
           static_cast<std::streamsize>(expected * sizeof(double)));
  if (static_cast<std::size_t>(bin.gcount()) != expected * sizeof(double)) {
    throw ParseError("'" + path + "' is shorter than the sidecar declares");
  }

  std::size_t off = 0;
  for (auto* arr : blob_arrays(m)) {
    std::copy(blob.begin() + static_cast<std::ptrdiff_t>(off),
              blob.begin() + static_cast<std::ptrdiff_t>(off + arr->size()),
              arr->begin());
    off += arr->size();
  }
  for (auto* stats : {&m.input_mean, &m.input_scale, &m.target_mean,
                      &m.target_scale}) {
    (*stats)[0] = blob[off++];
    (*stats)[1] = blob[off++];
  }
  return m;
}

}  // namespace gazeguard
