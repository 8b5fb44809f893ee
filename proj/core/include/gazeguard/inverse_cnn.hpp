#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gazeguard/types.hpp"

namespace gazeguard {

// 1-D convolution with stride 1 and zero same-padding. Weights are laid out
// [out_channel][in_channel][tap].
struct ConvLayer {
  int in_ch = 0;
  int out_ch = 0;
  int kernel = 0;
  std::vector<double> weight;
  std::vector<double> bias;
};

struct BatchNormLayer {
  int channels = 0;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
};

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.1;

struct TrainHyper {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
};

// Learned inverse of a privatization mechanism over 5 s windows: four
// [conv(9), batch norm, tanh] blocks with channels 2-16-16-16-2, operating
// on per-channel standardized angles (x - mean) / (3 std) so targets sit
// inside the tanh range.
struct InverseRegressor {
  static constexpr int kBlocks = 4;
  static constexpr int kKernel = 9;
  static constexpr std::array<int, 5> kChannels = {2, 16, 16, 16, 2};

  struct Block {
    ConvLayer conv;
    BatchNormLayer bn;
  };

  std::array<Block, kBlocks> blocks;
  std::array<double, 2> input_mean = {0.0, 0.0};
  std::array<double, 2> input_scale = {1.0, 1.0};
  std::array<double, 2> target_mean = {0.0, 0.0};
  std::array<double, 2> target_scale = {1.0, 1.0};
  bool trained = false;
  double initial_epoch_loss = 0.0;
  double final_epoch_loss = 0.0;
  TrainHyper hyper;

  std::size_t parameter_count() const;
};

InverseRegressor init_inverse_regressor(std::uint64_t seed);

// (privatized input, original target) window pairs.
using SegmentPair = std::pair<Segment, Segment>;

// Mini-batch MSE training with Adam-style adaptive moments. Deterministic
// for a fixed hyper.seed. Needs at least 32 pairs; a non-finite loss raises
// DivergenceError naming the epoch.
InverseRegressor train_inverse_regressor(const std::vector<SegmentPair>& pairs,
                                         const TrainHyper& hyper = {});

// Maps a stream through the network over consecutive non-overlapping 5 s
// windows at 125 Hz, zero-padding the tail and cropping afterwards. Streams
// not on the 125 Hz grid are resampled through it and interpolated back onto
// their own timestamps, so output timestamps always equal input timestamps.
GazeStream apply_inverse(const InverseRegressor& model,
                         const GazeStream& stream);

// Compares analytic gradients of the training loss on one probe pair against
// central finite differences (step 1e-4) at n_params randomly chosen
// parameters; returns the largest relative error.
double regressor_grad_check(const InverseRegressor& model,
                            const SegmentPair& probe, int n_params = 100,
                            std::uint64_t seed = 7);

// Flat little-endian float64 parameter blob at `path` plus a JSON sidecar at
// `path`.json describing shapes and training provenance.
void save_regressor(const InverseRegressor& model, const std::string& path);
InverseRegressor load_regressor(const std::string& path);

}  // namespace gazeguard
