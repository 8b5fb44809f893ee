#pragma once

#include <cmath>
#include <vector>

#include "gazeguard/types.hpp"

namespace gazeguard {

// Daubechies-4 multi-level decomposition with soft thresholding at the
// universal threshold sigma_hat * sqrt(2 ln n). The noise level sigma_hat is
// the median absolute deviation of the finest-level detail coefficients
// divided by 0.6745.
struct WaveletConfig {
  int levels = 4;
};

struct WaveletDenoiseInfo {
  double sigma_hat_theta = 0.0;
  double sigma_hat_psi = 0.0;
  double threshold_theta = 0.0;
  double threshold_psi = 0.0;
};

inline double soft_threshold(double value, double threshold) {
  const double mag = std::abs(value) - threshold;
  return mag <= 0.0 ? 0.0 : (value < 0.0 ? -mag : mag);
}

// Denoises one channel. The signal is reflected at its end up to a multiple
// of 2^levels, transformed with periodic convolutions, thresholded, inverted
// and cropped. sigma_out, when given, receives the noise estimate.
std::vector<double> wavelet_denoise_channel(const std::vector<double>& signal,
                                            int levels,
                                            double* sigma_out = nullptr,
                                            double* threshold_out = nullptr);

// MAD-based noise estimate from the finest-level detail coefficients alone.
double estimate_noise_sigma(const std::vector<double>& signal);

// Both angle channels denoised independently; timestamps unchanged. Throws
// InsufficientData when the stream is shorter than 2^levels samples.
GazeStream wavelet_denoise(const GazeStream& stream,
                           const WaveletConfig& config = {},
                           WaveletDenoiseInfo* info = nullptr);

}  // namespace gazeguard
