#include "gazeguard/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "gazeguard/errors.hpp"

namespace gazeguard {

namespace {

// Daubechies-4 analysis filters; the highpass is the quadrature mirror
// g_k = (-1)^k h_{3-k}.
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kNorm = 5.656854249492381;  // 4 * sqrt(2)
constexpr double kH[4] = {(1.0 + kSqrt3) / kNorm, (3.0 + kSqrt3) / kNorm,
                          (3.0 - kSqrt3) / kNorm, (1.0 - kSqrt3) / kNorm};
constexpr double kG[4] = {kH[3], -kH[2], kH[1], -kH[0]};

// One periodized analysis step: x (even length) -> approx, detail.
void dwt_step(const std::vector<double>& x, std::vector<double>& approx,
              std::vector<double>& detail) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  approx.resize(half);
  detail.resize(half);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double v = x[(2 * i + k) % n];
      a += kH[k] * v;
      d += kG[k] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

// Inverse of dwt_step (transpose of the orthogonal analysis operator).
void idwt_step(const std::vector<double>& approx,
               const std::vector<double>& detail, std::vector<double>& x) {
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  x.assign(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      x[(2 * i + k) % n] += kH[k] * approx[i] + kG[k] * detail[i];
    }
  }
}

double median_inplace(std::vector<double>& x) {
  const std::size_t n = x.size();
  const std::size_t mid = n / 2;
  std::nth_element(x.begin(), x.begin() + mid, x.end());
  double hi = x[mid];
  if (n % 2 == 1) return hi;
  std::nth_element(x.begin(), x.begin() + mid - 1, x.begin() + mid);
  return (x[mid - 1] + hi) / 2.0;
}

double mad_sigma(const std::vector<double>& detail) {
  std::vector<double> work = detail;
  const double med = median_inplace(work);
  for (double& v : work) v = std::abs(v - med);
  return median_inplace(work) / 0.6745;
}

// Reflect the tail so the length reaches a multiple of 2^levels.
std::vector<double> pad_reflect(const std::vector<double>& x,
                                std::size_t block) {
  const std::size_t n = x.size();
  const std::size_t padded = (n + block - 1) / block * block;
  std::vector<double> out = x;
  out.resize(padded);
  for (std::size_t j = n; j < padded; ++j) {
    out[j] = x[2 * n - 2 - j];
  }
  return out;
}

}  // namespace

std::vector<double> wavelet_denoise_channel(const std::vector<double>& signal,
                                            int levels, double* sigma_out,
                                            double* threshold_out) {
  if (levels < 1) {
    throw InvalidParameter("wavelet levels must be >= 1");
  }
  const std::size_t block = static_cast<std::size_t>(1) << levels;
  if (signal.size() < block) {
    throw InsufficientData("wavelet denoising needs at least " +
                           std::to_string(block) + " samples, got " +
                           std::to_string(signal.size()));
  }

  std::vector<double> approx = pad_reflect(signal, block);
  std::vector<std::vector<double>> details(static_cast<std::size_t>(levels));
  std::vector<double> next;
  for (int lv = 0; lv < levels; ++lv) {
    dwt_step(approx, next, details[static_cast<std::size_t>(lv)]);
    approx.swap(next);
  }

  const double sigma = mad_sigma(details[0]);
  const double threshold =
      sigma * std::sqrt(2.0 * std::log(static_cast<double>(signal.size())));
  if (sigma_out != nullptr) *sigma_out = sigma;
  if (threshold_out != nullptr) *threshold_out = threshold;

  for (std::vector<double>& level : details) {
    for (double& v : level) v = soft_threshold(v, threshold);
  }

  for (int lv = levels - 1; lv >= 0; --lv) {
    idwt_step(approx, details[static_cast<std::size_t>(lv)], next);
    approx.swap(next);
  }
  approx.resize(signal.size());
  return approx;
}

double estimate_noise_sigma(const std::vector<double>& signal) {
  if (signal.size() < 2) {
    throw InsufficientData("noise estimation needs at least 2 samples");
  }
  std::vector<double> padded =
      signal.size() % 2 == 0 ? signal : pad_reflect(signal, 2);
  std::vector<double> approx;
  std::vector<double> detail;
  dwt_step(padded, approx, detail);
  return mad_sigma(detail);
}

GazeStream wavelet_denoise(const GazeStream& stream,
                           const WaveletConfig& config,
                           WaveletDenoiseInfo* info) {
  std::vector<double> theta(stream.size());
  std::vector<double> psi(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    theta[i] = stream.samples[i].theta_deg;
    psi[i] = stream.samples[i].psi_deg;
  }

  WaveletDenoiseInfo local;
  theta = wavelet_denoise_channel(theta, config.levels, &local.sigma_hat_theta,
                                  &local.threshold_theta);
  psi = wavelet_denoise_channel(psi, config.levels, &local.sigma_hat_psi,
                                &local.threshold_psi);
  if (info != nullptr) *info = local;

  GazeStream out = stream;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.samples[i].theta_deg = theta[i];
    out.samples[i].psi_deg = psi[i];
  }
  return out;
}

}  // namespace gazeguard
