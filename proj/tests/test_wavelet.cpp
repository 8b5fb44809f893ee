#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <gazeguard/errors.hpp>
#include <gazeguard/rng.hpp>
#include <gazeguard/types.hpp>
#include <gazeguard/wavelet.hpp>
#include <vector>

using namespace gazeguard;

namespace {

GazeStream make_stream(const std::vector<double>& theta,
                       const std::vector<double>& psi, double rate_hz) {
  GazeStream s;
  s.nominal_rate_hz = rate_hz;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    s.samples.push_back({theta[i], psi[i], static_cast<double>(i) / rate_hz});
  }
  return s;
}

double mse(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += (a[i] - b[i]) * (a[i] - b[i]);
  }
  return acc / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("constant signal passes through unchanged") {
  const std::vector<double> flat(512, 7.25);
  const std::vector<double> out = wavelet_denoise_channel(flat, 4);
  REQUIRE(out.size() == flat.size());
  for (double v : out) CHECK(v == doctest::Approx(7.25).epsilon(1e-6));
}

TEST_CASE("noise sigma estimate recovers the generating sigma") {
  Rng rng(11);
  std::vector<double> noise(4096);
  for (double& v : noise) v = 3.0 * rng.normal();
  CHECK(estimate_noise_sigma(noise) == doctest::Approx(3.0).epsilon(0.1));

  GazeStream s = make_stream(noise, noise, 125.0);
  WaveletDenoiseInfo info;
  wavelet_denoise(s, {}, &info);
  CHECK(info.sigma_hat_theta == doctest::Approx(3.0).epsilon(0.1));
  CHECK(info.sigma_hat_psi == info.sigma_hat_theta);
  CHECK(info.threshold_theta ==
        doctest::Approx(info.sigma_hat_theta *
                        std::sqrt(2.0 * std::log(4096.0))));
}

TEST_CASE("denoising cuts the error to a clean sinusoid by at least half") {
  Rng rng(5);
  const std::size_t n = 4096;
  std::vector<double> clean(n);
  std::vector<double> noisy(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / 125.0;
    clean[i] = 10.0 * std::sin(2.0 * std::numbers::pi * t);
    noisy[i] = clean[i] + 3.0 * rng.normal();
  }
  const std::vector<double> out = wavelet_denoise_channel(noisy, 4);
  REQUIRE(out.size() == n);
  CHECK(mse(out, clean) < 0.5 * mse(noisy, clean));
}

TEST_CASE("stream denoise keeps length, timestamps and metadata") {
  Rng rng(17);
  std::vector<double> theta(700);
  std::vector<double> psi(700);
  for (std::size_t i = 0; i < 700; ++i) {
    theta[i] = rng.normal();
    psi[i] = 2.0 + rng.normal();
  }
  GazeStream s = make_stream(theta, psi, 125.0);
  s.user_id = "u3";
  s.trial_id = 2;
  const GazeStream out = wavelet_denoise(s);
  REQUIRE(out.size() == s.size());
  CHECK(out.user_id == "u3");
  CHECK(out.trial_id == 2);
  CHECK(out.nominal_rate_hz == s.nominal_rate_hz);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.samples[i].timestamp_s == s.samples[i].timestamp_s);
  }
}

TEST_CASE("channels are denoised independently") {
  Rng rng(23);
  std::vector<double> theta(512, 0.0);
  std::vector<double> psi(512);
  for (double& v : psi) v = 5.0 * rng.normal();
  const GazeStream out = wavelet_denoise(make_stream(theta, psi, 125.0));
  for (const GazeSample& sm : out.samples) {
    CHECK(sm.theta_deg == doctest::Approx(0.0).scale(1e-9));
  }
}

TEST_CASE("streams shorter than one transform block are rejected") {
  std::vector<double> tiny(10, 1.0);
  CHECK_THROWS_AS(wavelet_denoise(make_stream(tiny, tiny, 125.0)),
                  InsufficientData);
  WaveletConfig cfg;
  cfg.levels = 3;
  CHECK_THROWS_AS(wavelet_denoise(make_stream({1.0}, {1.0}, 125.0), cfg),
                  InsufficientData);
}

TEST_CASE("soft threshold closed forms") {
  CHECK(soft_threshold(5.0, 2.0) == 3.0);
  CHECK(soft_threshold(-5.0, 2.0) == -3.0);
  CHECK(soft_threshold(1.5, 2.0) == 0.0);
  CHECK(soft_threshold(-1.5, 2.0) == 0.0);
  CHECK(soft_threshold(0.0, 2.0) == 0.0);
}
