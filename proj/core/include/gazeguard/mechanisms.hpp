#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gazeguard/rng.hpp"
#include "gazeguard/types.hpp"

namespace gazeguard {

enum class MechanismKind { None, Gaussian, Temporal, Spatial, Smoothing };

MechanismKind mechanism_kind_from_name(std::string_view name);
std::string mechanism_kind_name(MechanismKind kind);

// Tagged mechanism selection. Only the field matching `kind` is meaningful;
// `seed` feeds the per-stream noise substreams of stochastic mechanisms.
struct MechanismConfig {
  MechanismKind kind = MechanismKind::None;
  double sigma_deg = 0.0;
  int k = 1;
  int l = 1;
  int b = 1;
  std::uint64_t seed = 0;
  // Pre-fill the smoothing window with the first raw sample instead of
  // zeros, trading formula fidelity for no warm-up bias. Off by default.
  bool smoothing_seed_first = false;

  static MechanismConfig none();
  static MechanismConfig gaussian(double sigma_deg, std::uint64_t seed = 0);
  static MechanismConfig temporal(int k);
  static MechanismConfig spatial(int l);
  static MechanismConfig smoothing(int b);

  // Throws InvalidParameter for out-of-domain values; returns warnings for
  // strengths beyond the studied sweep bounds (sigma > 20, k > 30, l > 256,
  // b > 300).
  std::vector<std::string> check() const;

  // Sweep-axis value: sigma, k, l, or b depending on kind; 0 for None.
  double strength() const;
  MechanismConfig with_strength(double value) const;

  // Human-readable tag, e.g. "gaussian(sigma=3)".
  std::string label() const;
};

// Low/high strength anchors. level is "low" or "high"; temporal has no
// preset and throws InvalidParameter.
MechanismConfig mechanism_preset(MechanismKind kind, std::string_view level);

// JSON object {"mechanism": "gaussian"|"temporal"|"spatial"|"smoothing"|
// "none", "sigma"|"k"|"l"|"b": number, "seed": integer}.
std::string mechanism_to_json(const MechanismConfig& config);
MechanismConfig mechanism_from_json(const std::string& text);

// Quantization grid: 2160 base points over a 180 degree field of view,
// thinned by a factor l. m = 2160/l stays real-valued so delta = l/12
// degrees exactly even when l does not divide 2160.
struct SpatialGrid {
  static constexpr double kBasePoints = 2160.0;
  static constexpr double kFovDeg = 180.0;

  int l = 1;
  double m = kBasePoints;
  double delta_deg = kFovDeg / kBasePoints;

  explicit SpatialGrid(int l_factor);
};

// Sliding window of the b most recent raw samples, zero-initialized, with
// weights 1 (oldest) through b (newest) and normalizer d = b(b+1)/2.
struct SmoothingState {
  explicit SmoothingState(int b_window, bool seed_with_first = false);

  int b;
  double d;
  std::vector<double> theta;
  std::vector<double> psi;
  std::size_t head = 0;  // position of the oldest entry
  bool seed_with_first;
  bool primed = false;

  void push(double theta_deg, double psi_deg);
  // Weighted average over the current window, componentwise.
  GazeSample average(double timestamp_s) const;
};

struct TemporalState {
  std::uint64_t frame_counter = 0;
  double last_theta_deg = 0.0;
  double last_psi_deg = 0.0;
};

GazeSample apply_gaussian(const GazeSample& sample, double sigma_deg, Rng& rng);
GazeSample apply_temporal(const GazeSample& sample, int k, TemporalState& state);
GazeSample apply_spatial(const GazeSample& sample, const SpatialGrid& grid);
GazeSample apply_smoothing(const GazeSample& sample, SmoothingState& state);

// Per-frame application in timestamp order with fresh per-stream state.
// Noise substreams derive from (master_seed, user_id, trial_id), so results
// do not depend on the order streams are processed in.
GazeStream privatize_stream(const GazeStream& stream,
                            const MechanismConfig& config,
                            std::uint64_t master_seed);

inline GazeStream privatize_stream(const GazeStream& stream,
                                   const MechanismConfig& config) {
  return privatize_stream(stream, config, config.seed);
}

struct BenchReport {
  std::string mechanism;
  std::size_t n_samples = 0;
  double ns_per_sample = 0.0;
  double samples_per_second = 0.0;
};

// Steady-state per-sample wall time over a synthetic stream, excluding a
// warm-up prefix. n_samples must be at least 10^4.
BenchReport bench_mechanism(const MechanismConfig& config,
                            std::size_t n_samples);

}  // namespace gazeguard
