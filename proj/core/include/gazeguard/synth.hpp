#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazeguard/types.hpp"

namespace gazeguard {

// Oculomotor parameters of one synthetic user. Profiles are stratified over
// an 8-bit code (7 index bits plus parity), so any two users differ on at
// least two parameter axes by at least 40% of the axis range.
struct SyntheticUserProfile {
  std::string user_id;
  int user_index = 0;
  double fixation_mu_log_s = 0.0;       // lognormal location, log-seconds
  double fixation_sigma_log_s = 0.0;    // lognormal scale
  double amplitude_shape = 0.0;         // gamma shape of saccade amplitude
  double amplitude_scale_deg = 0.0;     // gamma scale in degrees
  double main_seq_a_ms_per_deg = 0.0;   // duration_ms = a * amplitude + b
  double main_seq_b_ms = 0.0;
  double tremor_sigma_deg = 0.0;
  double drift_rate_deg_s = 0.0;
  int preferred_direction_bin = 0;      // 0..7, bins of 45 degrees
};

struct SyntheticDatasetSpec {
  int n_users = 10;
  int trials_per_user = 4;
  double trial_duration_s = 90.0;
  double rate_hz = 72.0;
  std::uint64_t master_seed = 0;

  void check() const;
};

inline constexpr int kMaxSyntheticUsers = 128;

// Deterministic per-user profile from (master_seed, user_index).
SyntheticUserProfile generate_profile(int user_index,
                                      std::uint64_t master_seed);

// One trial: alternating fixations (lognormal duration, tremor, linear
// drift) and saccades (gamma amplitude, biased direction, main-sequence
// duration, smoothstep trajectory) on a uniform rate_hz grid, clamped to
// +/-45 degrees. user_id and trial_id are left to the caller.
GazeStream generate_trial(const SyntheticUserProfile& profile,
                          double duration_s, double rate_hz,
                          std::uint64_t trial_seed);

// Full dataset: trials numbered from 1, trial seeds derived from
// (master_seed, user_index, trial_id).
std::vector<GazeStream> generate_dataset(const SyntheticDatasetSpec& spec);

}  // namespace gazeguard
