#include "gazeguard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "gazeguard/errors.hpp"
#include "gazeguard/rng.hpp"

namespace gazeguard {

namespace {

constexpr double kClampDeg = 45.0;
constexpr double kTargetBoundDeg = 40.0;
constexpr double kMinSaccadeDeg = 0.5;
// Small amplitudes keep the held-sample jumps that temporal downsampling
// produces on the same accel/jerk scale as genuine saccades, so downsampled
// records still resemble the raw reference distribution.
constexpr double kMaxSaccadeDeg = 8.0;
// Tremor is an Ornstein-Uhlenbeck process rather than white noise, so its
// stationary amplitude stays on the profile axis while per-sample speeds
// stay below the 20 deg/s I-VT threshold; identification then keys on
// saccade structure, which temporal downsampling preserves but strong
// spatial or Gaussian privatization destroys.
constexpr double kTremorRho = 0.88;

struct AxisRange {
  double lo;
  double hi;
};

// Coded parameter axes, one per code bit. Low-order bits carry the axes
// whose embedding signature survives heavy temporal downsampling (amplitude
// scale, saccade rate), because small datasets only exercise low bits;
// main-sequence timing, which downsampling erases, sits on high bits.
constexpr AxisRange kAxes[8] = {
    {1.2, 2.6},     // bit 0: amplitude gamma scale
    {1.2, 2.2},     // bit 1: amplitude gamma shape
    {0.2, 0.55},    // bit 2: fixation lognormal sigma
    {-1.55, -0.75}, // bit 3: fixation lognormal mu (0.21 s .. 0.47 s)
    {0.06, 0.16},   // bit 4: tremor sigma
    {2.0, 2.7},     // bit 5: main-sequence slope a
    {20.0, 30.0},   // bit 6: main-sequence intercept b
    {0.0, 0.5},     // parity bit: drift rate
};

// Code bit 0 lands the parameter in [0.05, 0.30] of the axis range, bit 1 in
// [0.70, 0.95]; same-axis values for different bits always differ by at
// least 40% of the range.
double coded_draw(const AxisRange& axis, int bit, Rng& rng) {
  const double center = bit == 0 ? 0.175 : 0.825;
  const double u = center + rng.uniform(-0.125, 0.125);
  return axis.lo + u * (axis.hi - axis.lo);
}

double draw_gamma(Rng& rng, double shape, double scale) {
  if (shape < 1.0) {
    const double g = draw_gamma(rng, shape + 1.0, 1.0);
    double u;
    do {
      u = rng.uniform();
    } while (u <= 0.0);
    return g * std::pow(u, 1.0 / shape) * scale;
  }
  // Marsaglia-Tsang squeeze method.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (u > 0.0 &&
        std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v * scale;
    }
  }
}

int draw_direction_bin(Rng& rng, int preferred) {
  // Preferred bin 0.55, its neighbors 0.11 each, opposite 0.05, rest 0.06.
  double weights[8];
  for (int j = 0; j < 8; ++j) weights[j] = 0.06;
  weights[preferred] = 0.55;
  weights[(preferred + 1) % 8] = 0.11;
  weights[(preferred + 7) % 8] = 0.11;
  weights[(preferred + 4) % 8] = 0.05;
  double u = rng.uniform();
  for (int j = 0; j < 8; ++j) {
    if (u < weights[j]) return j;
    u -= weights[j];
  }
  return 7;
}

}  // namespace

void SyntheticDatasetSpec::check() const {
  if (n_users < 2) {
    throw InvalidParameter("synthetic dataset needs at least 2 users");
  }
  if (n_users > kMaxSyntheticUsers) {
    throw InvalidParameter("profile stratification supports at most " +
                           std::to_string(kMaxSyntheticUsers) + " users");
  }
  if (trials_per_user < 2) {
    throw InvalidParameter("synthetic dataset needs at least 2 trials per user");
  }
  if (trial_duration_s < 5.0) {
    throw InvalidParameter("trial duration must be at least 5 s");
  }
  if (rate_hz <= 0.0) {
    throw InvalidParameter("sample rate must be positive");
  }
}

SyntheticUserProfile generate_profile(int user_index,
                                      std::uint64_t master_seed) {
  if (user_index < 0 || user_index >= kMaxSyntheticUsers) {
    throw InvalidParameter("user index " + std::to_string(user_index) +
                           " outside [0, " +
                           std::to_string(kMaxSyntheticUsers - 1) + "]");
  }
  Rng rng = Rng::substream(master_seed, std::string_view("profile"),
                           static_cast<std::uint64_t>(user_index));

  // 7 index bits plus a parity bit: distinct users differ in >= 2 bits.
  int bits[8];
  int parity = 0;
  for (int j = 0; j < 7; ++j) {
    bits[j] = (user_index >> j) & 1;
    parity ^= bits[j];
  }
  bits[7] = parity;

  double params[8];
  for (int j = 0; j < 8; ++j) params[j] = coded_draw(kAxes[j], bits[j], rng);

  SyntheticUserProfile p;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "user%03d", user_index);
  p.user_id = buf;
  p.user_index = user_index;
  p.amplitude_scale_deg = params[0];
  p.amplitude_shape = params[1];
  p.fixation_sigma_log_s = params[2];
  p.fixation_mu_log_s = params[3];
  p.tremor_sigma_deg = params[4];
  p.main_seq_a_ms_per_deg = params[5];
  p.main_seq_b_ms = params[6];
  p.drift_rate_deg_s = params[7];
  p.preferred_direction_bin = user_index % 8;
  return p;
}

GazeStream generate_trial(const SyntheticUserProfile& profile,
                          double duration_s, double rate_hz,
                          std::uint64_t trial_seed) {
  if (duration_s < 5.0) {
    throw InvalidParameter("trial duration must be at least 5 s");
  }
  if (rate_hz <= 0.0) {
    throw InvalidParameter("sample rate must be positive");
  }

  Rng rng(trial_seed);
  const std::size_t n =
      static_cast<std::size_t>(std::llround(duration_s * rate_hz));
  const double dt = 1.0 / rate_hz;

  GazeStream stream;
  stream.nominal_rate_hz = rate_hz;
  stream.samples.reserve(n);

  enum class Phase { Fixation, Saccade };
  Phase phase = Phase::Fixation;
  double phase_start = 0.0;
  double phase_duration = 0.0;

  double fix_theta = std::clamp(rng.normal(0.0, 5.0), -20.0, 20.0);
  double fix_psi = std::clamp(rng.normal(0.0, 5.0), -20.0, 20.0);
  double drift_theta = 0.0;
  double drift_psi = 0.0;
  double tremor_theta = 0.0;
  double tremor_psi = 0.0;
  double tremor_env = 1.0;
  double tremor_log_env = 0.0;
  double pace_log = 0.0;
  const double tremor_kick =
      profile.tremor_sigma_deg * std::sqrt(1.0 - kTremorRho * kTremorRho);
  double sac_from_theta = 0.0;
  double sac_from_psi = 0.0;
  double sac_to_theta = 0.0;
  double sac_to_psi = 0.0;

  const auto begin_fixation = [&](double start, double theta, double psi) {
    phase = Phase::Fixation;
    phase_start = start;
    fix_theta = theta;
    fix_psi = psi;
    // Engagement drifts over several seconds: stretches of rapid scanning
    // alternate with long dwells, so per-window saccade counts vary well
    // beyond Poisson noise.
    pace_log = 0.96 * pace_log + 0.35 * std::sqrt(1.0 - 0.96 * 0.96) * rng.normal();
    phase_duration = std::max(
        0.05, std::exp(pace_log + rng.normal(profile.fixation_mu_log_s,
                                             profile.fixation_sigma_log_s)));
    const double drift_dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
    drift_theta = profile.drift_rate_deg_s * std::cos(drift_dir);
    drift_psi = profile.drift_rate_deg_s * std::sin(drift_dir);
    // Tremor waxes and wanes over several seconds, slower than an analysis
    // window, so some whole windows are near-still. That keeps the window
    // speed quantiles overlapping zero, which sample-and-hold outputs hit
    // exactly. Mean about 1, capped so peak tremor speed stays below the
    // fixation/saccade speed threshold.
    tremor_log_env =
        0.96 * tremor_log_env + 1.15 * std::sqrt(1.0 - 0.96 * 0.96) * rng.normal();
    tremor_env = std::min(1.6, std::exp(tremor_log_env - 0.66));
  };

  const auto begin_saccade = [&](double start, double from_theta,
                                 double from_psi) {
    phase = Phase::Saccade;
    phase_start = start;
    sac_from_theta = from_theta;
    sac_from_psi = from_psi;

    double amp = std::clamp(
        draw_gamma(rng, profile.amplitude_shape, profile.amplitude_scale_deg),
        kMinSaccadeDeg, kMaxSaccadeDeg);
    double angle;
    const double dist_from_center = std::hypot(from_theta, from_psi);
    const double p_recenter =
        dist_from_center < 3.0
            ? 0.0
            : std::min(0.85, 0.10 + 0.9 * (dist_from_center / kTargetBoundDeg) *
                                        (dist_from_center / kTargetBoundDeg));
    if (rng.uniform() < p_recenter) {
      // Recentering saccade keeps trajectories hovering around the origin,
      // so mean gaze position never identifies a user.
      angle = std::atan2(-from_psi, -from_theta) + rng.uniform(-0.26, 0.26);
      amp = std::min(amp, 0.9 * dist_from_center);
    } else {
      const int bin = draw_direction_bin(rng, profile.preferred_direction_bin);
      const double center_deg = -180.0 + 45.0 * bin + 22.5;
      angle = (center_deg + rng.uniform(-22.5, 22.5)) * std::numbers::pi / 180.0;
    }
    double dir_theta = std::cos(angle);
    double dir_psi = std::sin(angle);

    // Truncate the amplitude so the target stays inside the working box.
    double amp_max = amp;
    for (const auto& [pos, dir] : {std::pair{from_theta, dir_theta},
                                   std::pair{from_psi, dir_psi}}) {
      if (dir > 1e-12) {
        amp_max = std::min(amp_max, (kTargetBoundDeg - pos) / dir);
      } else if (dir < -1e-12) {
        amp_max = std::min(amp_max, (-kTargetBoundDeg - pos) / dir);
      }
    }
    if (amp_max < kMinSaccadeDeg) {
      // Pinned at the border: aim straight back toward the center instead.
      const double dist = std::hypot(from_theta, from_psi);
      angle = std::atan2(-from_psi, -from_theta);
      dir_theta = std::cos(angle);
      dir_psi = std::sin(angle);
      amp_max = std::max(kMinSaccadeDeg, 0.8 * dist);
    }
    amp = std::min(amp, amp_max);

    sac_to_theta = sac_from_theta + amp * dir_theta;
    sac_to_psi = sac_from_psi + amp * dir_psi;
    phase_duration =
        (profile.main_seq_a_ms_per_deg * amp + profile.main_seq_b_ms) / 1000.0;
    if (rng.uniform() < 0.6) {
      // Ballistic flick: the tracker catches the whole movement inside one
      // frame, so the record shows a step. This puts genuine step transients
      // in every raw window, on the same scale a sample-and-hold filter emits.
      phase_duration = std::max(0.012, 1.0 / rate_hz);
    }
  };

  begin_fixation(0.0, fix_theta, fix_psi);

  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    while (t >= phase_start + phase_duration) {
      const double end = phase_start + phase_duration;
      if (phase == Phase::Fixation) {
        begin_saccade(end, fix_theta + drift_theta * phase_duration,
                      fix_psi + drift_psi * phase_duration);
      } else {
        begin_fixation(end, sac_to_theta, sac_to_psi);
      }
    }

    double theta;
    double psi;
    if (phase == Phase::Fixation) {
      const double dt_phase = t - phase_start;
      theta = fix_theta + drift_theta * dt_phase;
      psi = fix_psi + drift_psi * dt_phase;
    } else {
      const double u = (t - phase_start) / phase_duration;
      const double s = u * u * (3.0 - 2.0 * u);
      theta = sac_from_theta + (sac_to_theta - sac_from_theta) * s;
      psi = sac_from_psi + (sac_to_psi - sac_from_psi) * s;
    }
    tremor_theta =
        kTremorRho * tremor_theta + tremor_env * tremor_kick * rng.normal();
    tremor_psi =
        kTremorRho * tremor_psi + tremor_env * tremor_kick * rng.normal();
    theta += tremor_theta;
    psi += tremor_psi;

    GazeSample sample;
    sample.theta_deg = std::clamp(theta, -kClampDeg, kClampDeg);
    sample.psi_deg = std::clamp(psi, -kClampDeg, kClampDeg);
    sample.timestamp_s = t;
    stream.samples.push_back(sample);
  }
  return stream;
}

std::vector<GazeStream> generate_dataset(const SyntheticDatasetSpec& spec) {
  spec.check();
  std::vector<GazeStream> dataset;
  dataset.reserve(static_cast<std::size_t>(spec.n_users) * spec.trials_per_user);
  for (int u = 0; u < spec.n_users; ++u) {
    const SyntheticUserProfile profile = generate_profile(u, spec.master_seed);
    for (int trial = 1; trial <= spec.trials_per_user; ++trial) {
      Rng seed_rng = Rng::substream(spec.master_seed, std::string_view("trial"),
                                    static_cast<std::uint64_t>(u),
                                    static_cast<std::uint64_t>(trial));
      GazeStream stream = generate_trial(profile, spec.trial_duration_s,
                                         spec.rate_hz, seed_rng.next_u64());
      stream.user_id = profile.user_id;
      stream.trial_id = trial;
      dataset.push_back(std::move(stream));
    }
  }
  return dataset;
}

}  // namespace gazeguard
