#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace gazeguard {

// One head-localized gaze measurement. Angles are in degrees throughout the
// library; radians appear only inside trigonometric internals.
struct GazeSample {
  double theta_deg = 0.0;  // horizontal
  double psi_deg = 0.0;    // vertical
  double timestamp_s = 0.0;
};

// Ordered gaze time series for one (user, trial). Timestamps are strictly
// increasing and normalized so the trial starts at t = 0.
struct GazeStream {
  std::vector<GazeSample> samples;
  double nominal_rate_hz = 0.0;
  std::string user_id;
  int trial_id = 0;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  // Span between first and last timestamp.
  double span_s() const noexcept {
    return samples.empty() ? 0.0
                           : samples.back().timestamp_s - samples.front().timestamp_s;
  }

  // Duration the stream covers when each sample owns one frame interval:
  // span + 1/rate. An n-sample stream at rate r covers n/r seconds, which is
  // the duration segmentation and resampling count against.
  double covering_duration_s() const noexcept {
    if (samples.empty() || nominal_rate_hz <= 0.0) return span_s();
    return span_s() + 1.0 / nominal_rate_hz;
  }

  // Throws on structural violations (non-finite values, non-increasing
  // timestamps); returns human-readable warnings for soft ones (angles
  // outside [-90, 90], which mechanisms may legitimately produce).
  std::vector<std::string> validate() const;
};

inline constexpr double kSegmentRateHz = 125.0;
inline constexpr double kSegmentWindowS = 5.0;
inline constexpr double kSegmentStrideS = 1.0;
inline constexpr std::size_t kSegmentLength = 625;  // 5 s at 125 Hz

// Fixed-length resampled window used by the identification pipeline.
struct Segment {
  std::vector<double> theta;
  std::vector<double> psi;
  double rate_hz = kSegmentRateHz;
  std::string user_id;
  int trial_id = 0;
  std::size_t segment_index = 0;

  std::size_t length() const noexcept { return theta.size(); }
};

}  // namespace gazeguard
