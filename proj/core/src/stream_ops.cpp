#include "gazeguard/stream_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "gazeguard/errors.hpp"

namespace gazeguard {

namespace {

// Tolerance for snapping grid arithmetic. Wide enough to absorb the jitter
// timestamps pick up from a 9-significant-digit CSV round trip, still far
// below one frame interval.
constexpr double kGridTol = 1e-3;

}  // namespace

std::vector<std::string> GazeStream::validate() const {
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GazeSample& s = samples[i];
    if (!std::isfinite(s.theta_deg) || !std::isfinite(s.psi_deg) ||
        !std::isfinite(s.timestamp_s)) {
      throw InvalidParameter("non-finite sample at index " + std::to_string(i) +
                             " in stream " + user_id + "/trial " +
                             std::to_string(trial_id));
    }
    if (i > 0 && s.timestamp_s <= samples[i - 1].timestamp_s) {
      throw InvalidParameter("timestamps not strictly increasing at index " +
                             std::to_string(i) + " in stream " + user_id +
                             "/trial " + std::to_string(trial_id));
    }
  }
  std::size_t out_of_range = 0;
  for (const GazeSample& s : samples) {
    if (std::abs(s.theta_deg) > 90.0 || std::abs(s.psi_deg) > 90.0) ++out_of_range;
  }
  if (out_of_range > 0) {
    warnings.push_back(std::to_string(out_of_range) +
                       " sample(s) outside [-90, 90] degrees in stream " +
                       user_id + "/trial " + std::to_string(trial_id));
  }
  return warnings;
}

GazeStream resample_linear(const GazeStream& stream, double target_hz) {
  if (stream.size() < 2) {
    throw InsufficientData("resample_linear needs at least 2 samples, got " +
                           std::to_string(stream.size()));
  }
  if (target_hz <= 0.0) {
    throw InvalidParameter("target rate must be positive");
  }

  const double t0 = stream.samples.front().timestamp_s;
  const double duration = stream.covering_duration_s();
  const std::size_t n_out = static_cast<std::size_t>(
      std::ceil(duration * target_hz - kGridTol));

  GazeStream out;
  out.nominal_rate_hz = target_hz;
  out.user_id = stream.user_id;
  out.trial_id = stream.trial_id;
  out.samples.reserve(n_out);

  std::size_t hi = 1;  // index of the bracketing sample above the query
  for (std::size_t k = 0; k < n_out; ++k) {
    const double t = t0 + static_cast<double>(k) / target_hz;
    while (hi + 1 < stream.size() && stream.samples[hi].timestamp_s < t) ++hi;
    const GazeSample& a = stream.samples[hi - 1];
    const GazeSample& b = stream.samples[hi];
    GazeSample s;
    s.timestamp_s = t;
    if (t >= b.timestamp_s) {
      // Past the last input sample: clamp, no extrapolation.
      s.theta_deg = b.theta_deg;
      s.psi_deg = b.psi_deg;
    } else if (t <= a.timestamp_s) {
      s.theta_deg = a.theta_deg;
      s.psi_deg = a.psi_deg;
    } else {
      const double u = (t - a.timestamp_s) / (b.timestamp_s - a.timestamp_s);
      s.theta_deg = a.theta_deg + u * (b.theta_deg - a.theta_deg);
      s.psi_deg = a.psi_deg + u * (b.psi_deg - a.psi_deg);
    }
    out.samples.push_back(s);
  }
  return out;
}

namespace {

bool on_grid(const GazeStream& stream, double rate_hz) {
  if (stream.nominal_rate_hz != rate_hz) return false;
  const double t0 = stream.samples.front().timestamp_s;
  for (std::size_t k = 0; k < stream.size(); ++k) {
    const double expected = t0 + static_cast<double>(k) / rate_hz;
    if (std::abs(stream.samples[k].timestamp_s - expected) > 1e-9) return false;
  }
  return true;
}

}  // namespace

std::vector<Segment> segment(const GazeStream& stream, double window_s,
                             double stride_s) {
  if (window_s <= 0.0 || stride_s <= 0.0) {
    throw InvalidParameter("window and stride must be positive");
  }
  if (stream.size() < 2) {
    throw InsufficientData("segmentation needs at least 2 samples");
  }

  const GazeStream resampled_storage =
      on_grid(stream, kSegmentRateHz) ? GazeStream{} : resample_linear(stream, kSegmentRateHz);
  const GazeStream& grid = resampled_storage.samples.empty() ? stream : resampled_storage;

  const double duration = grid.covering_duration_s();
  if (duration + kGridTol < window_s) {
    throw InsufficientData("stream covers " + std::to_string(duration) +
                           " s, below the " + std::to_string(window_s) +
                           " s window");
  }

  const std::size_t window_len = static_cast<std::size_t>(
      std::llround(window_s * kSegmentRateHz));
  const std::size_t stride_len = static_cast<std::size_t>(
      std::llround(stride_s * kSegmentRateHz));
  std::size_t n_windows = static_cast<std::size_t>(
      std::floor((duration - window_s) / stride_s + kGridTol)) + 1;
  if (grid.size() < window_len) {
    throw InsufficientData("stream has " + std::to_string(grid.size()) +
                           " samples on the segmentation grid, below one window");
  }
  n_windows = std::min(n_windows, (grid.size() - window_len) / stride_len + 1);

  std::vector<Segment> segments;
  segments.reserve(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) {
    const std::size_t start = w * stride_len;
    Segment seg;
    seg.user_id = grid.user_id;
    seg.trial_id = grid.trial_id;
    seg.segment_index = w;
    seg.theta.resize(window_len);
    seg.psi.resize(window_len);
    for (std::size_t i = 0; i < window_len; ++i) {
      seg.theta[i] = grid.samples[start + i].theta_deg;
      seg.psi[i] = grid.samples[start + i].psi_deg;
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

double angular_error_deg(double gaze_theta_deg, double gaze_psi_deg,
                         double target_theta_deg, double target_psi_deg) {
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const auto unit = [](double theta_rad, double psi_rad) {
    return std::array<double, 3>{std::cos(psi_rad) * std::sin(theta_rad),
                                 std::sin(psi_rad),
                                 std::cos(psi_rad) * std::cos(theta_rad)};
  };
  const auto a = unit(gaze_theta_deg * kDegToRad, gaze_psi_deg * kDegToRad);
  const auto b = unit(target_theta_deg * kDegToRad, target_psi_deg * kDegToRad);
  const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  const double cx = a[1] * b[2] - a[2] * b[1];
  const double cy = a[2] * b[0] - a[0] * b[2];
  const double cz = a[0] * b[1] - a[1] * b[0];
  // atan2 of the cross norm stays exact at coincidence and keeps precision at
  // tiny angles, where acos of the dot loses up to 8 digits.
  return std::atan2(std::hypot(cx, cy, cz), dot) / kDegToRad;
}

GazeStream truncate_record(const GazeStream& stream, double duration_s) {
  if (duration_s <= 0.0) {
    throw InvalidParameter("truncation duration must be positive");
  }
  if (stream.empty()) return stream;
  const double t0 = stream.samples.front().timestamp_s;
  GazeStream out;
  out.nominal_rate_hz = stream.nominal_rate_hz;
  out.user_id = stream.user_id;
  out.trial_id = stream.trial_id;
  for (const GazeSample& s : stream.samples) {
    if (s.timestamp_s - t0 < duration_s) out.samples.push_back(s);
  }
  return out;
}

}  // namespace gazeguard
