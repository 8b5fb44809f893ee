#pragma once

#include <vector>

#include "gazeguard/types.hpp"

namespace gazeguard {

// Linear resampling onto a uniform grid at target_hz starting at the first
// input timestamp. The output covers the same duration as the input (one
// frame interval per sample); queries past the last input timestamp clamp to
// the last sample. Throws InsufficientData for streams with < 2 samples.
GazeStream resample_linear(const GazeStream& stream, double target_hz);

// Sliding-window segmentation: windows of window_s seconds every stride_s
// seconds, starting at the stream origin. The stream is resampled to 125 Hz
// internally if it is not already on that grid; incomplete trailing windows
// are discarded. Throws InsufficientData when the stream covers less than
// one window.
std::vector<Segment> segment(const GazeStream& stream,
                             double window_s = kSegmentWindowS,
                             double stride_s = kSegmentStrideS);

// Great-circle angle in degrees between two gaze directions given as
// (theta, psi) offsets from the forward axis.
double angular_error_deg(double gaze_theta_deg, double gaze_psi_deg,
                         double target_theta_deg, double target_psi_deg);

inline double angular_error_deg(const GazeSample& gaze, double target_theta_deg,
                                double target_psi_deg) {
  return angular_error_deg(gaze.theta_deg, gaze.psi_deg, target_theta_deg,
                           target_psi_deg);
}

// Keeps samples with t - t_first < duration_s. Throws InvalidParameter for
// non-positive durations.
GazeStream truncate_record(const GazeStream& stream, double duration_s);

}  // namespace gazeguard
