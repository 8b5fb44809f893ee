#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gazeguard/types.hpp"

namespace gazeguard {

inline constexpr double kValidationGridSpanDeg = 38.58;
inline constexpr double kValidationDwellS = 2.0;

// Target cycle over a 3x3 grid. Grid index i maps row-major to column i % 3
// and row i / 3; centers sit at offsets {-span/2, 0, +span/2} on each axis,
// theta from the column and psi from the row.
struct ValidationSchedule {
  double grid_span_deg = kValidationGridSpanDeg;
  double dwell_s = kValidationDwellS;
  double start_s = 0.0;
  std::vector<int> order;  // grid indices, one dwell window each

  // Center of the grid cell for index i in [0, 8].
  GazeSample target_center(int index) const;
  // Throws InvalidParameter on bad indices, order shorter than 2 entries,
  // or dwell below 1 s (the retained interval is the median second).
  void check() const;
};

// All nine targets in row-major order.
ValidationSchedule default_schedule();

struct TargetError {
  int grid_index = 0;
  double theta_deg = 0.0;
  double psi_deg = 0.0;
  double mean_deg = 0.0;
  double std_deg = 0.0;
  std::size_t n_samples = 0;
};

struct ValidationReport {
  double mean_deg = 0.0;
  double std_deg = 0.0;
  std::size_t n_samples = 0;
  std::vector<TargetError> per_target;
};

// Angular error against the active target center over the median second of
// each dwell window, first target discarded; mean and standard deviation are
// pooled across all retained samples.
ValidationReport validation_error(const GazeStream& recording,
                                  const ValidationSchedule& schedule);

// JSON object {grid_span_deg, dwell_s, order: [indices]}.
ValidationSchedule schedule_from_json(const std::string& text);
std::string schedule_to_json(const ValidationSchedule& schedule);

}  // namespace gazeguard
