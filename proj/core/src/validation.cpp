#include "gazeguard/validation.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "gazeguard/errors.hpp"
#include "gazeguard/stream_ops.hpp"

namespace gazeguard {

GazeSample ValidationSchedule::target_center(int index) const {
  const int col = index % 3;
  const int row = index / 3;
  GazeSample center;
  center.theta_deg = (col - 1) * grid_span_deg / 2.0;
  center.psi_deg = (row - 1) * grid_span_deg / 2.0;
  return center;
}

void ValidationSchedule::check() const {
  if (grid_span_deg <= 0.0) {
    throw InvalidParameter("grid span must be positive");
  }
  if (dwell_s < 1.0) {
    throw InvalidParameter("dwell must be at least 1 s");
  }
  if (order.size() < 2) {
    throw InvalidParameter(
        "schedule needs at least 2 targets (the first is discarded)");
  }
  for (int i : order) {
    if (i < 0 || i > 8) {
      throw InvalidParameter("grid index " + std::to_string(i) +
                             " outside [0, 8]");
    }
  }
}

ValidationSchedule default_schedule() {
  ValidationSchedule s;
  s.order.resize(9);
  std::iota(s.order.begin(), s.order.end(), 0);
  return s;
}

ValidationReport validation_error(const GazeStream& recording,
                                  const ValidationSchedule& schedule) {
  schedule.check();
  if (recording.empty()) {
    throw InsufficientData("validation recording is empty");
  }

  const std::size_t n_targets = schedule.order.size();
  // End of the last retained interval: the median second of the final window.
  const double last_needed = schedule.start_s +
                             static_cast<double>(n_targets - 1) * schedule.dwell_s +
                             (schedule.dwell_s + 1.0) / 2.0;
  if (recording.samples.back().timestamp_s + 1e-9 < last_needed) {
    throw InsufficientData("recording ends at " +
                           std::to_string(recording.samples.back().timestamp_s) +
                           " s but the schedule needs " +
                           std::to_string(last_needed) + " s");
  }

  ValidationReport report;
  std::vector<double> pooled;
  std::size_t cursor = 0;
  for (std::size_t w = 1; w < n_targets; ++w) {
    const double window_start = schedule.start_s + static_cast<double>(w) * schedule.dwell_s;
    const double lo = window_start + (schedule.dwell_s - 1.0) / 2.0;
    const double hi = window_start + (schedule.dwell_s + 1.0) / 2.0;
    const GazeSample center = schedule.target_center(schedule.order[w]);

    while (cursor < recording.size() &&
           recording.samples[cursor].timestamp_s < lo) {
      ++cursor;
    }
    TargetError target;
    target.grid_index = schedule.order[w];
    target.theta_deg = center.theta_deg;
    target.psi_deg = center.psi_deg;

    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t i = cursor;
    for (; i < recording.size() && recording.samples[i].timestamp_s < hi; ++i) {
      const double err = angular_error_deg(recording.samples[i],
                                           center.theta_deg, center.psi_deg);
      sum += err;
      sum_sq += err * err;
      pooled.push_back(err);
      ++target.n_samples;
    }
    cursor = i;

    if (target.n_samples > 0) {
      const double n = static_cast<double>(target.n_samples);
      target.mean_deg = sum / n;
      const double var = std::max(0.0, sum_sq / n - target.mean_deg * target.mean_deg);
      target.std_deg = std::sqrt(var);
    }
    report.per_target.push_back(target);
  }

  if (pooled.empty()) {
    throw InsufficientData("no samples fall inside the retained intervals");
  }
  const double n = static_cast<double>(pooled.size());
  double sum = 0.0;
  for (double e : pooled) sum += e;
  report.mean_deg = sum / n;
  double var = 0.0;
  for (double e : pooled) var += (e - report.mean_deg) * (e - report.mean_deg);
  report.std_deg = std::sqrt(var / n);
  report.n_samples = pooled.size();
  return report;
}

ValidationSchedule schedule_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("schedule is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw SchemaError("schedule must be a JSON object");
  }
  ValidationSchedule s;
  if (j.contains("grid_span_deg")) {
    if (!j["grid_span_deg"].is_number()) {
      throw SchemaError("'grid_span_deg' must be a number");
    }
    s.grid_span_deg = j["grid_span_deg"].get<double>();
  }
  if (j.contains("dwell_s")) {
    if (!j["dwell_s"].is_number()) {
      throw SchemaError("'dwell_s' must be a number");
    }
    s.dwell_s = j["dwell_s"].get<double>();
  }
  if (j.contains("start_s")) {
    if (!j["start_s"].is_number()) {
      throw SchemaError("'start_s' must be a number");
    }
    s.start_s = j["start_s"].get<double>();
  }
  if (!j.contains("order") || !j["order"].is_array()) {
    throw SchemaError("schedule needs an 'order' array of grid indices");
  }
  for (const auto& item : j["order"]) {
    if (!item.is_number_integer()) {
      throw SchemaError("'order' entries must be integers");
    }
    s.order.push_back(item.get<int>());
  }
  s.check();
  return s;
}

std::string schedule_to_json(const ValidationSchedule& schedule) {
  nlohmann::json j;
  j["grid_span_deg"] = schedule.grid_span_deg;
  j["dwell_s"] = schedule.dwell_s;
  j["start_s"] = schedule.start_s;
  j["order"] = schedule.order;
  return j.dump();
}

}  // namespace gazeguard
