#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gazeguard/aoi.hpp"
#include "gazeguard/attacks.hpp"
#include "gazeguard/identify.hpp"
#include "gazeguard/types.hpp"
#include "gazeguard/validation.hpp"

namespace gazeguard {

// Source column names for each canonical gaze field, so files from other
// pipelines import without rewriting. Extra source columns are ignored.
struct ColumnMapping {
  std::string user_id = "user_id";
  std::string trial_id = "trial_id";
  std::string frame = "frame";
  std::string timestamp_s = "timestamp_s";
  std::string theta_deg = "theta_deg";
  std::string psi_deg = "psi_deg";
};

struct ReadReport {
  std::size_t rows_read = 0;
  std::size_t duplicates_collapsed = 0;
  std::vector<std::string> warnings;
};

// Rows grouped by (user_id, trial_id), sorted by timestamp, timestamps
// normalized so each trial starts at t = 0. Equal timestamps within a trial
// collapse to the last occurrence and are counted in the report. The nominal
// rate is inferred from the span and snapped to an integer when close.
std::vector<GazeStream> read_stream_csv(const std::string& path,
                                        const ColumnMapping& mapping = {},
                                        ReadReport* report = nullptr);

// Canonical layout user_id,trial_id,frame,timestamp_s,theta_deg,psi_deg with
// frame numbering from 0 per trial and floats at 9 significant digits.
void write_stream_csv(const std::vector<GazeStream>& streams,
                      const std::string& path);

// Result emitters. Accuracy-like values are written with 9 decimal places.
void write_identification_csv(const IdentificationReport& report,
                              const std::string& path);
void write_aoi_csv(const AoiRetentionReport& report, const std::string& path);
void write_threat_csv(const std::vector<ThreatTableRow>& rows,
                      const std::string& path);
void write_validation_csv(const ValidationReport& report,
                          const std::string& path);

struct SweepRow {
  std::string mechanism;
  double strength = 0.0;
  double id_accuracy = 0.0;
  double aoi_f1 = 0.0;
  bool has_aoi = false;
};

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace gazeguard
