#pragma once

#include <string>
#include <vector>

#include "gazeguard/types.hpp"

namespace gazeguard {

inline constexpr const char* kBackgroundLabel = "background";

// Angular bounding box, half-open on both axes: a sample belongs to the
// region iff theta_min <= theta < theta_max and psi_min <= psi < psi_max.
struct AoiRegion {
  std::string id;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double psi_min = 0.0;
  double psi_max = 0.0;

  bool contains(const GazeSample& s) const noexcept {
    return s.theta_deg >= theta_min && s.theta_deg < theta_max &&
           s.psi_deg >= psi_min && s.psi_deg < psi_max;
  }
};

// Throws InvalidParameter on empty bounds, duplicate ids, or a region named
// like the background class.
void validate_scene(const std::vector<AoiRegion>& scene);

// First containing region in scene order, or the background label.
std::string aoi_label(const GazeSample& sample,
                      const std::vector<AoiRegion>& scene);

struct AoiClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double weight = 0.0;  // prevalence among true labels
  std::size_t support = 0;
};

struct AoiRetentionReport {
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::vector<AoiClassMetrics> per_class;
};

// Frame-by-frame label agreement between the original stream (truth) and the
// privatized stream (prediction). Per-class precision/recall/F1 are averaged
// with weights equal to each class's share of the true labels; background is
// a class of its own unless include_background is false.
AoiRetentionReport aoi_retention(const GazeStream& original,
                                 const GazeStream& privatized,
                                 const std::vector<AoiRegion>& scene,
                                 bool include_background = true);

// JSON array of {id, theta_min, theta_max, psi_min, psi_max}.
std::vector<AoiRegion> scene_from_json(const std::string& text);
std::string scene_to_json(const std::vector<AoiRegion>& scene);

}  // namespace gazeguard
