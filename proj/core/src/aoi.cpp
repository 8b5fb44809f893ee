#include "gazeguard/aoi.hpp"

#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "gazeguard/errors.hpp"

namespace gazeguard {

void validate_scene(const std::vector<AoiRegion>& scene) {
  std::set<std::string> ids;
  for (const AoiRegion& r : scene) {
    if (!(r.theta_min < r.theta_max) || !(r.psi_min < r.psi_max)) {
      throw InvalidParameter("region '" + r.id +
                             "' has empty bounds (min must be < max)");
    }
    if (r.id == kBackgroundLabel) {
      throw InvalidParameter("region id '" + r.id + "' is reserved");
    }
    if (!ids.insert(r.id).second) {
      throw InvalidParameter("duplicate region id '" + r.id + "'");
    }
  }
}

std::string aoi_label(const GazeSample& sample,
                      const std::vector<AoiRegion>& scene) {
  for (const AoiRegion& r : scene) {
    if (r.contains(sample)) return r.id;
  }
  return kBackgroundLabel;
}

AoiRetentionReport aoi_retention(const GazeStream& original,
                                 const GazeStream& privatized,
                                 const std::vector<AoiRegion>& scene,
                                 bool include_background) {
  validate_scene(scene);
  if (original.size() != privatized.size()) {
    throw StreamMismatch("streams differ in length: " +
                         std::to_string(original.size()) + " vs " +
                         std::to_string(privatized.size()));
  }
  if (original.empty()) {
    throw EmptySet("AOI retention over empty streams");
  }
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (std::abs(original.samples[i].timestamp_s -
                 privatized.samples[i].timestamp_s) > 1e-9) {
      throw StreamMismatch("timestamps diverge at frame " + std::to_string(i));
    }
  }

  struct Tally {
    std::size_t tp = 0;
    std::size_t pred = 0;
    std::size_t truth = 0;
  };
  std::map<std::string, Tally> tallies;
  std::size_t weighted_frames = 0;

  for (std::size_t i = 0; i < original.size(); ++i) {
    const std::string truth = aoi_label(original.samples[i], scene);
    const std::string pred = aoi_label(privatized.samples[i], scene);
    const bool truth_counts = include_background || truth != kBackgroundLabel;
    const bool pred_counts = include_background || pred != kBackgroundLabel;
    if (truth_counts) {
      ++tallies[truth].truth;
      ++weighted_frames;
    }
    if (pred_counts) ++tallies[pred].pred;
    if (truth == pred && truth_counts) ++tallies[truth].tp;
  }
  if (weighted_frames == 0) {
    throw EmptySet("no frames carry a true label under the current settings");
  }

  AoiRetentionReport report;
  for (const auto& [label, t] : tallies) {
    AoiClassMetrics m;
    m.label = label;
    m.support = t.truth;
    m.weight = static_cast<double>(t.truth) / static_cast<double>(weighted_frames);
    m.precision = t.pred > 0 ? static_cast<double>(t.tp) / t.pred : 0.0;
    m.recall = t.truth > 0 ? static_cast<double>(t.tp) / t.truth : 0.0;
    m.f1 = m.precision + m.recall > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    report.weighted_precision += m.weight * m.precision;
    report.weighted_recall += m.weight * m.recall;
    report.weighted_f1 += m.weight * m.f1;
    report.per_class.push_back(std::move(m));
  }
  return report;
}

std::vector<AoiRegion> scene_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("scene is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) {
    throw SchemaError("scene must be a JSON array of regions");
  }
  std::vector<AoiRegion> scene;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string()) {
      throw SchemaError("each region needs a string 'id'");
    }
    AoiRegion r;
    r.id = item["id"].get<std::string>();
    for (const char* key :
         {"theta_min", "theta_max", "psi_min", "psi_max"}) {
      if (!item.contains(key) || !item[key].is_number()) {
        throw SchemaError("region '" + r.id + "' needs numeric '" + key + "'");
      }
    }
    r.theta_min = item["theta_min"].get<double>();
    r.theta_max = item["theta_max"].get<double>();
    r.psi_min = item["psi_min"].get<double>();
    r.psi_max = item["psi_max"].get<double>();
    scene.push_back(std::move(r));
  }
  validate_scene(scene);
  return scene;
}

std::string scene_to_json(const std::vector<AoiRegion>& scene) {
  nlohmann::json j = nlohmann::json::array();
  for (const AoiRegion& r : scene) {
    j.push_back({{"id", r.id},
                 {"theta_min", r.theta_min},
                 {"theta_max", r.theta_max},
                 {"psi_min", r.psi_min},
                 {"psi_max", r.psi_max}});
  }
  return j.dump();
}

}  // namespace gazeguard
