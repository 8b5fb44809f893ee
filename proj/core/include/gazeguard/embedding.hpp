#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gazeguard/types.hpp"

namespace gazeguard {

struct Embedding {
  std::vector<double> values;
  std::string user_id;
  int trial_id = 0;
  std::size_t segment_index = 0;

  std::size_t dim() const noexcept { return values.size(); }
};

enum class SetRole { Query, Reference };

struct EmbeddingSet {
  std::vector<Embedding> records;
  SetRole role = SetRole::Query;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
  // Throws EmptySet when empty, DimensionMismatch when records disagree on
  // dimension, InvalidParameter on non-finite entries.
  std::size_t dim() const;
};

inline constexpr double kFixationVelocityThresholdDegS = 20.0;
inline constexpr std::size_t kStatisticalEmbeddingDim = 32;

struct EmbedderSpec {
  enum class Kind { Statistical, Imported };
  Kind kind = Kind::Statistical;
  double velocity_threshold_deg_s = kFixationVelocityThresholdDegS;
  std::string path;  // Imported only

  static EmbedderSpec statistical() { return {}; }
  static EmbedderSpec imported(std::string file) {
    EmbedderSpec s;
    s.kind = Kind::Imported;
    s.path = std::move(file);
    return s;
  }
};

// Deterministic hand-crafted 32-dimension descriptor of one 5 s window:
// position statistics, speed and acceleration profiles, fixation/saccade
// structure, a displacement-direction histogram, jerk, and net drift.
Embedding embed_statistical(
    const Segment& segment,
    double velocity_threshold_deg_s = kFixationVelocityThresholdDegS);

// CSV with header user_id,trial_id,segment_index,e0..e{D-1}; dimension
// inferred from the header.
EmbeddingSet load_embeddings(const std::string& path);
void save_embeddings(const EmbeddingSet& set, const std::string& path);

// Per-dimension affine normalization fitted on the reference set only and
// applied to both sets; near-constant dimensions are centered but not
// rescaled.
struct ZScore {
  std::vector<double> mean;
  std::vector<double> scale;
};

ZScore fit_zscore(const EmbeddingSet& reference);
void apply_zscore(EmbeddingSet& set, const ZScore& z);

}  // namespace gazeguard
