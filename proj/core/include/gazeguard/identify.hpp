#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gazeguard/embedding.hpp"
#include "gazeguard/mechanisms.hpp"
#include "gazeguard/types.hpp"

namespace gazeguard {

// 1 - cosine similarity, in [0, 2]. Throws DimensionMismatch on unequal
// dimensions and DegenerateVector on a zero-norm input.
double cosine_distance(const std::vector<double>& a,
                       const std::vector<double>& b);

// Nearest reference record per query record by cosine distance, then
// majority vote over the collected labels; ties go to the lexicographically
// smallest label so reference order never matters.
std::string predict_identity(const EmbeddingSet& query,
                             const EmbeddingSet& reference);

struct IdentificationOutcome {
  int query_trial = 0;
  int reference_trial = 0;
  std::string user_id;
  std::string predicted_user_id;
  bool correct = false;
};

struct IdentificationReport {
  std::vector<IdentificationOutcome> outcomes;
  std::map<std::pair<int, int>, double> per_pair_accuracy;
  double mean_accuracy = 0.0;  // unweighted over ordered trial pairs
};

// One query-set-vs-reference-set match: queries grouped by user, one
// prediction per user. Both sets must already be normalized consistently.
IdentificationReport evaluate_sets(const EmbeddingSet& query,
                                   const EmbeddingSet& reference,
                                   int query_trial = 0,
                                   int reference_trial = 0);

// Full protocol: for every ordered pair of distinct trials (q, r), privatize
// all trial-q streams with the mechanism (reference trial r stays raw),
// segment to 5 s windows at 125 Hz, embed, z-score against the reference
// fold, and match per user. Requires the statistical embedder; imported
// embeddings cannot be re-privatized, so use evaluate_sets on them directly.
IdentificationReport evaluate_identification(
    const std::vector<GazeStream>& dataset, const EmbedderSpec& embedder,
    const MechanismConfig& mechanism, std::uint64_t seed, int jobs = 1);

using StreamTransform = std::function<GazeStream(const GazeStream&)>;

// Same protocol with attack hooks: query_transform runs on each query stream
// after privatization, reference_transform runs on each raw reference
// stream. Null transforms leave the corresponding side untouched.
IdentificationReport evaluate_identification_transformed(
    const std::vector<GazeStream>& dataset, const EmbedderSpec& embedder,
    const MechanismConfig& mechanism, std::uint64_t seed,
    const StreamTransform& query_transform,
    const StreamTransform& reference_transform, int jobs = 1);

}  // namespace gazeguard
