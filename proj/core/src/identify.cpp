#include "gazeguard/identify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gazeguard/errors.hpp"
#include "gazeguard/stream_ops.hpp"
#include "parallel.hpp"

namespace gazeguard {

double cosine_distance(const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine distance over dimensions " +
                            std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) {
    throw DegenerateVector("cosine distance of a zero-norm vector");
  }
  const double d = 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(d, 0.0, 2.0);
}

std::string predict_identity(const EmbeddingSet& query,
                             const EmbeddingSet& reference) {
  const std::size_t qd = query.dim();
  const std::size_t rd = reference.dim();
  if (qd != rd) {
    throw DimensionMismatch("query dimension " + std::to_string(qd) +
                            " vs reference dimension " + std::to_string(rd));
  }

  std::map<std::string, std::size_t> votes;
  for (const Embedding& q : query.records) {
    double best_dist = 0.0;
    const std::string* best_label = nullptr;
    for (const Embedding& r : reference.records) {
      const double d = cosine_distance(q.values, r.values);
      // Equal distances resolve to the smaller label, so the result cannot
      // depend on reference record order.
      if (best_label == nullptr || d < best_dist ||
          (d == best_dist && r.user_id < *best_label)) {
        best_dist = d;
        best_label = &r.user_id;
      }
    }
    ++votes[*best_label];
  }

  const std::string* winner = nullptr;
  std::size_t winner_votes = 0;
  for (const auto& [label, count] : votes) {
    if (winner == nullptr || count > winner_votes) {
      winner = &label;
      winner_votes = count;
    }
  }
  return *winner;
}

IdentificationReport evaluate_sets(const EmbeddingSet& query,
                                   const EmbeddingSet& reference,
                                   int query_trial, int reference_trial) {
  query.dim();
  reference.dim();

  std::map<std::string, EmbeddingSet> by_user;
  for (const Embedding& e : query.records) {
    by_user[e.user_id].records.push_back(e);
  }

  IdentificationReport report;
  std::size_t correct = 0;
  for (const auto& [user, user_query] : by_user) {
    IdentificationOutcome outcome;
    outcome.query_trial = query_trial;
    outcome.reference_trial = reference_trial;
    outcome.user_id = user;
    outcome.predicted_user_id = predict_identity(user_query, reference);
    outcome.correct = outcome.predicted_user_id == user;
    if (outcome.correct) ++correct;
    report.outcomes.push_back(std::move(outcome));
  }
  const double accuracy =
      static_cast<double>(correct) / static_cast<double>(by_user.size());
  report.per_pair_accuracy[{query_trial, reference_trial}] = accuracy;
  report.mean_accuracy = accuracy;
  return report;
}

namespace {

// Segment and embed every stream of one trial, privatized or raw, with an
// optional post-privatization transform.
EmbeddingSet embed_trial(const std::vector<const GazeStream*>& streams,
                         const EmbedderSpec& embedder,
                         const MechanismConfig& mechanism, std::uint64_t seed,
                         SetRole role, const StreamTransform& transform) {
  EmbeddingSet set;
  set.role = role;
  for (const GazeStream* stream : streams) {
    GazeStream work = mechanism.kind == MechanismKind::None
                          ? *stream
                          : privatize_stream(*stream, mechanism, seed);
    if (transform) work = transform(work);
    for (const Segment& seg : segment(work)) {
      set.records.push_back(
          embed_statistical(seg, embedder.velocity_threshold_deg_s));
    }
  }
  return set;
}

}  // namespace

IdentificationReport evaluate_identification(
    const std::vector<GazeStream>& dataset, const EmbedderSpec& embedder,
    const MechanismConfig& mechanism, std::uint64_t seed, int jobs) {
  return evaluate_identification_transformed(dataset, embedder, mechanism,
                                             seed, nullptr, nullptr, jobs);
}

IdentificationReport evaluate_identification_transformed(
    const std::vector<GazeStream>& dataset, const EmbedderSpec& embedder,
    const MechanismConfig& mechanism, std::uint64_t seed,
    const StreamTransform& query_transform,
    const StreamTransform& reference_transform, int jobs) {
  if (embedder.kind != EmbedderSpec::Kind::Statistical) {
    throw ProtocolError(
        "full-protocol evaluation needs raw streams and the statistical "
        "embedder; imported embeddings go through evaluate_sets");
  }
  if (dataset.empty()) {
    throw EmptySet("identification dataset is empty");
  }

  std::map<std::string, std::set<int>> trials_by_user;
  std::map<int, std::vector<const GazeStream*>> streams_by_trial;
  for (const GazeStream& s : dataset) {
    if (!trials_by_user[s.user_id].insert(s.trial_id).second) {
      throw ProtocolError("duplicate stream for user '" + s.user_id +
                          "' trial " + std::to_string(s.trial_id));
    }
    streams_by_trial[s.trial_id].push_back(&s);
    if (s.covering_duration_s() + 1e-6 < kSegmentWindowS) {
      throw InsufficientData("user '" + s.user_id + "' trial " +
                             std::to_string(s.trial_id) + " covers less than " +
                             std::to_string(kSegmentWindowS) + " s");
    }
  }

  std::set<int> all_trials;
  for (const auto& [trial, streams] : streams_by_trial) all_trials.insert(trial);
  for (const auto& [user, trials] : trials_by_user) {
    if (trials.size() < 2) {
      throw ProtocolError("user '" + user + "' has fewer than 2 trials");
    }
    if (trials != all_trials) {
      throw ProtocolError("user '" + user +
                          "' is missing trials present for other users");
    }
  }

  const std::vector<int> trials(all_trials.begin(), all_trials.end());

  // Embeddings are computed once per trial for each role; folds reuse them.
  std::map<int, EmbeddingSet> reference_sets;
  std::map<int, EmbeddingSet> query_sets;
  for (int t : trials) {
    reference_sets[t] = embed_trial(streams_by_trial[t], embedder,
                                    MechanismConfig::none(), seed,
                                    SetRole::Reference, reference_transform);
    query_sets[t] = embed_trial(streams_by_trial[t], embedder, mechanism, seed,
                                SetRole::Query, query_transform);
  }

  std::vector<std::pair<int, int>> pairs;
  for (int q : trials) {
    for (int r : trials) {
      if (q != r) pairs.emplace_back(q, r);
    }
  }

  std::vector<IdentificationReport> per_pair(pairs.size());
  detail::parallel_for(pairs.size(), jobs, [&](std::size_t i) {
    const auto [q, r] = pairs[i];
    EmbeddingSet query = query_sets.at(q);
    EmbeddingSet reference = reference_sets.at(r);
    const ZScore z = fit_zscore(reference);
    apply_zscore(reference, z);
    apply_zscore(query, z);
    per_pair[i] = evaluate_sets(query, reference, q, r);
  });

  IdentificationReport report;
  double accuracy_sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double acc = per_pair[i].mean_accuracy;
    report.per_pair_accuracy[pairs[i]] = acc;
    accuracy_sum += acc;
    for (IdentificationOutcome& o : per_pair[i].outcomes) {
      report.outcomes.push_back(std::move(o));
    }
  }
  report.mean_accuracy = accuracy_sum / static_cast<double>(pairs.size());
  return report;
}

}  // namespace gazeguard
