#include "gazeguard/attacks.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gazeguard/errors.hpp"
#include "gazeguard/identify.hpp"
#include "gazeguard/stream_ops.hpp"
#include "gazeguard/wavelet.hpp"

namespace gazeguard {

ThreatScenario threat_scenario_from_name(std::string_view name) {
  if (name == "blackbox") return ThreatScenario::Blackbox;
  if (name == "exemplars") return ThreatScenario::Exemplars;
  if (name == "whitebox") return ThreatScenario::Whitebox;
  throw InvalidParameter("unknown threat scenario '" + std::string(name) + "'");
}

std::string threat_scenario_name(ThreatScenario scenario) {
  switch (scenario) {
    case ThreatScenario::Blackbox: return "blackbox";
    case ThreatScenario::Exemplars: return "exemplars";
    case ThreatScenario::Whitebox: return "whitebox";
  }
  throw InvalidParameter("unknown threat scenario");
}

std::vector<SegmentPair> build_exemplar_pairs(
    const std::vector<const GazeStream*>& streams,
    const MechanismConfig& mechanism, std::uint64_t seed) {
  std::vector<SegmentPair> pairs;
  for (const GazeStream* stream : streams) {
    const GazeStream original = resample_linear(*stream, kSegmentRateHz);
    const GazeStream privatized = resample_linear(
        privatize_stream(*stream, mechanism, seed), kSegmentRateHz);
    const std::size_t windows = original.size() / kSegmentLength;
    for (std::size_t w = 0; w < windows; ++w) {
      SegmentPair pair;
      Segment& in = pair.first;
      Segment& out = pair.second;
      in.user_id = out.user_id = stream->user_id;
      in.trial_id = out.trial_id = stream->trial_id;
      in.segment_index = out.segment_index = w;
      in.theta.resize(kSegmentLength);
      in.psi.resize(kSegmentLength);
      out.theta.resize(kSegmentLength);
      out.psi.resize(kSegmentLength);
      for (std::size_t i = 0; i < kSegmentLength; ++i) {
        const std::size_t src = w * kSegmentLength + i;
        in.theta[i] = privatized.samples[src].theta_deg;
        in.psi[i] = privatized.samples[src].psi_deg;
        out.theta[i] = original.samples[src].theta_deg;
        out.psi[i] = original.samples[src].psi_deg;
      }
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

namespace {

double exemplars_accuracy(const std::vector<GazeStream>& dataset,
                          const MechanismConfig& mechanism,
                          const EmbedderSpec& embedder, std::uint64_t seed,
                          int jobs) {
  std::set<int> trial_set;
  for (const GazeStream& s : dataset) trial_set.insert(s.trial_id);
  const std::vector<int> trials(trial_set.begin(), trial_set.end());
  if (trials.size() < 4) {
    throw ProtocolError(
        "the exemplars scenario needs at least 4 trials so both halves "
        "support identification, got " +
        std::to_string(trials.size()));
  }

  const std::size_t split = (trials.size() + 1) / 2;
  const std::set<int> half_a(trials.begin(),
                             trials.begin() + static_cast<std::ptrdiff_t>(split));

  double accuracy_sum = 0.0;
  for (int half = 0; half < 2; ++half) {
    std::vector<const GazeStream*> train_streams;
    std::vector<GazeStream> eval_dataset;
    for (const GazeStream& s : dataset) {
      const bool in_a = half_a.count(s.trial_id) > 0;
      if (in_a == (half == 0)) {
        train_streams.push_back(&s);
      } else {
        eval_dataset.push_back(s);
      }
    }

    const std::vector<SegmentPair> pairs =
        build_exemplar_pairs(train_streams, mechanism, seed);
    TrainHyper hyper;
    hyper.seed = hash_combine(mix64(seed), std::string_view("exemplars")) +
                 static_cast<std::uint64_t>(half);
    const InverseRegressor model = train_inverse_regressor(pairs, hyper);

    const StreamTransform invert = [&model](const GazeStream& s) {
      return apply_inverse(model, s);
    };
    accuracy_sum += evaluate_identification_transformed(
                        eval_dataset, embedder, mechanism, seed, invert,
                        nullptr, jobs)
                        .mean_accuracy;
  }
  return accuracy_sum / 2.0;
}

}  // namespace

ThreatReport run_threat_scenario(ThreatScenario scenario,
                                 const std::vector<GazeStream>& dataset,
                                 const MechanismConfig& mechanism,
                                 const EmbedderSpec& embedder,
                                 std::uint64_t seed, int jobs) {
  ThreatReport report;
  report.scenario = scenario;
  report.mechanism = mechanism;
  report.accuracy_before =
      evaluate_identification(dataset, embedder, mechanism, seed, jobs)
          .mean_accuracy;

  switch (scenario) {
    case ThreatScenario::Blackbox: {
      const StreamTransform denoise = [](const GazeStream& s) {
        return wavelet_denoise(s);
      };
      report.accuracy_after = evaluate_identification_transformed(
                                  dataset, embedder, mechanism, seed, denoise,
                                  nullptr, jobs)
                                  .mean_accuracy;
      break;
    }
    case ThreatScenario::Exemplars:
      report.accuracy_after =
          exemplars_accuracy(dataset, mechanism, embedder, seed, jobs);
      break;
    case ThreatScenario::Whitebox: {
      // The attacker knows the mechanism but not the defender's draws.
      const std::uint64_t attacker_seed =
          hash_combine(mix64(seed), std::string_view("whitebox-attacker"));
      const StreamTransform privatize_ref = [&mechanism,
                                             attacker_seed](const GazeStream& s) {
        return privatize_stream(s, mechanism, attacker_seed);
      };
      report.accuracy_after = evaluate_identification_transformed(
                                  dataset, embedder, mechanism, seed, nullptr,
                                  privatize_ref, jobs)
                                  .mean_accuracy;
      break;
    }
  }
  return report;
}

}  // namespace gazeguard
