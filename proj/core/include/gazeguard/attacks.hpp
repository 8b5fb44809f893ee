#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gazeguard/embedding.hpp"
#include "gazeguard/inverse_cnn.hpp"
#include "gazeguard/mechanisms.hpp"
#include "gazeguard/types.hpp"

namespace gazeguard {

enum class ThreatScenario { Blackbox, Exemplars, Whitebox };

ThreatScenario threat_scenario_from_name(std::string_view name);
std::string threat_scenario_name(ThreatScenario scenario);

struct ThreatReport {
  ThreatScenario scenario = ThreatScenario::Blackbox;
  MechanismConfig mechanism;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
};

// One row of the mechanism-by-attack accuracy table.
struct ThreatTableRow {
  std::string mechanism;
  double before = 0.0;
  double blackbox = 0.0;
  double exemplars = 0.0;
  double whitebox = 0.0;
};

// Non-overlapping (privatized, original) 5 s window pairs at 125 Hz from the
// given streams, as seen by an attacker holding exemplars.
std::vector<SegmentPair> build_exemplar_pairs(
    const std::vector<const GazeStream*>& streams,
    const MechanismConfig& mechanism, std::uint64_t seed);

// Runs one attack against the identification protocol. accuracy_before is
// the unattacked privatized accuracy on the full dataset.
//
// blackbox: wavelet-denoise the privatized query streams.
// exemplars: split each user's trials 50/50, train the inverse regressor on
//   one half's pairs, attack the other half, swap, average (needs >= 4
//   trials so each half supports the protocol).
// whitebox: the attacker privatizes the reference set with the same
//   mechanism under their own independent draws.
ThreatReport run_threat_scenario(ThreatScenario scenario,
                                 const std::vector<GazeStream>& dataset,
                                 const MechanismConfig& mechanism,
                                 const EmbedderSpec& embedder,
                                 std::uint64_t seed, int jobs = 1);

}  // namespace gazeguard
