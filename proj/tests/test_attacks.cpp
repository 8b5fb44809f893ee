#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <gazeguard/attacks.hpp>
#include <gazeguard/errors.hpp>
#include <gazeguard/identify.hpp>
#include <gazeguard/mechanisms.hpp>
#include <gazeguard/synth.hpp>
#include <gazeguard/types.hpp>
#include <vector>

using namespace gazeguard;

namespace {

std::vector<GazeStream> tiny_dataset(int users, int trials, double duration_s,
                                     std::uint64_t seed) {
  SyntheticDatasetSpec spec;
  spec.n_users = users;
  spec.trials_per_user = trials;
  spec.trial_duration_s = duration_s;
  spec.rate_hz = 72.0;
  spec.master_seed = seed;
  return generate_dataset(spec);
}

bool identical_streams(const GazeStream& a, const GazeStream& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.samples[i].theta_deg != b.samples[i].theta_deg) return false;
    if (a.samples[i].psi_deg != b.samples[i].psi_deg) return false;
    if (a.samples[i].timestamp_s != b.samples[i].timestamp_s) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("scenario names round trip") {
  for (ThreatScenario sc : {ThreatScenario::Blackbox, ThreatScenario::Exemplars,
                            ThreatScenario::Whitebox}) {
    CHECK(threat_scenario_from_name(threat_scenario_name(sc)) == sc);
  }
  CHECK_THROWS_AS(threat_scenario_from_name("sidechannel"), InvalidParameter);
}

TEST_CASE("exemplar pairs cover every full 5 s window once") {
  const std::vector<GazeStream> streams = tiny_dataset(2, 2, 20.0, 3);
  const std::vector<const GazeStream*> ptrs = {&streams[0], &streams[2]};
  const std::vector<SegmentPair> pairs =
      build_exemplar_pairs(ptrs, MechanismConfig::gaussian(3.0), 5);
  // 20 s resampled to 125 Hz gives 2500 samples = 4 non-overlapping windows
  // per stream.
  REQUIRE(pairs.size() == 8);
  for (const SegmentPair& pr : pairs) {
    CHECK(pr.first.length() == kSegmentLength);
    CHECK(pr.second.length() == kSegmentLength);
    CHECK(pr.first.user_id == pr.second.user_id);
    CHECK(pr.first.segment_index == pr.second.segment_index);
  }
  CHECK(pairs[0].first.user_id == streams[0].user_id);
  CHECK(pairs[4].first.user_id == streams[2].user_id);
  CHECK(pairs[3].first.segment_index == 3);

  // The privatized side differs from the original side under noise.
  bool any_diff = false;
  for (std::size_t i = 0; i < kSegmentLength; ++i) {
    if (pairs[0].first.theta[i] != pairs[0].second.theta[i]) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("spatial quantization is idempotent, so whitebox references match") {
  const std::vector<GazeStream> streams = tiny_dataset(2, 2, 10.0, 9);
  const MechanismConfig spatial = MechanismConfig::spatial(144);
  const GazeStream once = privatize_stream(streams[0], spatial, 4);
  const GazeStream twice = privatize_stream(once, spatial, 4);
  CHECK(identical_streams(once, twice));
}

TEST_CASE("whitebox scenario is reproducible and reports both accuracies") {
  const std::vector<GazeStream> dataset = tiny_dataset(4, 2, 20.0, 11);
  const MechanismConfig spatial = MechanismConfig::spatial(48);
  const EmbedderSpec embedder;
  const ThreatReport r1 = run_threat_scenario(ThreatScenario::Whitebox, dataset,
                                              spatial, embedder, 7);
  const ThreatReport r2 = run_threat_scenario(ThreatScenario::Whitebox, dataset,
                                              spatial, embedder, 7);
  CHECK(r1.scenario == ThreatScenario::Whitebox);
  CHECK(r1.mechanism.kind == MechanismKind::Spatial);
  CHECK(r1.accuracy_before >= 0.0);
  CHECK(r1.accuracy_before <= 1.0);
  CHECK(r1.accuracy_after >= 0.0);
  CHECK(r1.accuracy_after <= 1.0);
  CHECK(r1.accuracy_before == r2.accuracy_before);
  CHECK(r1.accuracy_after == r2.accuracy_after);

  const IdentificationReport plain =
      evaluate_identification(dataset, embedder, spatial, 7);
  CHECK(r1.accuracy_before == plain.mean_accuracy);
}

TEST_CASE("blackbox scenario is reproducible") {
  const std::vector<GazeStream> dataset = tiny_dataset(3, 2, 20.0, 13);
  const MechanismConfig gaussian = MechanismConfig::gaussian(3.0);
  const EmbedderSpec embedder;
  const ThreatReport r1 = run_threat_scenario(ThreatScenario::Blackbox, dataset,
                                              gaussian, embedder, 5);
  const ThreatReport r2 = run_threat_scenario(ThreatScenario::Blackbox, dataset,
                                              gaussian, embedder, 5);
  CHECK(r1.accuracy_before == r2.accuracy_before);
  CHECK(r1.accuracy_after == r2.accuracy_after);
}

TEST_CASE("exemplars scenario needs at least four trials") {
  const std::vector<GazeStream> dataset = tiny_dataset(4, 2, 20.0, 17);
  CHECK_THROWS_AS(
      run_threat_scenario(ThreatScenario::Exemplars, dataset,
                          MechanismConfig::gaussian(3.0), EmbedderSpec{}, 1),
      ProtocolError);
}

TEST_CASE("exemplars scenario runs deterministically") {
  const std::vector<GazeStream> dataset = tiny_dataset(4, 4, 20.0, 21);
  const MechanismConfig gaussian = MechanismConfig::gaussian(1.0);
  const ThreatReport r1 = run_threat_scenario(ThreatScenario::Exemplars,
                                              dataset, gaussian, EmbedderSpec{}, 3);
  const ThreatReport r2 = run_threat_scenario(ThreatScenario::Exemplars,
                                              dataset, gaussian, EmbedderSpec{}, 3);
  CHECK(r1.accuracy_before == r2.accuracy_before);
  CHECK(r1.accuracy_after == r2.accuracy_after);
  CHECK(r1.accuracy_after >= 0.0);
  CHECK(r1.accuracy_after <= 1.0);
}
