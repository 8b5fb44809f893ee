#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <gazeguard/errors.hpp>
#include <gazeguard/inverse_cnn.hpp>
#include <gazeguard/rng.hpp>
#include <gazeguard/types.hpp>
#include <string>
#include <vector>

using namespace gazeguard;

namespace {

// Correlated wander plus noise, so inputs and targets share structure the
// regressor can latch onto.
SegmentPair make_pair(Rng& rng) {
  Segment input;
  Segment target;
  input.theta.resize(kSegmentLength);
  input.psi.resize(kSegmentLength);
  target.theta.resize(kSegmentLength);
  target.psi.resize(kSegmentLength);
  double t = 0.0;
  double p = 0.0;
  for (std::size_t i = 0; i < kSegmentLength; ++i) {
    t = 0.995 * t + 0.3 * rng.normal();
    p = 0.995 * p + 0.3 * rng.normal();
    target.theta[i] = t;
    target.psi[i] = p;
    input.theta[i] = t + rng.normal();
    input.psi[i] = p + rng.normal();
  }
  return {input, target};
}

std::vector<SegmentPair> make_pairs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SegmentPair> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.push_back(make_pair(rng));
  return pairs;
}

bool same_params(const InverseRegressor& a, const InverseRegressor& b) {
  for (int blk = 0; blk < InverseRegressor::kBlocks; ++blk) {
    const auto& x = a.blocks[static_cast<std::size_t>(blk)];
    const auto& y = b.blocks[static_cast<std::size_t>(blk)];
    if (x.conv.weight != y.conv.weight) return false;
    if (x.conv.bias != y.conv.bias) return false;
    if (x.bn.gamma != y.bn.gamma) return false;
    if (x.bn.beta != y.bn.beta) return false;
    if (x.bn.running_mean != y.bn.running_mean) return false;
    if (x.bn.running_var != y.bn.running_var) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("trainable parameter count matches the architecture") {
  const InverseRegressor model = init_inverse_regressor(1);
  // conv taps: 9 * (2*16 + 16*16 + 16*16 + 16*2) = 5184; biases 50; BN
  // gamma+beta 100.
  CHECK(model.parameter_count() == 5334);
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(13);
  const SegmentPair probe = make_pair(rng);
  InverseRegressor model = init_inverse_regressor(3);
  CHECK(regressor_grad_check(model, probe, 120) < 1e-4);
  CHECK(regressor_grad_check(model, probe, 50, 11) ==
        regressor_grad_check(model, probe, 50, 11));
}

TEST_CASE("gradients still match after a few optimizer steps") {
  TrainHyper hyper;
  hyper.epochs = 6;
  hyper.seed = 21;
  const InverseRegressor model = train_inverse_regressor(make_pairs(32, 5), hyper);
  Rng rng(14);
  const SegmentPair probe = make_pair(rng);
  CHECK(regressor_grad_check(model, probe, 100) < 1e-4);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const std::vector<SegmentPair> pairs = make_pairs(40, 8);
  TrainHyper hyper;
  hyper.epochs = 3;
  hyper.seed = 99;
  const InverseRegressor a = train_inverse_regressor(pairs, hyper);
  const InverseRegressor b = train_inverse_regressor(pairs, hyper);
  CHECK(same_params(a, b));
  CHECK(a.initial_epoch_loss == b.initial_epoch_loss);
  CHECK(a.final_epoch_loss == b.final_epoch_loss);
}

TEST_CASE("training reduces the epoch loss") {
  TrainHyper hyper;
  hyper.epochs = 12;
  hyper.seed = 4;
  const InverseRegressor model = train_inverse_regressor(make_pairs(48, 2), hyper);
  CHECK(model.trained);
  CHECK(model.initial_epoch_loss > 0.0);
  CHECK(model.final_epoch_loss < model.initial_epoch_loss);
}

TEST_CASE("too few training pairs are rejected") {
  CHECK_THROWS_AS(train_inverse_regressor(make_pairs(31, 1)), InsufficientData);
  CHECK_THROWS_AS(train_inverse_regressor({}), InsufficientData);
}

TEST_CASE("apply_inverse preserves stream shape and timestamps") {
  TrainHyper hyper;
  hyper.epochs = 2;
  hyper.seed = 1;
  const InverseRegressor model = train_inverse_regressor(make_pairs(32, 3), hyper);

  Rng rng(30);
  GazeStream s;
  s.nominal_rate_hz = 125.0;
  s.user_id = "u0";
  for (std::size_t i = 0; i < 700; ++i) {
    s.samples.push_back({rng.normal(), rng.normal(), static_cast<double>(i) / 125.0});
  }
  const GazeStream out = apply_inverse(model, s);
  REQUIRE(out.size() == 700);
  CHECK(out.user_id == "u0");
  for (std::size_t i = 0; i < 700; ++i) {
    CHECK(out.samples[i].timestamp_s == s.samples[i].timestamp_s);
  }

  GazeStream exact = s;
  exact.samples.resize(625);
  CHECK(apply_inverse(model, exact).size() == 625);
}

TEST_CASE("applying an untrained model is an error") {
  const InverseRegressor model = init_inverse_regressor(0);
  GazeStream s;
  s.nominal_rate_hz = 125.0;
  for (std::size_t i = 0; i < 625; ++i) {
    s.samples.push_back({0.0, 0.0, static_cast<double>(i) / 125.0});
  }
  CHECK_THROWS_AS(apply_inverse(model, s), ModelNotTrained);
}

TEST_CASE("save and load round trip reproduces the model outputs exactly") {
  TrainHyper hyper;
  hyper.epochs = 2;
  hyper.seed = 17;
  const InverseRegressor model = train_inverse_regressor(make_pairs(32, 9), hyper);

  const std::string path = "inverse_roundtrip.bin";
  save_regressor(model, path);
  const InverseRegressor back = load_regressor(path);
  std::remove(path.c_str());
  std::remove((path + ".json").c_str());

  CHECK(same_params(model, back));
  CHECK(back.trained);
  CHECK(back.input_mean == model.input_mean);
  CHECK(back.input_scale == model.input_scale);
  CHECK(back.target_mean == model.target_mean);
  CHECK(back.target_scale == model.target_scale);

  Rng rng(40);
  GazeStream s;
  s.nominal_rate_hz = 125.0;
  for (std::size_t i = 0; i < 625; ++i) {
    s.samples.push_back({rng.normal(), rng.normal(), static_cast<double>(i) / 125.0});
  }
  const GazeStream via_model = apply_inverse(model, s);
  const GazeStream via_file = apply_inverse(back, s);
  for (std::size_t i = 0; i < 625; ++i) {
    CHECK(via_file.samples[i].theta_deg == via_model.samples[i].theta_deg);
    CHECK(via_file.samples[i].psi_deg == via_model.samples[i].psi_deg);
  }
}

TEST_CASE("loading a missing file reports the path") {
  CHECK_THROWS_AS(load_regressor("no_such_model.bin"), Error);
}
