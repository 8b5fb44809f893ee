#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <gazeguard/embedding.hpp>
#include <gazeguard/errors.hpp>
#include <gazeguard/rng.hpp>
#include <gazeguard/types.hpp>
#include <string>

using namespace gazeguard;

namespace {

Segment make_segment() {
  Segment s;
  s.theta.assign(kSegmentLength, 0.0);
  s.psi.assign(kSegmentLength, 0.0);
  s.rate_hz = kSegmentRateHz;
  return s;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("static segment embeds to zero motion features") {
  Segment s = make_segment();
  for (auto& v : s.theta) v = 4.25;
  for (auto& v : s.psi) v = -1.5;
  const Embedding e = embed_statistical(s);
  REQUIRE(e.dim() == kStatisticalEmbeddingDim);
  CHECK(e.values[0] == doctest::Approx(4.25));    // mean theta
  CHECK(e.values[1] == doctest::Approx(0.0));     // std theta
  CHECK(e.values[2] == doctest::Approx(-1.5));    // mean psi
  CHECK(e.values[3] == doctest::Approx(0.0));     // std psi
  for (int i = 4; i <= 17; ++i) {
    CHECK(e.values[i] == doctest::Approx(0.0));   // speed and accel profiles
  }
  CHECK(e.values[18] == doctest::Approx(1.0));    // fixation ratio
  CHECK(e.values[19] == doctest::Approx(0.0));    // saccade count
  CHECK(e.values[20] == doctest::Approx(0.0));    // inter-crossing interval
  for (int i = 21; i <= 28; ++i) {
    CHECK(e.values[i] == doctest::Approx(0.0));   // direction histogram
  }
  CHECK(e.values[29] == doctest::Approx(0.0));    // jerk
  CHECK(e.values[30] == doctest::Approx(0.0));    // net drift theta
  CHECK(e.values[31] == doctest::Approx(0.0));    // net drift psi
}

TEST_CASE("embedding the same segment twice is deterministic") {
  Rng rng(5);
  Segment s = make_segment();
  for (auto& v : s.theta) v = rng.uniform(-10.0, 10.0);
  for (auto& v : s.psi) v = rng.uniform(-10.0, 10.0);
  const Embedding a = embed_statistical(s);
  const Embedding b = embed_statistical(s);
  REQUIRE(a.dim() == b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    CHECK(a.values[i] == b.values[i]);
  }
}

TEST_CASE("10 deg/s ramp produces exact speed features") {
  Segment s = make_segment();
  for (std::size_t i = 0; i < kSegmentLength; ++i) {
    s.theta[i] = 10.0 * static_cast<double>(i) / 125.0;
  }
  const Embedding e = embed_statistical(s);
  CHECK(e.values[4] == doctest::Approx(10.0).scale(1.0).epsilon(1e-6));   // mean speed
  CHECK(e.values[5] == doctest::Approx(0.0).scale(1e-6));                 // std speed
  CHECK(e.values[10] == doctest::Approx(10.0).scale(1.0).epsilon(1e-6));  // max speed
  CHECK(e.values[18] == doctest::Approx(1.0));                          // below 20 deg/s
  CHECK(e.values[19] == doctest::Approx(0.0));                          // no crossings
  CHECK(e.values[17] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));  // max accel
  CHECK(e.values[30] == doctest::Approx(10.0 * 624.0 / 125.0).epsilon(1e-9));
}

TEST_CASE("ramp direction lands fully in one histogram bin") {
  Segment s = make_segment();
  for (std::size_t i = 0; i < kSegmentLength; ++i) {
    s.theta[i] = 5.0 * static_cast<double>(i) / 125.0;  // pure +theta motion
  }
  const Embedding e = embed_statistical(s);
  double hist_sum = 0.0;
  for (int i = 21; i <= 28; ++i) hist_sum += e.values[i];
  CHECK(hist_sum == doctest::Approx(1.0).epsilon(1e-9));
  double hist_max = 0.0;
  for (int i = 21; i <= 28; ++i) hist_max = std::max(hist_max, e.values[i]);
  CHECK(hist_max == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("embed rejects wrong segment length") {
  Segment s;
  s.theta.assign(100, 0.0);
  s.psi.assign(100, 0.0);
  CHECK_THROWS_AS(embed_statistical(s), InvalidSegment);
}

TEST_CASE("zscore is fitted on the reference and applied to both sets") {
  Rng rng(6);
  EmbeddingSet ref;
  ref.role = SetRole::Reference;
  for (int i = 0; i < 50; ++i) {
    Embedding e;
    e.user_id = "r";
    for (int d = 0; d < 4; ++d) e.values.push_back(rng.normal(5.0, 2.0));
    e.values.push_back(7.0);  // constant dimension
    ref.records.push_back(e);
  }
  const ZScore z = fit_zscore(ref);
  EmbeddingSet normalized = ref;
  apply_zscore(normalized, z);
  for (int d = 0; d < 4; ++d) {
    double mean = 0.0;
    double var = 0.0;
    for (const auto& e : normalized.records) mean += e.values[d];
    mean /= 50.0;
    for (const auto& e : normalized.records) {
      var += (e.values[d] - mean) * (e.values[d] - mean);
    }
    var /= 50.0;
    CHECK(mean == doctest::Approx(0.0).scale(1e-9));
    CHECK(std::sqrt(var) == doctest::Approx(1.0).epsilon(1e-6));
  }
  // Constant dimension: centered, not rescaled.
  CHECK(normalized.records[0].values[4] == doctest::Approx(0.0).scale(1e-12));
}

TEST_CASE("embedding set dimension checks") {
  EmbeddingSet set;
  CHECK_THROWS_AS(set.dim(), EmptySet);
  Embedding a;
  a.values = {1.0, 2.0};
  Embedding b;
  b.values = {1.0, 2.0, 3.0};
  set.records = {a, b};
  CHECK_THROWS_AS(set.dim(), DimensionMismatch);
  set.records = {a, a};
  CHECK(set.dim() == 2);
}

TEST_CASE("embedding CSV round trip") {
  const std::string path = temp_path("gg_emb_roundtrip.csv");
  EmbeddingSet set;
  Rng rng(7);
  for (int i = 0; i < 3; ++i) {
    Embedding e;
    e.user_id = "user00" + std::to_string(i);
    e.trial_id = i + 1;
    e.segment_index = static_cast<std::size_t>(i);
    for (int d = 0; d < 4; ++d) e.values.push_back(rng.uniform(-2.0, 2.0));
    set.records.push_back(e);
  }
  save_embeddings(set, path);
  const EmbeddingSet back = load_embeddings(path);
  REQUIRE(back.size() == 3);
  CHECK(back.dim() == 4);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.records[i].user_id == set.records[i].user_id);
    CHECK(back.records[i].trial_id == set.records[i].trial_id);
    CHECK(back.records[i].segment_index == set.records[i].segment_index);
    for (int d = 0; d < 4; ++d) {
      CHECK(back.records[i].values[d] ==
            doctest::Approx(set.records[i].values[d]).scale(1.0).epsilon(1e-8));
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("loading an empty embedding file raises EmptySet") {
  const std::string path = temp_path("gg_emb_empty.csv");
  std::ofstream(path) << "user_id,trial_id,segment_index,e0\n";
  CHECK_THROWS_AS(load_embeddings(path), EmptySet);
  std::filesystem::remove(path);
}

TEST_CASE("loading a NaN row raises ParseError naming the row") {
  const std::string path = temp_path("gg_emb_nan.csv");
  std::ofstream(path) << "user_id,trial_id,segment_index,e0,e1\n"
                      << "u1,1,0,0.5,0.5\n"
                      << "u1,1,1,NaN,0.5\n";
  try {
    load_embeddings(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  std::filesystem::remove(path);
}
