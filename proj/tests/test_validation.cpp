#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <gazeguard/errors.hpp>
#include <gazeguard/stream_ops.hpp>
#include <gazeguard/types.hpp>
#include <gazeguard/validation.hpp>

using namespace gazeguard;

namespace {

// Recording that follows the schedule. look_back_s > 0 makes the gaze dwell
// on the previous target for that long after each switch.
GazeStream follow_schedule(const ValidationSchedule& sched, double rate_hz,
                           double offset_theta = 0.0, double offset_psi = 0.0,
                           double look_back_s = 0.0) {
  GazeStream s;
  s.nominal_rate_hz = rate_hz;
  const double total = sched.start_s + sched.dwell_s * sched.order.size();
  const std::size_t n = static_cast<std::size_t>(std::llround(total * rate_hz));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    int slot = static_cast<int>((t - sched.start_s) / sched.dwell_s);
    if (slot < 0) slot = 0;
    if (slot >= static_cast<int>(sched.order.size())) {
      slot = static_cast<int>(sched.order.size()) - 1;
    }
    const double into = t - sched.start_s - slot * sched.dwell_s;
    if (slot > 0 && into < look_back_s) slot -= 1;
    const GazeSample c = sched.target_center(sched.order[slot]);
    s.samples.push_back({c.theta_deg + offset_theta, c.psi_deg + offset_psi, t});
  }
  return s;
}

}  // namespace

TEST_CASE("default schedule cycles all nine targets on the 3x3 grid") {
  const ValidationSchedule sched = default_schedule();
  REQUIRE(sched.order.size() == 9);
  CHECK(sched.grid_span_deg == doctest::Approx(38.58));
  CHECK(sched.dwell_s == 2.0);
  const GazeSample center = sched.target_center(4);
  CHECK(center.theta_deg == doctest::Approx(0.0));
  CHECK(center.psi_deg == doctest::Approx(0.0));
  const GazeSample corner = sched.target_center(0);
  CHECK(corner.theta_deg == doctest::Approx(-38.58 / 2.0));
  CHECK(corner.psi_deg == doctest::Approx(-38.58 / 2.0));
  const GazeSample opposite = sched.target_center(8);
  CHECK(opposite.theta_deg == doctest::Approx(38.58 / 2.0));
  CHECK(opposite.psi_deg == doctest::Approx(38.58 / 2.0));
  CHECK_NOTHROW(sched.check());
}

TEST_CASE("perfect recording validates at zero error") {
  const ValidationSchedule sched = default_schedule();
  const ValidationReport r = validation_error(follow_schedule(sched, 72.0), sched);
  CHECK(r.mean_deg == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(r.std_deg == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(r.per_target.size() == 8);  // first target discarded
  CHECK(r.n_samples > 0);
}

TEST_CASE("constant 2 degree vertical offset validates at exactly 2 degrees") {
  // A fixed psi offset moves the gaze 2 degrees along a meridian, which is a
  // great circle, so the angular error is exactly 2 at every target.
  const ValidationSchedule sched = default_schedule();
  const ValidationReport r =
      validation_error(follow_schedule(sched, 72.0, 0.0, 2.0), sched);
  CHECK(r.mean_deg == doctest::Approx(2.0).scale(1.0).epsilon(1e-9));
  CHECK(r.std_deg == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  for (const TargetError& t : r.per_target) {
    CHECK(t.mean_deg == doctest::Approx(2.0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("constant 2 degree horizontal offset on the equatorial row") {
  // theta circles are great circles only at psi = 0, so the horizontal-offset
  // case is pinned down on the middle row of the grid.
  ValidationSchedule sched = default_schedule();
  sched.order = {4, 3, 5, 4};
  const ValidationReport r =
      validation_error(follow_schedule(sched, 72.0, 2.0), sched);
  CHECK(r.mean_deg == doctest::Approx(2.0).scale(1.0).epsilon(1e-9));
  CHECK(r.std_deg == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("off-equator horizontal offsets shrink by the latitude cosine") {
  const ValidationSchedule sched = default_schedule();
  const ValidationReport r =
      validation_error(follow_schedule(sched, 72.0, 2.0), sched);
  CHECK(r.mean_deg < 2.0);
  CHECK(r.mean_deg > 2.0 * std::cos(sched.grid_span_deg / 2.0 * M_PI / 180.0));
}

TEST_CASE("adding a fixed offset moves the mean by at most that offset") {
  const ValidationSchedule sched = default_schedule();
  const double base =
      validation_error(follow_schedule(sched, 72.0, 2.0), sched).mean_deg;
  const double shifted =
      validation_error(follow_schedule(sched, 72.0, 2.0, 1.0), sched).mean_deg;
  CHECK(shifted >= base - 1.0 - 1e-12);
  CHECK(shifted <= base + 1.0 + 1e-12);
}

TEST_CASE("median-second masking excludes target transitions") {
  const ValidationSchedule sched = default_schedule();
  // Gaze lags on the previous target for 0.4 s of every window; the retained
  // [0.5 s, 1.5 s) interval never sees it.
  const ValidationReport r =
      validation_error(follow_schedule(sched, 72.0, 0.0, 0.0, 0.4), sched);
  CHECK(r.mean_deg == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("recording shorter than the schedule is insufficient") {
  const ValidationSchedule sched = default_schedule();
  GazeStream s = follow_schedule(sched, 72.0);
  s.samples.resize(s.samples.size() / 3);
  CHECK_THROWS_AS(validation_error(s, sched), InsufficientData);
  CHECK_THROWS_AS(validation_error(GazeStream{}, sched), InsufficientData);
}

TEST_CASE("recording spanning the schedule but missing every window is insufficient") {
  const ValidationSchedule sched = default_schedule();
  GazeStream s;
  s.nominal_rate_hz = 72.0;
  s.samples.push_back({0.0, 0.0, 0.0});
  s.samples.push_back({0.0, 0.0, 30.0});
  CHECK_THROWS_AS(validation_error(s, sched), InsufficientData);
}

TEST_CASE("schedule sanity checks") {
  ValidationSchedule bad = default_schedule();
  bad.order = {0, 9};
  CHECK_THROWS_AS(bad.check(), InvalidParameter);
  bad = default_schedule();
  bad.order = {3};
  CHECK_THROWS_AS(bad.check(), InvalidParameter);
  bad = default_schedule();
  bad.dwell_s = 0.5;
  CHECK_THROWS_AS(bad.check(), InvalidParameter);
}

TEST_CASE("schedule JSON round trip") {
  ValidationSchedule sched = default_schedule();
  sched.order = {4, 0, 8, 2, 6};
  const ValidationSchedule back = schedule_from_json(schedule_to_json(sched));
  CHECK(back.grid_span_deg == doctest::Approx(sched.grid_span_deg));
  CHECK(back.dwell_s == sched.dwell_s);
  CHECK(back.order == sched.order);
  CHECK_THROWS_AS(schedule_from_json("nonsense"), ParseError);
  CHECK_THROWS_AS(schedule_from_json("{\"dwell_s\": 2}"), SchemaError);
}
