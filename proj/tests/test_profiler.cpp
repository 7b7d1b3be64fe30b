#include "doctest.h"

#include "regrid/error.hpp"
#include "regrid/profiler.hpp"

using namespace regrid;

namespace {

performance_record rec(proc_grid g, double t, int iter) {
  performance_record r;
  r.config = g;
  r.iteration_time = t;
  r.iteration = iter;
  return r;
}

}  // namespace

TEST_CASE("an expansion counts as improved only when time strictly drops") {
  profiler prof(0.0);
  prof.register_job("j");
  CHECK(prof.expansion_improved("j"));  // vacuously true before any expansion

  prof.record("j", rec(make_grid(1, 2), 100.0, 1));
  prof.record("j", rec(make_grid(2, 2), 60.0, 2));
  CHECK(prof.expansion_improved("j"));

  prof.record("j", rec(make_grid(2, 4), 60.0, 3));  // flat: not an improvement
  CHECK_FALSE(prof.expansion_improved("j"));
}

TEST_CASE("the improvement threshold discounts tiny gains") {
  profiler prof(5.0);
  prof.register_job("j");
  prof.record("j", rec(make_grid(1, 2), 100.0, 1));
  prof.record("j", rec(make_grid(2, 2), 96.0, 2));  // saves 4 < 5
  CHECK_FALSE(prof.expansion_improved("j"));
}

TEST_CASE("shrink points list previously visited smaller configurations, largest first") {
  profiler prof(0.0);
  prof.register_job("j");
  prof.record("j", rec(make_grid(1, 2), 100.0, 1));
  prof.record("j", rec(make_grid(2, 2), 60.0, 2));
  prof.record("j", rec(make_grid(2, 4), 40.0, 3));
  prof.record("j", rec(make_grid(4, 4), 30.0, 4));

  auto points = prof.shrink_points("j");
  REQUIRE(points.size() == 3);
  CHECK(points[0].config == make_grid(2, 4));
  CHECK(points[0].relinquishable == 8);
  CHECK(points[0].expected_degradation == doctest::Approx(10.0));
  CHECK(points[1].config == make_grid(2, 2));
  CHECK(points[1].relinquishable == 12);
  CHECK(points[1].expected_degradation == doctest::Approx(30.0));
  CHECK(points[2].config == make_grid(1, 2));
  CHECK(points[2].relinquishable == 14);
}

TEST_CASE("best time per configuration keeps the minimum observed") {
  profiler prof(0.0);
  prof.register_job("j");
  prof.record("j", rec(make_grid(2, 2), 60.0, 1));
  prof.record("j", rec(make_grid(2, 2), 55.0, 2));
  prof.record("j", rec(make_grid(2, 2), 58.0, 3));
  CHECK(*prof.best_time("j", make_grid(2, 2)) == doctest::Approx(55.0));
  CHECK_FALSE(prof.best_time("j", make_grid(4, 4)).has_value());
}

TEST_CASE("a failed probe followed by a return marks the sweet spot") {
  profiler prof(0.0);
  prof.register_job("j");
  prof.record("j", rec(make_grid(2, 2), 60.0, 1));
  prof.record("j", rec(make_grid(2, 4), 40.0, 2));   // improved
  prof.record("j", rec(make_grid(4, 4), 40.0, 3));   // flat probe
  CHECK(prof.sweet_spot("j").status == spot_status::probing);

  prof.record("j", rec(make_grid(2, 4), 40.0, 4));   // returned
  auto s = prof.sweet_spot("j");
  CHECK(s.status == spot_status::at_sweet_spot);
  CHECK(s.config == make_grid(2, 4));
}

TEST_CASE("a forced shrink below the sweet spot does not unlearn it") {
  profiler prof(0.0);
  prof.register_job("j");
  prof.record("j", rec(make_grid(2, 2), 60.0, 1));
  prof.record("j", rec(make_grid(2, 4), 40.0, 2));
  prof.record("j", rec(make_grid(4, 4), 40.0, 3));
  prof.record("j", rec(make_grid(2, 4), 40.0, 4));   // sweet spot at 2x4
  prof.record("j", rec(make_grid(2, 2), 60.0, 5));   // forced below it
  auto s = prof.sweet_spot("j");
  CHECK(s.status == spot_status::at_sweet_spot);
  CHECK(s.config == make_grid(2, 4));
}

TEST_CASE("resetting the sweet spot restarts the search") {
  profiler prof(0.0);
  prof.register_job("j");
  prof.record("j", rec(make_grid(2, 2), 60.0, 1));
  prof.record("j", rec(make_grid(2, 4), 40.0, 2));
  prof.record("j", rec(make_grid(4, 4), 40.0, 3));
  prof.record("j", rec(make_grid(2, 4), 40.0, 4));
  REQUIRE(prof.sweet_spot("j").status == spot_status::at_sweet_spot);

  prof.reset_sweet_spot("j");
  CHECK(prof.sweet_spot("j").status == spot_status::probing);

  // The pattern must recur after the reset to re-establish the spot.
  prof.record("j", rec(make_grid(4, 4), 40.0, 5));
  prof.record("j", rec(make_grid(2, 4), 40.0, 6));
  CHECK(prof.sweet_spot("j").status == spot_status::at_sweet_spot);
}

TEST_CASE("profiler rejects unknown and duplicate jobs") {
  profiler prof(0.0);
  prof.register_job("j");
  CHECK_THROWS_AS(prof.record("ghost", rec(make_grid(1, 2), 1.0, 1)), error);
  CHECK_THROWS_AS(prof.register_job("j"), error);
}
