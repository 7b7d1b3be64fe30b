#include "doctest.h"

#include "regrid/error.hpp"
#include "regrid/resched.hpp"

using namespace regrid;

namespace {

job_spec spec_of(const std::string& id, double arrival, std::vector<proc_grid> ladder,
                 int iterations = 10) {
  job_spec s;
  s.id = id;
  s.arrival = arrival;
  s.ladder.configs = std::move(ladder);
  s.initial_config = s.ladder.configs.front();
  s.total_iterations = iterations;
  return s;
}

performance_record perf(proc_grid g, double t, int iter) {
  performance_record r;
  r.config = g;
  r.iteration_time = t;
  r.iteration = iter;
  return r;
}

struct rig {
  profiler prof{0.0};
  remap_scheduler sched;
  explicit rig(int cluster, sched_policy policy = sched_policy::backfill)
      : sched(cluster, policy, prof) {}

  void start(const job_spec& s, double now) {
    sched.submit(s, now);
    for (const std::string& id : sched.admit(now))
      sched.begin_execution(id);
    sched.audit();
  }
};

}  // namespace

TEST_CASE("admission hands out the lowest free node ids") {
  rig r(8);
  r.start(spec_of("a", 0, {make_grid(1, 4)}), 0);
  CHECK(r.sched.job("a").nodes == std::vector<int>{0, 1, 2, 3});
  r.start(spec_of("b", 1, {make_grid(1, 3)}), 1);
  CHECK(r.sched.job("b").nodes == std::vector<int>{4, 5, 6});
  CHECK(r.sched.idle_nodes() == 1);
}

TEST_CASE("fcfs blocks behind the queue head, backfill does not") {
  auto run = [](sched_policy policy) {
    rig r(8, policy);
    r.start(spec_of("small1", 0, {make_grid(1, 4)}), 0);
    r.start(spec_of("big", 1, {make_grid(2, 4)}), 1);     // needs all 8, waits
    r.start(spec_of("small2", 2, {make_grid(1, 2)}), 2);  // fits in the 4 idle
    return r.sched.job("small2").state;
  };
  CHECK(run(sched_policy::fcfs) == job_state::queued);
  CHECK(run(sched_policy::backfill) == job_state::running);
}

TEST_CASE("backfill never reorders jobs that both fit") {
  rig r(8);
  r.start(spec_of("hold", 0, {make_grid(1, 6)}), 0);
  r.sched.submit(spec_of("first", 1, {make_grid(1, 2)}), 1);
  r.sched.submit(spec_of("second", 1, {make_grid(1, 1)}), 1);
  auto started = r.sched.admit(1);
  REQUIRE(started.size() == 1);
  CHECK(started[0] == "first");  // the head starts; nothing jumped it
}

TEST_CASE("a job expands one rung when idle nodes exist and it still improves") {
  rig r(16);
  r.start(spec_of("j", 0, {make_grid(1, 2), make_grid(2, 2), make_grid(2, 4)}), 0);

  resize_decision d = r.sched.remap_decision("j", perf(make_grid(1, 2), 100, 1), 10);
  CHECK(d.action == resize_action::expand);
  CHECK(d.target == make_grid(2, 2));
  CHECK(d.node_list == std::vector<int>{2, 3});
  CHECK(d.reason == "probe");
  r.sched.audit();  // granted nodes count as held during redistribution
  r.sched.on_resize_complete("j", 11);
  CHECK(r.sched.job("j").config == make_grid(2, 2));
  CHECK(r.sched.job("j").nodes == std::vector<int>{0, 1, 2, 3});
  r.sched.audit();
}

TEST_CASE("a failed probe falls back before any queue considerations") {
  rig r(16);
  r.start(spec_of("j", 0, {make_grid(1, 2), make_grid(2, 2)}), 0);
  r.sched.remap_decision("j", perf(make_grid(1, 2), 100, 1), 10);
  r.sched.on_resize_complete("j", 10);

  // Another job queues meanwhile; the failed probe still wins.
  r.sched.submit(spec_of("waiter", 11, {make_grid(4, 4)}), 11);
  resize_decision d = r.sched.remap_decision("j", perf(make_grid(2, 2), 100, 2), 110);
  CHECK(d.action == resize_action::shrink);
  CHECK(d.target == make_grid(1, 2));
  CHECK(d.reason == "no_improvement");
  CHECK(d.node_list == std::vector<int>{2, 3});  // highest ids go back
  r.sched.on_resize_complete("j", 111);
  CHECK(r.sched.job("j").nodes == std::vector<int>{0, 1});
  r.sched.audit();
}

TEST_CASE("a waiting job forces the smallest sufficient shrink") {
  rig r(12);
  r.start(spec_of("j", 0, {make_grid(1, 2), make_grid(2, 2), make_grid(2, 4)}), 0);
  r.sched.remap_decision("j", perf(make_grid(1, 2), 100, 1), 10);
  r.sched.on_resize_complete("j", 10);
  r.sched.remap_decision("j", perf(make_grid(2, 2), 60, 2), 70);
  r.sched.on_resize_complete("j", 70);
  // j runs on 2x4 = 8 nodes, 4 idle. A job needing 8 queues.
  r.sched.submit(spec_of("waiter", 71, {make_grid(2, 4)}), 71);

  // Largest visited config that frees enough: 2x2 (frees 4, 4+4 >= 8).
  resize_decision d = r.sched.remap_decision("j", perf(make_grid(2, 4), 40, 3), 110);
  CHECK(d.action == resize_action::shrink);
  CHECK(d.target == make_grid(2, 2));
  CHECK(d.reason == "queued_head");
  r.sched.on_resize_complete("j", 111);
  auto started = r.sched.admit(111);
  REQUIRE(started.size() == 1);
  CHECK(started[0] == "waiter");
  r.sched.audit();
}

TEST_CASE("when no shrink can help, the job gives back all it can") {
  rig r(10);
  r.start(spec_of("j", 0, {make_grid(1, 2), make_grid(2, 2), make_grid(2, 4)}), 0);
  r.sched.remap_decision("j", perf(make_grid(1, 2), 100, 1), 10);
  r.sched.on_resize_complete("j", 10);
  r.sched.remap_decision("j", perf(make_grid(2, 2), 60, 2), 70);
  r.sched.on_resize_complete("j", 70);
  r.sched.submit(spec_of("hog", 71, {make_grid(2, 5)}), 71);  // needs the full cluster

  resize_decision d = r.sched.remap_decision("j", perf(make_grid(2, 4), 40, 3), 110);
  CHECK(d.action == resize_action::shrink);
  CHECK(d.target == make_grid(1, 2));  // smallest visited
  CHECK(d.reason == "queued_insufficient");
}

TEST_CASE("a job with no smaller history stalls instead of shrinking") {
  rig r(8);
  r.start(spec_of("j", 0, {make_grid(1, 4), make_grid(2, 4)}), 0);
  r.sched.submit(spec_of("waiter", 1, {make_grid(2, 3)}), 1);
  resize_decision d = r.sched.remap_decision("j", perf(make_grid(1, 4), 50, 1), 50);
  CHECK(d.action == resize_action::continue_run);
  CHECK(d.reason == "stall");
}

TEST_CASE("expansion is withheld without improvement, idle nodes, or ladder room") {
  rig r(6);
  r.start(spec_of("top", 0, {make_grid(1, 2)}), 0);
  CHECK(r.sched.remap_decision("top", perf(make_grid(1, 2), 50, 1), 10).reason ==
        "at_maximum");

  rig r2(4);
  r2.start(spec_of("tight", 0, {make_grid(1, 2), make_grid(2, 2), make_grid(2, 3)}), 0);
  r2.sched.remap_decision("tight", perf(make_grid(1, 2), 100, 1), 10);
  r2.sched.on_resize_complete("tight", 10);
  // 0 idle nodes remain; improvement alone is not enough.
  CHECK(r2.sched.remap_decision("tight", perf(make_grid(2, 2), 50, 2), 60).reason ==
        "insufficient_idle");
}

TEST_CASE("job lifecycle bookkeeping") {
  rig r(8);
  CHECK_THROWS_AS(r.sched.job("nobody"), error);
  job_spec s = spec_of("j", 0, {make_grid(1, 2)});
  r.start(s, 0);
  CHECK_THROWS_AS(r.sched.submit(s, 1), error);  // duplicate id

  job_spec big = spec_of("big", 0, {make_grid(3, 3)});
  CHECK_THROWS_AS(r.sched.submit(big, 1), error);  // exceeds the cluster

  r.sched.on_job_end("j", false, 100);
  CHECK(r.sched.job("j").state == job_state::finished);
  CHECK(r.sched.job("j").nodes.empty());
  CHECK(r.sched.idle_nodes() == 8);
  CHECK_THROWS_AS(r.sched.remap_decision("j", perf(make_grid(1, 2), 1, 1), 101), error);
  r.sched.audit();
}

TEST_CASE("decision log captures the context of every choice") {
  rig r(16);
  r.start(spec_of("j", 0, {make_grid(1, 2), make_grid(2, 2)}), 0);
  r.sched.remap_decision("j", perf(make_grid(1, 2), 100, 1), 10);
  REQUIRE(r.sched.decision_log().size() == 1);
  const decision_record& d = r.sched.decision_log().front();
  CHECK(d.job_id == "j");
  CHECK(d.time == 10);
  CHECK(d.action == resize_action::expand);
  CHECK(d.from == make_grid(1, 2));
  CHECK(d.to == make_grid(2, 2));
  CHECK(d.idle_before == 14);
  CHECK(d.queue_length == 0);
  CHECK(d.improved);
  CHECK_FALSE(d.sweet);
}
