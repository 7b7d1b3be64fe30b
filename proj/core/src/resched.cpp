#include "regrid/resched.hpp"

#include <algorithm>

namespace regrid {

const char* job_state_name(job_state s) {
  switch (s) {
    case job_state::queued: return "queued";
    case job_state::starting: return "starting";
    case job_state::running: return "running";
    case job_state::at_resize_point: return "at_resize_point";
    case job_state::redistributing: return "redistributing";
    case job_state::finished: return "finished";
    case job_state::failed: return "failed";
  }
  return "unknown";
}

const char* resize_action_name(resize_action a) {
  switch (a) {
    case resize_action::continue_run: return "continue";
    case resize_action::expand: return "expand";
    case resize_action::shrink: return "shrink";
  }
  return "unknown";
}

remap_scheduler::remap_scheduler(int cluster_size, sched_policy policy, profiler& prof)
    : cluster_size_(cluster_size), policy_(policy), prof_(prof) {
  if (cluster_size < 1) fail(errc::bad_spec, "cluster must have at least one node");
  for (int n = 0; n < cluster_size; ++n) free_.insert(n);
}

job_record& remap_scheduler::get(const std::string& job_id) {
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) fail(errc::unknown_job, job_id);
  return it->second;
}

const job_record& remap_scheduler::get(const std::string& job_id) const {
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) fail(errc::unknown_job, job_id);
  return it->second;
}

void remap_scheduler::submit(const job_spec& spec, double now) {
  if (jobs_.count(spec.id)) fail(errc::duplicate_job, spec.id);
  if (spec.total_iterations < 1) fail(errc::bad_spec, spec.id + ": needs at least one iteration");
  if (spec.ladder.empty()) fail(errc::bad_spec, spec.id + ": empty configuration ladder");
  if (!spec.ladder.contains(spec.initial_config))
    fail(errc::bad_spec, spec.id + ": initial configuration " + to_string(spec.initial_config) +
                             " is not a ladder member");
  for (std::size_t i = 1; i < spec.ladder.size(); ++i) {
    if (spec.ladder.at(i).total() <= spec.ladder.at(i - 1).total())
      fail(errc::bad_spec, spec.id + ": ladder totals must strictly increase");
  }
  if (spec.initial_config.total() > cluster_size_)
    fail(errc::no_feasible_allocation,
         spec.id + " needs " + std::to_string(spec.initial_config.total()) + " nodes, cluster has " +
             std::to_string(cluster_size_));

  job_record job;
  job.spec = spec;
  job.submit_time = now;
  jobs_.emplace(spec.id, std::move(job));
  queue_.push_back(spec.id);
  if (!prof_.has_job(spec.id)) prof_.register_job(spec.id);
}

std::vector<int> remap_scheduler::take_nodes(int count) {
  std::vector<int> taken;
  taken.reserve(static_cast<std::size_t>(count));
  auto it = free_.begin();
  for (int i = 0; i < count; ++i) {
    taken.push_back(*it);
    it = free_.erase(it);
  }
  return taken;
}

void remap_scheduler::release_nodes(std::vector<int>& nodes, int count) {
  for (int i = 0; i < count; ++i) {
    free_.insert(nodes.back());
    nodes.pop_back();
  }
}

void remap_scheduler::start_job(job_record& job, double now) {
  job.nodes = take_nodes(job.spec.initial_config.total());
  job.config = job.spec.initial_config;
  job.state = job_state::starting;
  job.start_time = now;
}

std::vector<std::string> remap_scheduler::admit(double now) {
  std::vector<std::string> started;
  while (!queue_.empty()) {
    auto& head = get(queue_.front());
    if (head.spec.initial_config.total() > idle_nodes()) break;
    start_job(head, now);
    started.push_back(queue_.front());
    queue_.pop_front();
  }
  if (policy_ == sched_policy::backfill) {
    for (auto it = queue_.begin(); it != queue_.end();) {
      auto& job = get(*it);
      if (job.spec.initial_config.total() <= idle_nodes()) {
        start_job(job, now);
        started.push_back(*it);
        it = queue_.erase(it);
      } else {
        ++it;
      }
    }
  }
  return started;
}

void remap_scheduler::begin_execution(const std::string& job_id) {
  auto& job = get(job_id);
  if (job.state != job_state::starting)
    fail(errc::bad_spec, job_id + " is " + job_state_name(job.state) + ", expected starting");
  job.state = job_state::running;
}

resize_decision remap_scheduler::remap_decision(const std::string& job_id,
                                                const performance_record& perf, double now) {
  auto& job = get(job_id);
  if (job.state != job_state::running)
    fail(errc::not_at_resize_point, job_id + " is " + job_state_name(job.state));
  job.state = job_state::at_resize_point;
  prof_.record(job_id, perf);

  decision_record log;
  log.time = now;
  log.job_id = job_id;
  log.from = job.config;
  log.idle_before = idle_nodes();
  log.queue_length = static_cast<int>(queue_.size());
  log.improved = prof_.expansion_improved(job_id);
  auto sweet = prof_.sweet_spot(job_id);
  log.sweet = sweet.status == spot_status::at_sweet_spot;

  resize_decision decision;
  auto settle = [&](resize_action action, const proc_grid& target, std::vector<int> node_list,
                    const std::string& reason) {
    decision.action = action;
    decision.target = action == resize_action::continue_run ? job.config : target;
    decision.node_list = std::move(node_list);
    decision.reason = reason;
    log.action = action;
    log.to = action == resize_action::continue_run ? job.config : target;
    log.reason = reason;
    log_.push_back(log);
    if (action == resize_action::continue_run) {
      job.state = job_state::running;
    } else {
      job.state = job_state::redistributing;
      job.resize_is_expand = action == resize_action::expand;
      job.resize_target = target;
      job.resize_nodes = decision.node_list;
      if (action == resize_action::expand) {
        job.probe_pending = true;
        job.probe_from = job.config;
        // Granted nodes are occupied from the decision on; the data spreads
        // onto them during redistribution.
        job.nodes.insert(job.nodes.end(), job.resize_nodes.begin(), job.resize_nodes.end());
        std::sort(job.nodes.begin(), job.nodes.end());
      }
    }
    return decision;
  };

  // (a) The previous resize was an expansion and the first iteration on the
  // larger grid shows no improvement: fall straight back.
  if (job.probe_pending) {
    job.probe_pending = false;
    if (!prof_.expansion_improved(job_id)) {
      proc_grid back = job.probe_from;
      int count = job.config.total() - back.total();
      std::vector<int> release(job.nodes.end() - count, job.nodes.end());
      return settle(resize_action::shrink, back, std::move(release), "no_improvement");
    }
  }

  // (b) Jobs are waiting: shrink to the largest previously visited
  // configuration that frees enough nodes for the queue head; if none does,
  // shrink to the smallest visited configuration and wait.
  if (!queue_.empty()) {
    const auto& head = get(queue_.front());
    int needed = head.spec.initial_config.total();
    auto points = prof_.shrink_points(job_id);  // largest first
    for (const auto& p : points) {
      if (idle_nodes() + p.relinquishable >= needed) {
        std::vector<int> release(job.nodes.end() - p.relinquishable, job.nodes.end());
        return settle(resize_action::shrink, p.config, std::move(release), "queued_head");
      }
    }
    if (!points.empty()) {
      const auto& smallest = points.back();
      std::vector<int> release(job.nodes.end() - smallest.relinquishable, job.nodes.end());
      return settle(resize_action::shrink, smallest.config, std::move(release),
                    "queued_insufficient");
    }
    return settle(resize_action::continue_run, {}, {}, "stall");
  }

  // (c) Queue empty and idle nodes exist: expand one ladder step when the
  // job is still improving, or when it is recovering toward a known sweet
  // spot after a forced shrink. Never expand past the sweet spot.
  int ladder_index = job.spec.ladder.index_of(job.config);
  if (ladder_index < 0)
    fail(errc::no_legal_config, job_id + " runs on " + to_string(job.config) + ", not in ladder");
  if (ladder_index + 1 >= static_cast<int>(job.spec.ladder.size()))
    return settle(resize_action::continue_run, {}, {}, "at_maximum");
  proc_grid next = job.spec.ladder.at(static_cast<std::size_t>(ladder_index) + 1);
  int demand = next.total() - job.config.total();

  if (log.sweet) {
    if (next.total() > sweet.config.total())
      return settle(resize_action::continue_run, {}, {}, "at_sweet_spot");
  } else if (!log.improved) {
    return settle(resize_action::continue_run, {}, {}, "not_improving");
  }
  if (idle_nodes() < demand)
    return settle(resize_action::continue_run, {}, {}, "insufficient_idle");

  std::vector<int> granted = take_nodes(demand);
  return settle(resize_action::expand, next, std::move(granted),
                log.sweet ? "re_expand" : "probe");
}

void remap_scheduler::on_resize_complete(const std::string& job_id, double now) {
  (void)now;
  auto& job = get(job_id);
  if (job.state != job_state::redistributing)
    fail(errc::bad_spec, job_id + " is " + job_state_name(job.state) + ", expected redistributing");
  if (!job.resize_is_expand) {
    // Shrink: the relinquished nodes stay busy until the data has left them.
    release_nodes(job.nodes, static_cast<int>(job.resize_nodes.size()));
  }
  job.config = job.resize_target;
  job.resize_nodes.clear();
  job.state = job_state::running;
}

void remap_scheduler::on_job_end(const std::string& job_id, bool failed, double now) {
  auto& job = get(job_id);
  if (job.state != job_state::running)
    fail(errc::bad_spec, job_id + " is " + job_state_name(job.state) + ", expected running");
  release_nodes(job.nodes, static_cast<int>(job.nodes.size()));
  job.state = failed ? job_state::failed : job_state::finished;
  job.end_time = now;
}

const job_record& remap_scheduler::job(const std::string& job_id) const { return get(job_id); }

std::vector<std::string> remap_scheduler::job_ids() const {
  std::vector<std::string> ids;
  ids.reserve(jobs_.size());
  for (const auto& [id, job] : jobs_) ids.push_back(id);
  return ids;
}

std::vector<std::string> remap_scheduler::queue_snapshot() const {
  return {queue_.begin(), queue_.end()};
}

void remap_scheduler::audit() const {
  std::set<int> seen;
  int allocated = 0;
  for (const auto& [id, job] : jobs_) {
    switch (job.state) {
      case job_state::queued:
      case job_state::finished:
      case job_state::failed:
        if (!job.nodes.empty()) fail(errc::bad_spec, id + " holds nodes while " +
                                                         job_state_name(job.state));
        break;
      case job_state::starting:
      case job_state::running:
      case job_state::at_resize_point:
      case job_state::redistributing: {
        int expected = job.config.total();
        if (job.state == job_state::redistributing && job.resize_is_expand)
          expected = job.resize_target.total();
        if (static_cast<int>(job.nodes.size()) != expected)
          fail(errc::bad_spec, id + " holds " + std::to_string(job.nodes.size()) +
                                   " nodes, expected " + std::to_string(expected));
        for (int n : job.nodes) {
          if (n < 0 || n >= cluster_size_) fail(errc::bad_spec, id + " holds invalid node");
          if (!seen.insert(n).second)
            fail(errc::bad_spec, "node " + std::to_string(n) + " allocated twice");
          if (free_.count(n)) fail(errc::bad_spec, "node " + std::to_string(n) + " both free and allocated");
        }
        allocated += static_cast<int>(job.nodes.size());
        break;
      }
    }
  }
  if (allocated + idle_nodes() != cluster_size_)
    fail(errc::bad_spec, "allocated " + std::to_string(allocated) + " + idle " +
                             std::to_string(idle_nodes()) + " != cluster " +
                             std::to_string(cluster_size_));
}

}  // namespace regrid
