#pragma once

#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "regrid/profiler.hpp"

namespace regrid {

enum class job_state {
  queued,
  starting,
  running,
  at_resize_point,
  redistributing,
  finished,
  failed,
};

const char* job_state_name(job_state s);

enum class sched_policy { fcfs, backfill };

/// Submission-time description of a job, as far as scheduling is concerned.
struct job_spec {
  std::string id;
  double arrival = 0.0;
  proc_grid initial_config;
  config_ladder ladder;
  int total_iterations = 0;
};

struct job_record {
  job_spec spec;
  job_state state = job_state::queued;
  proc_grid config;             ///< current configuration once started
  std::vector<int> nodes;       ///< allocated node ids, ascending
  double submit_time = 0.0;
  double start_time = 0.0;
  double end_time = 0.0;

  // resize bookkeeping
  bool probe_pending = false;   ///< expanded, improvement not yet judged
  proc_grid probe_from;         ///< configuration the pending probe left
  bool resize_is_expand = false;
  proc_grid resize_target;
  std::vector<int> resize_nodes;  ///< expand: added; shrink: to release
};

enum class resize_action { continue_run, expand, shrink };

const char* resize_action_name(resize_action a);

struct resize_decision {
  resize_action action = resize_action::continue_run;
  proc_grid target;            ///< meaningful unless continue_run
  std::vector<int> node_list;  ///< expand: nodes granted; shrink: nodes to release
  std::string reason;
};

/// Snapshot of the conditions a decision was made under, for audits.
struct decision_record {
  double time = 0.0;
  std::string job_id;
  resize_action action = resize_action::continue_run;
  proc_grid from;
  proc_grid to;
  int idle_before = 0;
  int queue_length = 0;
  bool improved = false;
  bool sweet = false;
  std::string reason;
};

/// Cluster-wide remap scheduler: admits queued jobs onto idle nodes and
/// decides, at each job's resize points, whether it continues, expands to
/// the next ladder configuration, or shrinks to a previously visited one.
class remap_scheduler {
 public:
  remap_scheduler(int cluster_size, sched_policy policy, profiler& prof);

  /// Registers and enqueues a job. Throws errc::duplicate_job on id reuse
  /// and errc::no_feasible_allocation when the job could never start.
  void submit(const job_spec& spec, double now);

  /// Starts queued jobs that fit on idle nodes. FCFS stops at the first job
  /// that does not fit; backfill keeps scanning but never delays a startable
  /// head. Returns the ids started, in start order.
  std::vector<std::string> admit(double now);

  /// Marks an admitted job as executing.
  void begin_execution(const std::string& job_id);

  /// Policy decision at a resize point. `perf` is recorded with the profiler
  /// first. Expansion reserves the granted nodes immediately; shrink releases
  /// its nodes only at on_resize_complete.
  resize_decision remap_decision(const std::string& job_id, const performance_record& perf,
                                 double now);

  /// Completes an in-flight expand/shrink: commits the configuration change
  /// and, for shrinks, frees the relinquished nodes.
  void on_resize_complete(const std::string& job_id, double now);

  void on_job_end(const std::string& job_id, bool failed, double now);

  const job_record& job(const std::string& job_id) const;
  std::vector<std::string> job_ids() const;
  std::vector<std::string> queue_snapshot() const;
  int idle_nodes() const { return static_cast<int>(free_.size()); }
  int cluster_size() const { return cluster_size_; }
  sched_policy policy() const { return policy_; }
  const std::vector<decision_record>& decision_log() const { return log_; }

  /// Checks allocation sanity: disjoint allocations, capacity respected,
  /// node counts consistent with each job's state. Throws errc::bad_spec
  /// with a description on violation.
  void audit() const;

 private:
  job_record& get(const std::string& job_id);
  const job_record& get(const std::string& job_id) const;
  void start_job(job_record& job, double now);
  std::vector<int> take_nodes(int count);
  void release_nodes(std::vector<int>& nodes, int count);

  int cluster_size_;
  sched_policy policy_;
  profiler& prof_;
  std::set<int> free_;
  std::map<std::string, job_record> jobs_;
  std::deque<std::string> queue_;
  std::vector<decision_record> log_;
};

}  // namespace regrid
