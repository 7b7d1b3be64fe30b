#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regrid/redist.hpp"
#include "regrid/resched.hpp"

namespace regrid {

enum class app_kind { lu, mm, jacobi, fft, master_worker, table };

const char* app_kind_name(app_kind k);
app_kind parse_app_kind(const std::string& name);

/// Array a job would redistribute on resize. Absent for apps that carry no
/// distributed state between iterations (master-worker).
struct data_descriptor {
  std::int64_t global_rows = 0;
  std::int64_t global_cols = 0;
  std::int64_t block_rows = 64;
  std::int64_t block_cols = 64;
  double element_size = 8.0;
};

/// Model parameters, as read from a workload file.
struct app_params {
  app_kind kind = app_kind::table;
  std::int64_t problem_size = 0;
  std::map<int, double> table;  ///< procs -> seconds per iteration

  // analytic kinds: T(p) = serial_work / p + comm_coeff * log2(p) + fixed_overhead
  std::optional<double> serial_work;
  std::optional<double> comm_coeff;
  std::optional<double> fixed_overhead;

  // master-worker: T(p) = work_units * unit_time / p
  double work_units = 20000.0;
  double unit_time = 0.001;
};

struct app_model {
  app_kind kind = app_kind::table;
  std::function<double(int)> iteration_time;  ///< seconds on `procs` processors
  std::optional<data_descriptor> data;
};

/// Builds the iteration-time model and validates it against the ladder the
/// job may run on (every table-driven ladder entry needs an explicit time).
/// Throws errc::bad_spec on unknown kinds or missing table entries.
app_model make_app_model(const app_params& params, const config_ladder& ladder,
                         const std::optional<data_descriptor>& data);

enum class event_kind : int {
  arrival = 0,
  iteration_complete = 1,
  resize_complete = 2,
  job_end = 3,
};

struct trace_event {
  double time = 0.0;
  std::string job_id;
  std::string event;
  int rows = 0;
  int cols = 0;
  int total_procs = 0;
  std::string detail;
};

std::string trace_header();
std::string format_trace_row(const trace_event& e);

struct job_metrics {
  std::string job_id;
  int initial_procs = 0;
  double arrival = 0.0;
  double wait = 0.0;        ///< queue time before first start
  double turnaround = 0.0;  ///< completion minus arrival
  bool failed = false;
};

struct run_metrics {
  double makespan = 0.0;        ///< first arrival to last completion
  double utilization = 0.0;     ///< percent of cluster-time assigned to jobs
  double busy_node_seconds = 0.0;
  std::vector<job_metrics> jobs;
};

/// One job as the simulator consumes it.
struct sim_job {
  job_spec spec;
  app_params app;
  std::optional<data_descriptor> data;
  int fail_after = 0;  ///< end with outcome failed after this many iterations (0 = never)
};

struct sim_config {
  int cluster_size = 0;
  sched_policy policy = sched_policy::backfill;
  bool resizing = true;
  bool via_root = false;  ///< price resizes through the root-gather baseline
  double improvement_epsilon = 0.0;
  cost_params costs;
  std::uint64_t seed = 0;  ///< echoed into the trace; replays are deterministic
  std::vector<sim_job> jobs;
};

struct run_result {
  std::vector<trace_event> trace;
  run_metrics metrics;
  std::vector<decision_record> decisions;
};

/// Replays a workload under the remap scheduler. Event order is
/// deterministic: time, then arrival < iteration-complete < resize-complete
/// < job-end, then submission sequence. Throws errc::infeasible_workload when
/// a job could never start.
run_result run_simulation(const sim_config& config);

std::string render_trace(const std::vector<trace_event>& trace, std::uint64_t seed);

/// Recomputes metrics from a trace; must agree with the metrics the kernel
/// tallied. Throws errc::incomplete_trace when a job never completes.
run_metrics compute_metrics(const std::vector<trace_event>& trace, int cluster_size);

std::string render_metrics(const run_metrics& m, const sim_config& config);

}  // namespace regrid
