#include "regrid/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>
#include <tuple>

#include "regrid/error.hpp"
#include "regrid/layout.hpp"

namespace regrid {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

const char* app_kind_name(app_kind k) {
  switch (k) {
    case app_kind::lu: return "lu";
    case app_kind::mm: return "mm";
    case app_kind::jacobi: return "jacobi";
    case app_kind::fft: return "fft";
    case app_kind::master_worker: return "masterworker";
    case app_kind::table: return "table";
  }
  return "?";
}

app_kind parse_app_kind(const std::string& name) {
  if (name == "lu") return app_kind::lu;
  if (name == "mm") return app_kind::mm;
  if (name == "jacobi") return app_kind::jacobi;
  if (name == "fft") return app_kind::fft;
  if (name == "masterworker" || name == "master_worker") return app_kind::master_worker;
  if (name == "table") return app_kind::table;
  fail(errc::bad_spec, "unknown application kind '" + name + "'");
}

app_model make_app_model(const app_params& params, const config_ladder& ladder,
                         const std::optional<data_descriptor>& data) {
  app_model model;
  model.kind = params.kind;
  model.data = data;

  if (params.kind == app_kind::master_worker) {
    if (params.work_units <= 0.0 || params.unit_time <= 0.0)
      fail(errc::bad_spec, "masterworker needs positive work_units and unit_time");
    const double total = params.work_units * params.unit_time;
    model.iteration_time = [total](int procs) { return total / procs; };
    model.data.reset();  // workers pull units from the master, nothing to move
    return model;
  }

  if (params.kind == app_kind::table || !params.table.empty()) {
    // Explicit (procs -> seconds) pairs; no interpolation, every ladder rung
    // must be present.
    for (const auto& cfg : ladder.configs) {
      if (params.table.find(cfg.total()) == params.table.end())
        fail(errc::bad_spec, "no iteration time for " + to_string(cfg) + " (" +
                                 std::to_string(cfg.total()) + " procs)");
    }
    auto table = params.table;
    model.iteration_time = [table](int procs) {
      auto it = table.find(procs);
      if (it == table.end())
        fail(errc::bad_spec, "no iteration time for " + std::to_string(procs) + " procs");
      return it->second;
    };
    return model;
  }

  // Analytic fallback: T(p) = serial/p + comm * log2(p) + overhead, with
  // per-kind defaults scaled from the problem size.
  const double n = params.problem_size > 0 ? static_cast<double>(params.problem_size) : 1000.0;
  double serial = 0.0, comm = 0.5, fixed = 0.1;
  switch (params.kind) {
    case app_kind::lu: serial = 6.7e-10 * n * n * n; break;
    case app_kind::mm: serial = 1.0e-9 * n * n * n; break;
    case app_kind::jacobi: serial = 2.0e-7 * n * n; comm = 0.2; break;
    case app_kind::fft: serial = 1.5e-8 * n * n * std::log2(n); comm = 0.3; break;
    default: fail(errc::bad_spec, "kind needs an explicit time table");
  }
  if (params.serial_work) serial = *params.serial_work;
  if (params.comm_coeff) comm = *params.comm_coeff;
  if (params.fixed_overhead) fixed = *params.fixed_overhead;
  if (serial <= 0.0) fail(errc::bad_spec, "serial_work must be positive");
  model.iteration_time = [serial, comm, fixed](int procs) {
    return serial / procs + comm * std::log2(static_cast<double>(procs)) + fixed;
  };
  return model;
}

std::string trace_header() { return "time,job_id,event,rows,cols,total_procs,detail"; }

std::string format_trace_row(const trace_event& e) {
  std::ostringstream out;
  out << fmt6(e.time) << ',' << e.job_id << ',' << e.event << ',' << e.rows << ','
      << e.cols << ',' << e.total_procs << ',' << e.detail;
  return out.str();
}

std::string render_trace(const std::vector<trace_event>& trace, std::uint64_t seed) {
  std::ostringstream out;
  out << "# seed=" << seed << '\n' << trace_header() << '\n';
  for (const auto& e : trace) out << format_trace_row(e) << '\n';
  return out.str();
}

namespace {

struct sim_event {
  double time = 0.0;
  event_kind kind = event_kind::arrival;
  std::uint64_t seq = 0;
  std::string job_id;
};

struct event_after {
  bool operator()(const sim_event& a, const sim_event& b) const {
    return std::tie(a.time, a.kind, a.seq) > std::tie(b.time, b.kind, b.seq);
  }
};

struct job_runtime {
  const sim_job* def = nullptr;
  app_model model;
  int done = 0;
  int target_iters = 0;
  bool fails = false;
  bool started = false;
  double pending_redist = 0.0;  ///< cost of the resize preceding the next iteration
};

class simulation {
 public:
  explicit simulation(const sim_config& config)
      : config_(config), profiler_(config.improvement_epsilon),
        sched_(config.cluster_size, config.policy, profiler_) {}

  run_result run();

 private:
  void push(double time, event_kind kind, const std::string& job_id) {
    events_.push({time, kind, seq_++, job_id});
  }

  void emit(double time, const std::string& job_id, const std::string& event,
            proc_grid grid, const std::string& detail) {
    result_.trace.push_back({time, job_id, event, grid.rows, grid.cols, grid.total(), detail});
  }

  void schedule_iteration(const std::string& id, double now) {
    job_runtime& rt = runtime_.at(id);
    const proc_grid cfg = sched_.job(id).config;
    push(now + rt.model.iteration_time(cfg.total()), event_kind::iteration_complete, id);
  }

  void admit_and_start(double now) {
    for (const std::string& id : sched_.admit(now)) {
      job_runtime& rt = runtime_.at(id);
      rt.started = true;
      const job_record& jr = sched_.job(id);
      emit(now, id, "start", jr.config, "wait=" + fmt6(now - jr.submit_time));
      sched_.begin_execution(id);
      schedule_iteration(id, now);
    }
  }

  double resize_cost(const job_runtime& rt, proc_grid from, proc_grid to) const {
    if (!rt.model.data) return 0.0;
    const data_descriptor& dd = *rt.model.data;
    const std::int64_t nbr = (dd.global_rows + dd.block_rows - 1) / dd.block_rows;
    const std::int64_t nbc = (dd.global_cols + dd.block_cols - 1) / dd.block_cols;
    const redist_schedule plan = config_.via_root ? schedule_via_root(from, to, nbr, nbc)
                                                  : schedule_2d(from, to, nbr, nbc);
    cost_params costs = config_.costs;
    costs.block_elems = dd.block_rows * dd.block_cols;
    costs.element_size = dd.element_size;
    return redist_cost(plan, costs);
  }

  void on_arrival(const std::string& id, double now) {
    const job_runtime& rt = runtime_.at(id);
    sched_.submit(rt.def->spec, now);
    emit(now, id, "arrival", rt.def->spec.initial_config,
         "iters=" + std::to_string(rt.target_iters));
    admit_and_start(now);
    if (!runtime_.at(id).started)
      emit(now, id, "queued", rt.def->spec.initial_config,
           "need=" + std::to_string(rt.def->spec.initial_config.total()));
  }

  void on_iteration(const std::string& id, double now) {
    job_runtime& rt = runtime_.at(id);
    rt.done += 1;
    const proc_grid cfg = sched_.job(id).config;
    const double t_iter = rt.model.iteration_time(cfg.total());
    emit(now, id, "iteration", cfg, "iter=" + std::to_string(rt.done) + ";t=" + fmt6(t_iter));

    if (rt.done >= rt.target_iters) {
      push(now, event_kind::job_end, id);
      return;
    }
    if (!config_.resizing) {
      schedule_iteration(id, now);
      return;
    }

    performance_record perf;
    perf.config = cfg;
    perf.iteration_time = t_iter;
    perf.redistribution_time = rt.pending_redist;
    perf.iteration = rt.done;
    rt.pending_redist = 0.0;

    const resize_decision d = sched_.remap_decision(id, perf, now);
    const decision_record& logged = sched_.decision_log().back();
    std::string detail = std::string("action=") + resize_action_name(d.action) +
                         ";reason=" + d.reason + ";target=" + to_string(d.target) +
                         ";idle=" + std::to_string(logged.idle_before) +
                         ";queued=" + std::to_string(logged.queue_length) +
                         ";improved=" + (logged.improved ? "1" : "0") +
                         ";sweet=" + (logged.sweet ? "1" : "0");
    emit(now, id, "decision", cfg, detail);

    if (d.action == resize_action::continue_run) {
      schedule_iteration(id, now);
      return;
    }
    const double cost = resize_cost(rt, cfg, d.target);
    rt.pending_redist = cost;
    push(now + cost, event_kind::resize_complete, id);
  }

  void on_resize(const std::string& id, double now) {
    sched_.on_resize_complete(id, now);
    const job_runtime& rt = runtime_.at(id);
    emit(now, id, "resize_complete", sched_.job(id).config, "cost=" + fmt6(rt.pending_redist));
    admit_and_start(now);  // a shrink frees nodes the queue may want
    schedule_iteration(id, now);
  }

  void on_end(const std::string& id, double now) {
    job_runtime& rt = runtime_.at(id);
    sched_.on_job_end(id, rt.fails, now);
    const double turnaround = now - rt.def->spec.arrival;
    emit(now, id, "end", sched_.job(id).config,
         std::string("outcome=") + (rt.fails ? "failed" : "ok") +
             ";turnaround=" + fmt6(turnaround));

    job_metrics jm;
    jm.job_id = id;
    jm.initial_procs = rt.def->spec.initial_config.total();
    jm.arrival = rt.def->spec.arrival;
    jm.wait = sched_.job(id).start_time - rt.def->spec.arrival;
    jm.turnaround = turnaround;
    jm.failed = rt.fails;
    result_.metrics.jobs.push_back(jm);

    last_end_ = std::max(last_end_, now);
    admit_and_start(now);
  }

  const sim_config& config_;
  profiler profiler_;
  remap_scheduler sched_;
  std::priority_queue<sim_event, std::vector<sim_event>, event_after> events_;
  std::map<std::string, job_runtime> runtime_;
  std::uint64_t seq_ = 0;
  run_result result_;
  double last_end_ = 0.0;
};

run_result simulation::run() {
  if (config_.cluster_size <= 0) fail(errc::bad_spec, "cluster_size must be positive");
  if (config_.jobs.empty()) fail(errc::bad_spec, "workload has no jobs");

  double first_arrival = config_.jobs.front().spec.arrival;
  for (const sim_job& job : config_.jobs) {
    if (job.spec.initial_config.total() > config_.cluster_size)
      fail(errc::infeasible_workload,
           "job '" + job.spec.id + "' needs " +
               std::to_string(job.spec.initial_config.total()) + " of " +
               std::to_string(config_.cluster_size) + " nodes");
    job_runtime rt;
    rt.def = &job;
    rt.model = make_app_model(job.app, job.spec.ladder, job.data);
    rt.fails = job.fail_after > 0 && job.fail_after <= job.spec.total_iterations;
    rt.target_iters = rt.fails ? job.fail_after : job.spec.total_iterations;
    if (!runtime_.emplace(job.spec.id, std::move(rt)).second)
      fail(errc::duplicate_job, "job '" + job.spec.id + "' listed twice");
    push(job.spec.arrival, event_kind::arrival, job.spec.id);
    first_arrival = std::min(first_arrival, job.spec.arrival);
  }

  double busy_integral = 0.0;
  double last_time = first_arrival;
  int busy_level = 0;

  while (!events_.empty()) {
    const sim_event ev = events_.top();
    events_.pop();
    busy_integral += busy_level * (ev.time - last_time);
    last_time = ev.time;

    switch (ev.kind) {
      case event_kind::arrival: on_arrival(ev.job_id, ev.time); break;
      case event_kind::iteration_complete: on_iteration(ev.job_id, ev.time); break;
      case event_kind::resize_complete: on_resize(ev.job_id, ev.time); break;
      case event_kind::job_end: on_end(ev.job_id, ev.time); break;
    }
    busy_level = config_.cluster_size - sched_.idle_nodes();
    sched_.audit();
  }

  result_.metrics.busy_node_seconds = busy_integral;
  result_.metrics.makespan = last_end_ - first_arrival;
  if (result_.metrics.makespan > 0.0)
    result_.metrics.utilization =
        busy_integral / (config_.cluster_size * result_.metrics.makespan) * 100.0;
  result_.decisions = sched_.decision_log();

  // Keep per-job rows in submission order, not completion order.
  std::vector<job_metrics> ordered;
  for (const sim_job& job : config_.jobs)
    for (const job_metrics& jm : result_.metrics.jobs)
      if (jm.job_id == job.spec.id) ordered.push_back(jm);
  result_.metrics.jobs = std::move(ordered);
  return std::move(result_);
}

std::optional<std::string> detail_field(const std::string& detail, const std::string& key) {
  std::size_t pos = 0;
  while (pos < detail.size()) {
    std::size_t end = detail.find(';', pos);
    if (end == std::string::npos) end = detail.size();
    const std::string item = detail.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
    pos = end + 1;
  }
  return std::nullopt;
}

}  // namespace

run_result run_simulation(const sim_config& config) { return simulation(config).run(); }

run_metrics compute_metrics(const std::vector<trace_event>& trace, int cluster_size) {
  struct job_view {
    double arrival = 0.0;
    double start = -1.0;
    double end = -1.0;
    int initial = 0;
    bool failed = false;
    bool seen = false;
  };
  std::map<std::string, job_view> jobs;
  std::map<std::string, int> alloc;
  std::vector<std::string> order;

  double first_arrival = 0.0;
  bool any = false;
  double last_time = 0.0;
  double last_end = 0.0;
  double busy_integral = 0.0;
  int busy_level = 0;

  for (const trace_event& e : trace) {
    if (!any) {
      first_arrival = e.time;
      last_time = e.time;
      any = true;
    }
    busy_integral += busy_level * (e.time - last_time);
    last_time = e.time;

    job_view& jv = jobs[e.job_id];
    if (e.event == "arrival") {
      jv.arrival = e.time;
      jv.initial = e.total_procs;
      jv.seen = true;
      order.push_back(e.job_id);
    } else if (e.event == "start") {
      jv.start = e.time;
      alloc[e.job_id] = e.total_procs;
    } else if (e.event == "decision") {
      // Expansion reserves its new nodes when the decision is made.
      if (detail_field(e.detail, "action") == std::optional<std::string>("expand")) {
        auto target = detail_field(e.detail, "target");
        if (target) alloc[e.job_id] = parse_grid(*target).total();
      }
    } else if (e.event == "resize_complete") {
      alloc[e.job_id] = e.total_procs;
    } else if (e.event == "end") {
      alloc.erase(e.job_id);
      jv.end = e.time;
      jv.failed = detail_field(e.detail, "outcome") == std::optional<std::string>("failed");
      last_end = std::max(last_end, e.time);
    }

    busy_level = 0;
    for (const auto& entry : alloc) busy_level += entry.second;
  }

  run_metrics m;
  if (!any) return m;
  for (const std::string& id : order) {
    const job_view& jv = jobs.at(id);
    if (jv.end < 0.0)
      fail(errc::incomplete_trace, "job '" + id + "' never completed");
    job_metrics jm;
    jm.job_id = id;
    jm.initial_procs = jv.initial;
    jm.arrival = jv.arrival;
    jm.wait = (jv.start >= 0.0 ? jv.start : jv.arrival) - jv.arrival;
    jm.turnaround = jv.end - jv.arrival;
    jm.failed = jv.failed;
    m.jobs.push_back(jm);
  }
  m.busy_node_seconds = busy_integral;
  m.makespan = last_end - first_arrival;
  if (m.makespan > 0.0 && cluster_size > 0)
    m.utilization = busy_integral / (cluster_size * m.makespan) * 100.0;
  return m;
}

std::string render_metrics(const run_metrics& m, const sim_config& config) {
  std::ostringstream out;
  out << "cluster=" << config.cluster_size
      << " policy=" << (config.policy == sched_policy::fcfs ? "fcfs" : "backfill")
      << " resizing=" << (config.resizing ? "on" : "off") << '\n';
  out << "makespan=" << fmt6(m.makespan) << " utilization=" << fmt6(m.utilization)
      << " busy_node_seconds=" << fmt6(m.busy_node_seconds) << '\n';
  out << "job_id,initial_procs,arrival,wait,turnaround,outcome\n";
  for (const job_metrics& j : m.jobs)
    out << j.job_id << ',' << j.initial_procs << ',' << fmt6(j.arrival) << ',' << fmt6(j.wait)
        << ',' << fmt6(j.turnaround) << ',' << (j.failed ? "failed" : "ok") << '\n';
  return out.str();
}

}  // namespace regrid
