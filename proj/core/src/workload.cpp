#include "regrid/workload.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "regrid/error.hpp"

namespace regrid {

namespace {

[[noreturn]] void bad_line(int line, const std::string& what) {
  fail(errc::parse_error, "line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    bad_line(line, "expected a number, got '" + tok + "'");
  }
}

std::int64_t to_int(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    bad_line(line, "expected an integer, got '" + tok + "'");
  }
}

bool to_switch(const std::string& tok, int line) {
  if (tok == "on") return true;
  if (tok == "off") return false;
  bad_line(line, "expected on|off, got '" + tok + "'");
}

proc_grid grid_at(const std::string& tok, int line) {
  try {
    return parse_grid(tok);
  } catch (const error& e) {
    bad_line(line, e.what());
  }
}

/// A job block while its lines are being collected; resolved once the whole
/// file is read so the cluster size is known for ladder enumeration.
struct pending_job {
  int line = 0;
  sim_job job;
  bool kind_set = false;
  bool topology_set = false;
  topology topo = topology::grid2d;
  std::optional<proc_grid> initial;
  std::vector<proc_grid> explicit_ladder;
  int min_procs = 2;
  int granularity = 1;
  std::int64_t block_rows = 64, block_cols = 64;
  std::optional<std::pair<std::int64_t, std::int64_t>> data_dims;
  bool data_disabled = false;
};

proc_grid normalize(proc_grid g, topology topo) {
  if (topo == topology::linear1d && g.kind == topology::grid2d && g.rows == 1)
    return make_linear(g.cols);
  return g;
}

void resolve(pending_job& pj, const sim_config& config) {
  sim_job& job = pj.job;
  if (!pj.topology_set)
    pj.topo = (job.app.kind == app_kind::jacobi || job.app.kind == app_kind::fft ||
               job.app.kind == app_kind::master_worker)
                  ? topology::linear1d
                  : topology::grid2d;

  if (!pj.explicit_ladder.empty()) {
    for (proc_grid g : pj.explicit_ladder)
      job.spec.ladder.configs.push_back(normalize(g, pj.topo));
  } else {
    if (job.app.problem_size <= 0)
      bad_line(pj.line, "job '" + job.spec.id + "' needs a ladder or a problem_size");
    job.spec.ladder = enumerate_configs(job.app.problem_size, config.cluster_size, pj.topo,
                                        pj.min_procs, pj.granularity);
  }
  if (job.spec.ladder.configs.empty())
    bad_line(pj.line, "job '" + job.spec.id + "' has an empty ladder");

  job.spec.initial_config = pj.initial ? normalize(*pj.initial, pj.topo)
                                       : job.spec.ladder.configs.front();
  if (!job.spec.ladder.contains(job.spec.initial_config))
    bad_line(pj.line, "initial " + to_string(job.spec.initial_config) +
                          " is not on the ladder of job '" + job.spec.id + "'");

  if (pj.data_dims) {
    job.data = data_descriptor{pj.data_dims->first, pj.data_dims->second, pj.block_rows,
                               pj.block_cols, config.costs.element_size};
  } else if (!pj.data_disabled && job.app.kind != app_kind::master_worker &&
             job.app.problem_size > 0) {
    job.data = data_descriptor{job.app.problem_size, job.app.problem_size, pj.block_rows,
                               pj.block_cols, config.costs.element_size};
  }
}

}  // namespace

sim_config parse_workload(const std::string& text) {
  sim_config config;
  std::vector<pending_job> pending;
  std::set<std::string> ids;
  std::optional<pending_job> open;
  bool cluster_seen = false;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::vector<std::string> tok = tokenize(raw);
    if (tok.empty()) continue;
    const std::string& key = tok[0];
    auto want = [&](std::size_t n) {
      if (tok.size() != n + 1)
        bad_line(line, "'" + key + "' takes " + std::to_string(n) + " argument(s)");
    };

    if (!open) {
      if (key == "cluster") {
        want(1);
        config.cluster_size = static_cast<int>(to_int(tok[1], line));
        cluster_seen = true;
      } else if (key == "policy") {
        want(1);
        if (tok[1] == "fcfs") config.policy = sched_policy::fcfs;
        else if (tok[1] == "backfill") config.policy = sched_policy::backfill;
        else bad_line(line, "expected fcfs|backfill, got '" + tok[1] + "'");
      } else if (key == "resizing") {
        want(1);
        config.resizing = to_switch(tok[1], line);
      } else if (key == "via_root") {
        want(1);
        config.via_root = to_switch(tok[1], line);
      } else if (key == "epsilon") {
        want(1);
        config.improvement_epsilon = to_double(tok[1], line);
      } else if (key == "cost_latency") {
        want(1);
        config.costs.latency_per_step = to_double(tok[1], line);
      } else if (key == "cost_bandwidth") {
        want(1);
        config.costs.bandwidth = to_double(tok[1], line);
      } else if (key == "cost_element_size") {
        want(1);
        config.costs.element_size = to_double(tok[1], line);
      } else if (key == "cost_via_root_multiplier") {
        want(1);
        config.costs.via_root_multiplier = to_double(tok[1], line);
      } else if (key == "job") {
        want(1);
        if (!ids.insert(tok[1]).second) bad_line(line, "duplicate job id '" + tok[1] + "'");
        open.emplace();
        open->line = line;
        open->job.spec.id = tok[1];
      } else if (key == "end") {
        bad_line(line, "'end' outside a job block");
      } else {
        bad_line(line, "unknown directive '" + key + "'");
      }
      continue;
    }

    pending_job& pj = *open;
    if (key == "end") {
      want(0);
      pending.push_back(std::move(pj));
      open.reset();
    } else if (key == "arrival") {
      want(1);
      pj.job.spec.arrival = to_double(tok[1], line);
    } else if (key == "kind") {
      want(1);
      try {
        pj.job.app.kind = parse_app_kind(tok[1]);
      } catch (const error& e) {
        bad_line(line, e.what());
      }
      pj.kind_set = true;
    } else if (key == "topology") {
      want(1);
      if (tok[1] == "grid") pj.topo = topology::grid2d;
      else if (tok[1] == "linear") pj.topo = topology::linear1d;
      else bad_line(line, "expected grid|linear, got '" + tok[1] + "'");
      pj.topology_set = true;
    } else if (key == "problem_size") {
      want(1);
      pj.job.app.problem_size = to_int(tok[1], line);
    } else if (key == "blocks") {
      want(2);
      pj.block_rows = to_int(tok[1], line);
      pj.block_cols = to_int(tok[2], line);
      if (pj.block_rows <= 0 || pj.block_cols <= 0) bad_line(line, "blocks must be positive");
    } else if (key == "data") {
      if (tok.size() == 2 && tok[1] == "none") {
        pj.data_disabled = true;
        pj.data_dims.reset();
      } else {
        want(2);
        pj.data_dims = {to_int(tok[1], line), to_int(tok[2], line)};
        if (pj.data_dims->first <= 0 || pj.data_dims->second <= 0)
          bad_line(line, "data extents must be positive");
      }
    } else if (key == "initial") {
      want(1);
      pj.initial = grid_at(tok[1], line);
    } else if (key == "iterations") {
      want(1);
      pj.job.spec.total_iterations = static_cast<int>(to_int(tok[1], line));
      if (pj.job.spec.total_iterations < 1) bad_line(line, "iterations must be at least 1");
    } else if (key == "ladder") {
      if (tok.size() < 2) bad_line(line, "'ladder' needs at least one configuration");
      pj.explicit_ladder.clear();
      for (std::size_t i = 1; i < tok.size(); ++i)
        pj.explicit_ladder.push_back(grid_at(tok[i], line));
    } else if (key == "min_procs") {
      want(1);
      pj.min_procs = static_cast<int>(to_int(tok[1], line));
    } else if (key == "granularity") {
      want(1);
      pj.granularity = static_cast<int>(to_int(tok[1], line));
      if (pj.granularity < 1) bad_line(line, "granularity must be at least 1");
    } else if (key == "time") {
      want(2);
      pj.job.app.table[static_cast<int>(to_int(tok[1], line))] = to_double(tok[2], line);
      if (!pj.kind_set) pj.job.app.kind = app_kind::table;
    } else if (key == "serial_work") {
      want(1);
      pj.job.app.serial_work = to_double(tok[1], line);
    } else if (key == "comm_coeff") {
      want(1);
      pj.job.app.comm_coeff = to_double(tok[1], line);
    } else if (key == "fixed_overhead") {
      want(1);
      pj.job.app.fixed_overhead = to_double(tok[1], line);
    } else if (key == "work_units") {
      want(1);
      pj.job.app.work_units = to_double(tok[1], line);
    } else if (key == "unit_time") {
      want(1);
      pj.job.app.unit_time = to_double(tok[1], line);
    } else if (key == "fail_after") {
      want(1);
      pj.job.fail_after = static_cast<int>(to_int(tok[1], line));
      if (pj.job.fail_after < 1) bad_line(line, "fail_after must be at least 1");
    } else {
      bad_line(line, "unknown job directive '" + key + "'");
    }
  }

  if (open) bad_line(line, "job '" + open->job.spec.id + "' is missing its 'end'");
  if (!cluster_seen) fail(errc::parse_error, "workload does not set 'cluster'");
  if (config.cluster_size < 1) fail(errc::parse_error, "'cluster' must be at least 1");
  if (pending.empty()) fail(errc::parse_error, "workload defines no jobs");

  for (pending_job& pj : pending) {
    if (pj.job.spec.total_iterations < 1)
      bad_line(pj.line, "job '" + pj.job.spec.id + "' needs 'iterations'");
    resolve(pj, config);
    config.jobs.push_back(std::move(pj.job));
  }
  return config;
}

sim_config load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open workload '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_workload(buf.str());
}

std::string render_workload(const sim_config& config) {
  std::ostringstream out;
  out << "cluster " << config.cluster_size << '\n';
  out << "policy " << (config.policy == sched_policy::fcfs ? "fcfs" : "backfill") << '\n';
  out << "resizing " << (config.resizing ? "on" : "off") << '\n';
  if (config.via_root) out << "via_root on\n";
  if (config.improvement_epsilon != 0.0)
    out << "epsilon " << config.improvement_epsilon << '\n';
  out << "cost_latency " << config.costs.latency_per_step << '\n';
  out << "cost_bandwidth " << config.costs.bandwidth << '\n';
  out << "cost_element_size " << config.costs.element_size << '\n';
  out << "cost_via_root_multiplier " << config.costs.via_root_multiplier << '\n';

  for (const sim_job& job : config.jobs) {
    out << "\njob " << job.spec.id << '\n';
    out << "  arrival " << job.spec.arrival << '\n';
    out << "  kind " << app_kind_name(job.app.kind) << '\n';
    out << "  topology "
        << (job.spec.initial_config.kind == topology::linear1d ? "linear" : "grid") << '\n';
    if (job.app.problem_size > 0) out << "  problem_size " << job.app.problem_size << '\n';
    if (job.data) {
      out << "  blocks " << job.data->block_rows << ' ' << job.data->block_cols << '\n';
      out << "  data " << job.data->global_rows << ' ' << job.data->global_cols << '\n';
    } else {
      out << "  data none\n";
    }
    out << "  initial " << to_string(job.spec.initial_config) << '\n';
    out << "  iterations " << job.spec.total_iterations << '\n';
    out << "  ladder";
    for (const proc_grid& g : job.spec.ladder.configs) out << ' ' << to_string(g);
    out << '\n';
    for (const auto& [procs, seconds] : job.app.table)
      out << "  time " << procs << ' ' << seconds << '\n';
    if (job.app.serial_work) out << "  serial_work " << *job.app.serial_work << '\n';
    if (job.app.comm_coeff) out << "  comm_coeff " << *job.app.comm_coeff << '\n';
    if (job.app.fixed_overhead) out << "  fixed_overhead " << *job.app.fixed_overhead << '\n';
    if (job.app.kind == app_kind::master_worker) {
      out << "  work_units " << job.app.work_units << '\n';
      out << "  unit_time " << job.app.unit_time << '\n';
    }
    if (job.fail_after > 0) out << "  fail_after " << job.fail_after << '\n';
    out << "end\n";
  }
  return out.str();
}

}  // namespace regrid
