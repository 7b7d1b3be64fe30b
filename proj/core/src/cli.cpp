#include "regrid/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "regrid/error.hpp"
#include "regrid/simkit.hpp"
#include "regrid/verify.hpp"
#include "regrid/workload.hpp"

namespace regrid {

namespace {

int exit_code_for(const error& e) {
  switch (e.code()) {
    case errc::infeasible_workload:
    case errc::no_feasible_allocation:
      return 2;
    case errc::schedule_mismatch:
      return 3;
    default:
      return 1;
  }
}

/// Writes to a file, or to `fallback` when the path is "-" or empty.
bool write_output(const std::string& path, const std::string& text, std::ostream& fallback,
                  std::ostream& err) {
  if (path.empty() || path == "-") {
    fallback << text;
    return true;
  }
  std::ofstream out(path);
  if (!out) {
    err << "cannot write '" << path << "'\n";
    return false;
  }
  out << text;
  return true;
}

struct run_args {
  std::string workload;
  std::string policy;
  std::string resizing;
  std::string trace_path = "-";
  std::string metrics_path = "-";
  std::uint64_t seed = 0;
  bool via_root = false;
};

int cmd_run(const run_args& args, std::ostream& out, std::ostream& err) {
  sim_config config = load_workload(args.workload);
  if (args.policy == "fcfs") config.policy = sched_policy::fcfs;
  else if (args.policy == "backfill") config.policy = sched_policy::backfill;
  else if (!args.policy.empty()) fail(errc::parse_error, "unknown policy '" + args.policy + "'");
  if (args.resizing == "on") config.resizing = true;
  else if (args.resizing == "off") config.resizing = false;
  else if (!args.resizing.empty())
    fail(errc::parse_error, "expected --resizing on|off, got '" + args.resizing + "'");
  if (args.via_root) config.via_root = true;
  config.seed = args.seed;

  const run_result result = run_simulation(config);
  if (!write_output(args.trace_path, render_trace(result.trace, config.seed), out, err))
    return 1;
  if (!write_output(args.metrics_path, render_metrics(result.metrics, config), out, err))
    return 1;
  return 0;
}

struct schedule_args {
  std::string src, dst;
  std::string blocks = "8x8";
  bool via_root = false;
  double latency = 0.001;
  double bandwidth = 1e8;
};

int cmd_schedule(const schedule_args& args, std::ostream& out) {
  const proc_grid src = parse_grid(args.src);
  const proc_grid dst = parse_grid(args.dst);
  const proc_grid nb = parse_grid(args.blocks);

  redist_schedule plan;
  if (src.rows == 1 && dst.rows == 1 && nb.rows == 1)
    plan = schedule_1d(src.cols, dst.cols, nb.cols);
  else
    plan = args.via_root ? schedule_via_root(src, dst, nb.rows, nb.cols)
                         : schedule_2d(src, dst, nb.rows, nb.cols);

  out << render_schedule(plan);
  cost_params costs;
  costs.latency_per_step = args.latency;
  costs.bandwidth = args.bandwidth;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", redist_cost(plan, costs));
  out << "estimated cost: " << buf << " s\n";
  return 0;
}

int cmd_verify(const verify_options& options, std::ostream& out) {
  const verify_report report = verify_redistribution(options);
  out << render_report(report);
  return report.ok() ? 0 : 3;
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"block-cyclic redistribution planner and resizing-cluster simulator"};
  app.require_subcommand(1);

  run_args rargs;
  CLI::App* run = app.add_subcommand("run", "replay a workload file");
  run->add_option("-w,--workload", rargs.workload, "workload file")->required();
  run->add_option("--policy", rargs.policy, "override queue policy (fcfs|backfill)");
  run->add_option("--resizing", rargs.resizing, "override resizing (on|off)");
  run->add_option("--trace", rargs.trace_path, "trace output file, - for stdout");
  run->add_option("--metrics", rargs.metrics_path, "metrics output file, - for stdout");
  run->add_option("--seed", rargs.seed, "seed recorded in the trace header");
  run->add_flag("--via-root", rargs.via_root, "price resizes through the root baseline");

  schedule_args sargs;
  CLI::App* sched = app.add_subcommand("schedule", "print a redistribution plan");
  sched->add_option("--src", sargs.src, "source grid, RxC or P")->required();
  sched->add_option("--dst", sargs.dst, "destination grid, RxC or P")->required();
  sched->add_option("--blocks", sargs.blocks, "block grid extent, RxC or N (1-d)");
  sched->add_flag("--via-root", sargs.via_root, "gather-scatter through processor (0,0)");
  sched->add_option("--latency", sargs.latency, "per-step latency, seconds");
  sched->add_option("--bandwidth", sargs.bandwidth, "link bandwidth, bytes/second");

  verify_options vopts;
  CLI::App* verify = app.add_subcommand("verify", "sweep schedules for violations");
  verify->add_option("--max-procs", vopts.max_procs, "largest processor count in the sweep");
  verify->add_option("--max-blocks", vopts.max_blocks, "block-grid extent for roundtrips");
  verify->add_flag("--inject-fault", vopts.inject_fault,
                   "corrupt one plan to prove the checks catch it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(rargs, out, err);
    if (sched->parsed()) return cmd_schedule(sargs, out);
    if (verify->parsed()) return cmd_verify(vopts, out);
  } catch (const error& e) {
    err << "error: " << e.what() << " [" << errc_name(e.code()) << "]\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace regrid
