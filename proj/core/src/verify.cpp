#include "regrid/verify.hpp"

#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "regrid/error.hpp"
#include "regrid/layout.hpp"

namespace regrid {

namespace {

std::string pair_name(const redist_schedule& s) {
  return to_string(s.src_grid) + "->" + to_string(s.dst_grid) +
         (s.via_root ? " (via root)" : "");
}

std::int64_t max_degree(int a, int b) {
  const std::int64_t l = std::lcm<std::int64_t>(a, b);
  return std::max(l / a, l / b);
}

}  // namespace

std::optional<std::string> check_schedule(const redist_schedule& schedule) {
  const std::string name = pair_name(schedule);
  const proc_coord root{0, 0};
  // Direct plans move each block once. Via-root plans move it up to twice:
  // into the root during the gather phase, out of it during the scatter.
  std::set<std::pair<std::int64_t, std::int64_t>> moved_once, gathered, scattered;

  for (std::size_t si = 0; si < schedule.steps.size(); ++si) {
    const transfer_step& step = schedule.steps[si];
    if (step.transfers.empty())
      return name + ": step " + std::to_string(si) + " is empty";
    std::set<proc_coord> sources, sinks;
    for (const transfer_triple& t : step.transfers) {
      if (t.src == t.dst)
        return name + ": step " + std::to_string(si) + " keeps a block on its owner";
      if (!sources.insert(t.src).second)
        return name + ": step " + std::to_string(si) + " reads processor (" +
               std::to_string(t.src.r) + "," + std::to_string(t.src.c) + ") twice";
      if (!sinks.insert(t.dst).second)
        return name + ": step " + std::to_string(si) + " writes processor (" +
               std::to_string(t.dst.r) + "," + std::to_string(t.dst.c) + ") twice";
      if (t.blocks.empty())
        return name + ": step " + std::to_string(si) + " has a transfer with no blocks";
      for (const block_coord& b : t.blocks) {
        const std::pair<std::int64_t, std::int64_t> key{b.i, b.j};
        if (!schedule.via_root) {
          if (!moved_once.insert(key).second)
            return name + ": block (" + std::to_string(b.i) + "," + std::to_string(b.j) +
                   ") is moved twice";
        } else if (t.dst == root) {
          if (!gathered.insert(key).second)
            return name + ": block (" + std::to_string(b.i) + "," + std::to_string(b.j) +
                   ") is gathered twice";
        } else if (t.src == root) {
          if (!scattered.insert(key).second)
            return name + ": block (" + std::to_string(b.i) + "," + std::to_string(b.j) +
                   ") is scattered twice";
        } else {
          return name + ": step " + std::to_string(si) + " bypasses the root";
        }
      }
    }
  }

  if (!schedule.via_root) {
    // Steps never exceed the largest per-processor message count in each
    // dimension of the lcm class decomposition.
    const std::int64_t bound = max_degree(schedule.src_grid.rows, schedule.dst_grid.rows) *
                               max_degree(schedule.src_grid.cols, schedule.dst_grid.cols);
    if (static_cast<std::int64_t>(schedule.steps.size()) > bound)
      return name + ": " + std::to_string(schedule.steps.size()) +
             " steps exceed the bound " + std::to_string(bound);
  }
  return std::nullopt;
}

std::optional<std::string> check_roundtrip(const redist_schedule& schedule,
                                           std::int64_t global_rows, std::int64_t global_cols,
                                           std::int64_t block_rows, std::int64_t block_cols) {
  const std::string name = pair_name(schedule);
  block_cyclic_layout src_layout{global_rows, global_cols, block_rows, block_cols,
                                 schedule.src_grid};
  block_cyclic_layout dst_layout{global_rows, global_cols, block_rows, block_cols,
                                 schedule.dst_grid};

  matrix a(global_rows, global_cols);
  for (std::int64_t i = 0; i < global_rows; ++i)
    for (std::int64_t j = 0; j < global_cols; ++j)
      a.at(i, j) = static_cast<double>(i * global_cols + j);

  try {
    auto [moved, stats] = execute(a, src_layout, dst_layout, schedule);
    const block_store expected = scatter(a, dst_layout);
    if (!(moved == expected))
      return name + ": redistributed data does not match a fresh distribution";
    if (stats.total_blocks != schedule.moving_blocks())
      return name + ": schedule moves " + std::to_string(schedule.moving_blocks()) +
             " blocks but execution moved " + std::to_string(stats.total_blocks);
  } catch (const error& e) {
    return name + ": " + e.what();
  }
  return std::nullopt;
}

verify_report verify_redistribution(const verify_options& options) {
  verify_report report;
  auto note = [&](const std::optional<std::string>& v) {
    if (v) report.violations.push_back(*v);
  };

  std::vector<proc_grid> shapes;
  for (int r = 1; r <= options.max_procs; ++r)
    for (int c = 1; r * c <= options.max_procs; ++c) shapes.push_back(make_grid(r, c));

  // One-dimensional plans over plain processor counts.
  for (int p = 1; p <= options.max_procs; ++p) {
    for (int q = 1; q <= options.max_procs; ++q) {
      if (p == q) continue;
      const redist_schedule s = schedule_1d(p, q, options.max_blocks);
      ++report.schedules_checked;
      note(check_schedule(s));
      const std::int64_t l = std::lcm<std::int64_t>(p, q);
      if (static_cast<std::int64_t>(s.steps.size()) > std::max(l / p, l / q))
        report.violations.push_back(to_string(s.src_grid) + "->" +
                                    to_string(s.dst_grid) + ": 1-d step bound exceeded");
      ++report.roundtrips_checked;
      note(check_roundtrip(s, 7, options.max_blocks * 5 - 2, 7, 5));
    }
  }

  // Two-dimensional plans for every pair of grid shapes, direct and via root,
  // over a ragged block grid (the trailing blocks are short in both axes).
  const std::int64_t nb = options.max_blocks;
  const std::int64_t gr = nb * 4 - 3, gc = nb * 3 - 1;
  for (const proc_grid& src : shapes) {
    for (const proc_grid& dst : shapes) {
      if (src == dst) continue;
      const redist_schedule direct = schedule_2d(src, dst, nb, nb);
      const redist_schedule root = schedule_via_root(src, dst, nb, nb);
      report.schedules_checked += 2;
      note(check_schedule(direct));
      note(check_schedule(root));
      report.roundtrips_checked += 2;
      note(check_roundtrip(direct, gr, gc, 4, 3));
      note(check_roundtrip(root, gr, gc, 4, 3));
    }
  }

  if (options.inject_fault) {
    // Corrupt a known-good plan: repeating a transfer inside a step creates
    // write contention and double-moves its blocks. The checks must notice.
    redist_schedule broken = schedule_2d(make_grid(2, 2), make_grid(2, 3), nb, nb);
    if (!broken.steps.empty() && !broken.steps.front().transfers.empty()) {
      broken.steps.front().transfers.push_back(broken.steps.front().transfers.front());
      ++report.schedules_checked;
      auto v = check_schedule(broken);
      if (v) report.violations.push_back("injected fault detected: " + *v);
      else report.violations.push_back("injected fault was NOT detected by check_schedule");
      auto r = check_roundtrip(broken, gr, gc, 4, 3);
      ++report.roundtrips_checked;
      if (!r) report.violations.push_back("injected fault was NOT detected by roundtrip");
    }
  }
  return report;
}

std::string render_report(const verify_report& report) {
  std::ostringstream out;
  out << "checked " << report.schedules_checked << " schedules, "
      << report.roundtrips_checked << " roundtrips\n";
  for (const std::string& v : report.violations) out << "violation: " << v << '\n';
  out << (report.ok() ? "OK" : "FAILED") << '\n';
  return out.str();
}

}  // namespace regrid
