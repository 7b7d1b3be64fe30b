#include "regrid/grid.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace regrid {

const char* errc_name(errc code) {
  switch (code) {
    case errc::no_legal_config: return "no_legal_config";
    case errc::at_maximum: return "at_maximum";
    case errc::at_minimum: return "at_minimum";
    case errc::out_of_range: return "out_of_range";
    case errc::schedule_mismatch: return "schedule_mismatch";
    case errc::unknown_job: return "unknown_job";
    case errc::duplicate_job: return "duplicate_job";
    case errc::not_at_resize_point: return "not_at_resize_point";
    case errc::no_feasible_allocation: return "no_feasible_allocation";
    case errc::bad_spec: return "bad_spec";
    case errc::incomplete_trace: return "incomplete_trace";
    case errc::infeasible_workload: return "infeasible_workload";
    case errc::parse_error: return "parse_error";
  }
  return "unknown";
}

proc_grid make_grid(int rows, int cols) {
  if (rows < 1 || cols < 1) fail(errc::bad_spec, "grid dimensions must be positive");
  return proc_grid{rows, cols, topology::grid2d};
}

proc_grid make_linear(int procs) {
  if (procs < 1) fail(errc::bad_spec, "processor count must be positive");
  return proc_grid{1, procs, topology::linear1d};
}

proc_grid canonical(const proc_grid& g) {
  proc_grid out = g;
  if (out.kind == topology::grid2d && out.rows > out.cols) std::swap(out.rows, out.cols);
  return out;
}

std::string to_string(const proc_grid& g) {
  if (g.kind == topology::linear1d) return std::to_string(g.total());
  return std::to_string(g.rows) + "x" + std::to_string(g.cols);
}

proc_grid parse_grid(const std::string& text) {
  auto is_num = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
  };
  auto x = text.find('x');
  if (x == std::string::npos) {
    if (!is_num(text)) fail(errc::parse_error, "bad grid '" + text + "'");
    return make_linear(std::stoi(text));
  }
  std::string r = text.substr(0, x), c = text.substr(x + 1);
  if (!is_num(r) || !is_num(c)) fail(errc::parse_error, "bad grid '" + text + "'");
  return make_grid(std::stoi(r), std::stoi(c));
}

int config_ladder::index_of(const proc_grid& g) const {
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (configs[i].rows == g.rows && configs[i].cols == g.cols) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  std::vector<std::int64_t> low, high;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      low.push_back(d);
      if (d != n / d) high.push_back(n / d);
    }
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

namespace {

std::int64_t next_divisor(std::int64_t n, std::int64_t after) {
  for (std::int64_t d = after + 1; d <= n; ++d) {
    if (n % d == 0) return d;
  }
  return 0;
}

}  // namespace

proc_grid grow_grid(const proc_grid& g, std::int64_t problem_size, int max_procs) {
  if (problem_size < 1) fail(errc::bad_spec, "problem size must be positive");
  if (g.kind == topology::linear1d) {
    if (problem_size % g.cols != 0)
      fail(errc::no_legal_config, to_string(g) + " does not divide " + std::to_string(problem_size));
    std::int64_t next = next_divisor(problem_size, g.cols);
    if (next == 0 || next > max_procs)
      fail(errc::at_maximum, "no larger processor count within " + std::to_string(max_procs));
    return make_linear(static_cast<int>(next));
  }
  proc_grid cur = canonical(g);
  if (problem_size % cur.rows != 0 || problem_size % cur.cols != 0)
    fail(errc::no_legal_config, to_string(g) + " does not divide " + std::to_string(problem_size));
  // Raise the smaller dimension; a square grid grows its column count.
  std::int64_t grown;
  proc_grid out = cur;
  if (cur.rows < cur.cols) {
    grown = next_divisor(problem_size, cur.rows);
    out.rows = static_cast<int>(grown);
  } else {
    grown = next_divisor(problem_size, cur.cols);
    out.cols = static_cast<int>(grown);
  }
  if (grown == 0 || static_cast<std::int64_t>(out.rows) * out.cols > max_procs)
    fail(errc::at_maximum, "no larger grid within " + std::to_string(max_procs) + " processors");
  return canonical(out);
}

config_ladder enumerate_configs(std::int64_t problem_size, int max_procs, topology kind,
                                int min_procs, int proc_multiple) {
  if (problem_size < 1) fail(errc::bad_spec, "problem size must be positive");
  if (min_procs < 1 || max_procs < min_procs)
    fail(errc::bad_spec, "bad processor bounds [" + std::to_string(min_procs) + ", " +
                             std::to_string(max_procs) + "]");
  if (proc_multiple < 1) fail(errc::bad_spec, "proc_multiple must be positive");

  config_ladder ladder;
  if (kind == topology::linear1d) {
    for (std::int64_t d : divisors(problem_size)) {
      if (d < min_procs || d > max_procs) continue;
      if (d % proc_multiple != 0) continue;
      ladder.configs.push_back(make_linear(static_cast<int>(d)));
    }
  } else {
    // Smallest legal grid with total >= min_procs; among equal totals prefer
    // the most nearly square (largest row count with rows <= cols).
    auto divs = divisors(problem_size);
    proc_grid start;
    std::int64_t best_total = -1;
    for (std::int64_t r : divs) {
      for (std::int64_t c : divs) {
        if (r > c) continue;
        std::int64_t total = r * c;
        if (total < min_procs || total > max_procs) continue;
        if (best_total == -1 || total < best_total ||
            (total == best_total && r > start.rows)) {
          best_total = total;
          start = make_grid(static_cast<int>(r), static_cast<int>(c));
        }
      }
      if (r >= best_total && best_total != -1) break;
    }
    if (best_total == -1)
      fail(errc::no_legal_config, "no grid within [" + std::to_string(min_procs) + ", " +
                                      std::to_string(max_procs) + "] divides " +
                                      std::to_string(problem_size));
    ladder.configs.push_back(start);
    for (;;) {
      try {
        ladder.configs.push_back(grow_grid(ladder.configs.back(), problem_size, max_procs));
      } catch (const error& e) {
        if (e.code() == errc::at_maximum) break;
        throw;
      }
    }
  }
  if (ladder.configs.empty())
    fail(errc::no_legal_config, "no configuration of " + std::to_string(problem_size) +
                                    " within [" + std::to_string(min_procs) + ", " +
                                    std::to_string(max_procs) + "]");
  return ladder;
}

proc_grid next_config(const config_ladder& ladder, const proc_grid& current) {
  int i = ladder.index_of(current);
  if (i < 0) fail(errc::no_legal_config, to_string(current) + " is not a ladder member");
  if (i + 1 >= static_cast<int>(ladder.size())) fail(errc::at_maximum, "already at ladder top");
  return ladder.at(i + 1);
}

proc_grid prev_config(const config_ladder& ladder, const proc_grid& current) {
  int i = ladder.index_of(current);
  if (i < 0) fail(errc::no_legal_config, to_string(current) + " is not a ladder member");
  if (i == 0) fail(errc::at_minimum, "already at ladder bottom");
  return ladder.at(i - 1);
}

}  // namespace regrid
