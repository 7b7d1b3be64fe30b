#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regrid/error.hpp"

namespace regrid {

/// Processor topology family an application runs on.
enum class topology {
  linear1d,  ///< 1 x P row of processors
  grid2d,    ///< R x C checkerboard
};

/// A processor grid. linear1d grids always have rows == 1.
struct proc_grid {
  int rows = 1;
  int cols = 1;
  topology kind = topology::grid2d;

  int total() const { return rows * cols; }

  bool operator==(const proc_grid& o) const {
    return rows == o.rows && cols == o.cols && kind == o.kind;
  }
  bool operator!=(const proc_grid& o) const { return !(*this == o); }
};

proc_grid make_grid(int rows, int cols);
proc_grid make_linear(int procs);

/// Canonical 2-D form: rows <= cols (nearly-square convention).
proc_grid canonical(const proc_grid& g);

/// "RxC" for 2-D, "P" for 1-D.
std::string to_string(const proc_grid& g);

/// Parses "RxC" or a bare processor count (which yields a linear grid).
proc_grid parse_grid(const std::string& text);

/// Ordered list of legal configurations a job may occupy. Totals strictly
/// increase; every dimension divides the problem size.
struct config_ladder {
  std::vector<proc_grid> configs;

  bool empty() const { return configs.empty(); }
  std::size_t size() const { return configs.size(); }
  const proc_grid& at(std::size_t i) const { return configs.at(i); }

  /// Index of `g` in the ladder, or -1.
  int index_of(const proc_grid& g) const;
  bool contains(const proc_grid& g) const { return index_of(g) >= 0; }
};

/// Divisors of n in ascending order.
std::vector<std::int64_t> divisors(std::int64_t n);

/// One expansion step: raise the smaller dimension (columns when square) to
/// the next larger divisor of problem_size, re-canonicalized, subject to the
/// result total staying within max_procs.
///
/// Throws errc::at_maximum when no larger legal grid fits, errc::no_legal_config
/// when the input grid's dimensions do not divide problem_size.
proc_grid grow_grid(const proc_grid& g, std::int64_t problem_size, int max_procs);

/// Enumerates the full ladder for the given topology.
///
/// linear1d: divisors d of problem_size with min_procs <= d <= max_procs,
/// ascending. `proc_multiple` restricts counts to multiples of that value
/// (node granularity; 1 = no restriction). grid2d: starts from the smallest
/// legal grid with total >= min_procs and repeatedly applies grow_grid.
///
/// Throws errc::no_legal_config when the ladder would be empty.
config_ladder enumerate_configs(std::int64_t problem_size, int max_procs, topology kind,
                                int min_procs = 2, int proc_multiple = 1);

/// Successor of `current` in the ladder. Throws errc::at_maximum at the top,
/// errc::no_legal_config if `current` is not a ladder member.
proc_grid next_config(const config_ladder& ladder, const proc_grid& current);

/// Predecessor of `current` in the ladder. Throws errc::at_minimum at the
/// bottom, errc::no_legal_config if `current` is not a ladder member.
proc_grid prev_config(const config_ladder& ladder, const proc_grid& current);

}  // namespace regrid
