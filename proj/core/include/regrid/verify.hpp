#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regrid/redist.hpp"

namespace regrid {

/// Structural checks on one schedule: per-step contention freedom (no
/// processor appears twice as a source or twice as a destination), no
/// self-transfers, no duplicated blocks, and for direct one-dimensional
/// plans the step bound max(L/p, L/q). Returns the first violation found.
std::optional<std::string> check_schedule(const redist_schedule& schedule);

/// Data-integrity check: scatters a deterministic array on the source grid,
/// applies the schedule, and requires the result to equal a fresh scatter on
/// the destination grid (same bytes, right owners). Returns the first
/// violation found.
std::optional<std::string> check_roundtrip(const redist_schedule& schedule,
                                           std::int64_t global_rows, std::int64_t global_cols,
                                           std::int64_t block_rows, std::int64_t block_cols);

struct verify_options {
  int max_procs = 8;          ///< sweep all grid pairs with totals up to this
  std::int64_t max_blocks = 12;  ///< block-grid extent for roundtrip checks
  bool inject_fault = false;  ///< corrupt one schedule; the sweep must catch it
};

struct verify_report {
  int schedules_checked = 0;
  int roundtrips_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Exhaustive sweep over every processor-grid pair within the bounds, both
/// direct and via-root plans, plus ragged-edge roundtrips.
verify_report verify_redistribution(const verify_options& options);

std::string render_report(const verify_report& report);

}  // namespace regrid
