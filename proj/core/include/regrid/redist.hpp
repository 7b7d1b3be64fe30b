#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regrid/layout.hpp"

namespace regrid {

/// One point-to-point transfer: `src` ships the listed blocks to `dst`.
struct transfer_triple {
  proc_coord src;
  proc_coord dst;
  std::vector<block_coord> blocks;
};

/// Transfers that proceed concurrently. Contention-free: no processor
/// appears twice as a source, none twice as a destination.
struct transfer_step {
  std::vector<transfer_triple> transfers;
};

struct redist_schedule {
  proc_grid src_grid;
  proc_grid dst_grid;
  std::int64_t num_block_rows = 1;
  std::int64_t num_block_cols = 1;
  bool via_root = false;
  std::vector<transfer_step> steps;

  std::size_t step_count() const { return steps.size(); }
  std::int64_t moving_blocks() const;
};

/// Contention-free schedule between two 1-D processor counts. Message class
/// k in [0, lcm(p, q)) couples source k mod p with destination k mod q and
/// covers block indices congruent to k; classes whose source and destination
/// index coincide stay local and are omitted. Steps are packed so the step
/// count equals the maximum processor degree, never more than
/// max(lcm/p, lcm/q).
///
/// `nblocks` = 0 concretizes over one superblock (lcm(p, q) blocks).
redist_schedule schedule_1d(int p, int q, std::int64_t nblocks = 0);

/// Contention-free schedule between two 2-D grids over an
/// nbr x nbc block grid: the cross product of the row-dimension and
/// column-dimension 1-D schedules (local classes included), with triples
/// whose source and destination processor coincide dropped.
redist_schedule schedule_2d(const proc_grid& src, const proc_grid& dst, std::int64_t nbr,
                            std::int64_t nbc);

/// Baseline that routes everything through processor (0,0): gather all
/// non-root blocks one source per step, then scatter one destination per
/// step. Covers every block, including those that would not move under the
/// direct schedule. Models reconfiguration through a checkpoint file.
redist_schedule schedule_via_root(const proc_grid& src, const proc_grid& dst, std::int64_t nbr,
                                  std::int64_t nbc);

struct transfer_stats {
  std::int64_t total_bytes = 0;
  std::int64_t total_blocks = 0;
  std::vector<std::int64_t> step_max_bytes;  ///< largest concurrent transfer per step
};

/// Applies a schedule to per-processor block stores built from `global`
/// under `src_layout`; returns the resulting stores (which the caller can
/// check against `dst_layout` ownership) and transfer statistics. Throws
/// errc::schedule_mismatch when the schedule does not fit the layouts or a
/// transfer references a block its source does not hold.
std::pair<block_store, transfer_stats> execute(const matrix& global,
                                               const block_cyclic_layout& src_layout,
                                               const block_cyclic_layout& dst_layout,
                                               const redist_schedule& schedule);

struct cost_params {
  double latency_per_step = 0.001;      ///< seconds
  double bandwidth = 1e8;               ///< bytes per second
  double element_size = 8.0;            ///< bytes per element
  double block_elems = 64.0 * 64.0;     ///< elements per (full) block
  double via_root_multiplier = 8.0;     ///< checkpoint-file overhead factor
};

/// Predicted wall time of a schedule: per step, latency plus the largest
/// concurrent transfer divided by bandwidth; via-root schedules are further
/// multiplied by via_root_multiplier.
double redist_cost(const redist_schedule& schedule, const cost_params& params);

/// Destination-processor table: one row per step, one column per source
/// processor, entries are the destination processor's linear rank or "-".
std::string render_schedule(const redist_schedule& schedule);

}  // namespace regrid
