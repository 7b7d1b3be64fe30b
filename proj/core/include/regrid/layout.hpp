#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "regrid/grid.hpp"

namespace regrid {

struct proc_coord {
  int r = 0;
  int c = 0;
  bool operator==(const proc_coord& o) const { return r == o.r && c == o.c; }
  bool operator!=(const proc_coord& o) const { return !(*this == o); }
  bool operator<(const proc_coord& o) const { return r != o.r ? r < o.r : c < o.c; }
};

struct block_coord {
  std::int64_t i = 0;
  std::int64_t j = 0;
  bool operator==(const block_coord& o) const { return i == o.i && j == o.j; }
  bool operator<(const block_coord& o) const { return i != o.i ? i < o.i : j < o.j; }
};

/// Two-dimensional block-cyclic data layout: the global array is tiled into
/// block_rows x block_cols blocks (trailing blocks may be ragged) and block
/// (i, j) lives on processor (i mod grid.rows, j mod grid.cols).
struct block_cyclic_layout {
  std::int64_t global_rows = 0;
  std::int64_t global_cols = 0;
  std::int64_t block_rows = 64;  ///< elements per block, row direction
  std::int64_t block_cols = 64;  ///< elements per block, column direction
  proc_grid grid;

  std::int64_t num_block_rows() const { return (global_rows + block_rows - 1) / block_rows; }
  std::int64_t num_block_cols() const { return (global_cols + block_cols - 1) / block_cols; }

  /// Element extent of block (i, j); trailing blocks are truncated.
  std::int64_t rows_in_block(std::int64_t i) const;
  std::int64_t cols_in_block(std::int64_t j) const;

  void validate() const;
};

/// Owning processor of a block. Throws errc::out_of_range for coordinates
/// outside the block grid.
proc_coord block_owner(const block_coord& b, const block_cyclic_layout& layout);

/// Dense row-major matrix of doubles, used to exercise redistribution with
/// real payloads.
struct matrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> data;

  matrix() = default;
  matrix(std::int64_t r, std::int64_t c) : rows(r), cols(c), data(static_cast<std::size_t>(r * c)) {}

  double& at(std::int64_t i, std::int64_t j) { return data[static_cast<std::size_t>(i * cols + j)]; }
  double at(std::int64_t i, std::int64_t j) const {
    return data[static_cast<std::size_t>(i * cols + j)];
  }
  bool operator==(const matrix& o) const {
    return rows == o.rows && cols == o.cols && data == o.data;
  }
};

/// Per-processor block storage: every processor holds the blocks it owns,
/// keyed by global block coordinates.
struct block_store {
  block_cyclic_layout layout;
  std::map<proc_coord, std::map<block_coord, matrix>> procs;

  bool operator==(const block_store& o) const { return procs == o.procs; }
};

/// Splits a global array into per-processor block stores under `layout`.
block_store scatter(const matrix& global, const block_cyclic_layout& layout);

/// Reassembles the global array; throws errc::schedule_mismatch when blocks
/// are missing or sit on the wrong processor for `store.layout`.
matrix gather(const block_store& store);

}  // namespace regrid
