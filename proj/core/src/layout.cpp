#include "regrid/layout.hpp"

#include <algorithm>

namespace regrid {

std::int64_t block_cyclic_layout::rows_in_block(std::int64_t i) const {
  return std::min(block_rows, global_rows - i * block_rows);
}

std::int64_t block_cyclic_layout::cols_in_block(std::int64_t j) const {
  return std::min(block_cols, global_cols - j * block_cols);
}

void block_cyclic_layout::validate() const {
  if (global_rows < 1 || global_cols < 1) fail(errc::bad_spec, "empty global array");
  if (block_rows < 1 || block_cols < 1) fail(errc::bad_spec, "empty block dimensions");
  if (grid.rows < 1 || grid.cols < 1) fail(errc::bad_spec, "empty processor grid");
}

proc_coord block_owner(const block_coord& b, const block_cyclic_layout& layout) {
  if (b.i < 0 || b.j < 0 || b.i >= layout.num_block_rows() || b.j >= layout.num_block_cols())
    fail(errc::out_of_range, "block (" + std::to_string(b.i) + ", " + std::to_string(b.j) +
                                 ") outside " + std::to_string(layout.num_block_rows()) + "x" +
                                 std::to_string(layout.num_block_cols()) + " block grid");
  return proc_coord{static_cast<int>(b.i % layout.grid.rows),
                    static_cast<int>(b.j % layout.grid.cols)};
}

block_store scatter(const matrix& global, const block_cyclic_layout& layout) {
  layout.validate();
  if (global.rows != layout.global_rows || global.cols != layout.global_cols)
    fail(errc::schedule_mismatch, "array does not match layout dimensions");
  block_store store;
  store.layout = layout;
  for (std::int64_t bi = 0; bi < layout.num_block_rows(); ++bi) {
    for (std::int64_t bj = 0; bj < layout.num_block_cols(); ++bj) {
      matrix blk(layout.rows_in_block(bi), layout.cols_in_block(bj));
      for (std::int64_t i = 0; i < blk.rows; ++i)
        for (std::int64_t j = 0; j < blk.cols; ++j)
          blk.at(i, j) = global.at(bi * layout.block_rows + i, bj * layout.block_cols + j);
      store.procs[block_owner({bi, bj}, layout)].emplace(block_coord{bi, bj}, std::move(blk));
    }
  }
  return store;
}

matrix gather(const block_store& store) {
  const auto& layout = store.layout;
  layout.validate();
  matrix global(layout.global_rows, layout.global_cols);
  std::int64_t placed = 0;
  for (const auto& [proc, blocks] : store.procs) {
    for (const auto& [b, blk] : blocks) {
      if (block_owner(b, layout) != proc)
        fail(errc::schedule_mismatch,
             "block (" + std::to_string(b.i) + ", " + std::to_string(b.j) + ") misplaced");
      if (blk.rows != layout.rows_in_block(b.i) || blk.cols != layout.cols_in_block(b.j))
        fail(errc::schedule_mismatch, "block extent mismatch");
      for (std::int64_t i = 0; i < blk.rows; ++i)
        for (std::int64_t j = 0; j < blk.cols; ++j)
          global.at(b.i * layout.block_rows + i, b.j * layout.block_cols + j) = blk.at(i, j);
      ++placed;
    }
  }
  if (placed != layout.num_block_rows() * layout.num_block_cols())
    fail(errc::schedule_mismatch, "missing blocks during gather");
  return global;
}

}  // namespace regrid
