#include "doctest.h"

#include <numeric>
#include <set>

#include "regrid/error.hpp"
#include "regrid/layout.hpp"
#include "regrid/redist.hpp"
#include "regrid/verify.hpp"

using namespace regrid;

namespace {

matrix numbered(std::int64_t rows, std::int64_t cols) {
  matrix m(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) m.at(i, j) = static_cast<double>(i * cols + j);
  return m;
}

std::set<std::pair<int, int>> rank_pairs_1d(const redist_schedule& s) {
  std::set<std::pair<int, int>> pairs;
  for (const transfer_step& step : s.steps)
    for (const transfer_triple& t : step.transfers) pairs.insert({t.src.c, t.dst.c});
  return pairs;
}

}  // namespace

TEST_CASE("2 -> 3 redistribution takes two contention-free steps") {
  // lcm(2,3) = 6 message classes; classes 0 (0->0) and 1 (1->1) stay local.
  // The four moving classes are (0->2), (1->0), (0->1), (1->2): each source
  // sends twice, so two steps are necessary and sufficient.
  redist_schedule s = schedule_1d(2, 3, 12);
  CHECK(s.steps.size() == 2);
  CHECK(rank_pairs_1d(s) ==
        std::set<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 0}, {1, 2}});
  CHECK(check_schedule(s) == std::nullopt);

  // With 12 blocks, moving class k carries blocks k and k+6.
  for (const transfer_step& step : s.steps)
    for (const transfer_triple& t : step.transfers) {
      REQUIRE(t.blocks.size() == 2);
      const std::int64_t k = t.blocks[0].j;
      CHECK(k < 6);
      CHECK(t.blocks[1].j == k + 6);
      CHECK(k % 2 == t.src.c);
      CHECK(k % 3 == t.dst.c);
    }
  CHECK(s.moving_blocks() == 8);
}

TEST_CASE("redistribution onto the same processor count moves nothing") {
  CHECK(schedule_1d(4, 4, 16).steps.empty());
  CHECK(schedule_2d(make_grid(2, 3), make_grid(2, 3), 8, 8).steps.empty());
}

TEST_CASE("1-d schedules respect the lcm step bound for all pairs up to 12") {
  for (int p = 1; p <= 12; ++p)
    for (int q = 1; q <= 12; ++q) {
      if (p == q) continue;
      const std::int64_t l = std::lcm(p, q);
      redist_schedule s = schedule_1d(p, q, l);
      CHECK(check_schedule(s) == std::nullopt);
      CHECK(static_cast<std::int64_t>(s.steps.size()) <= std::max(l / p, l / q));
    }
}

TEST_CASE("2x2 -> 2x4 moves exactly half of an 8x8 block grid") {
  // Row owners are unchanged; column owner changes where j mod 2 != j mod 4,
  // i.e. for j in {2,3,6,7}: 4 columns x 8 rows = 32 blocks.
  redist_schedule s = schedule_2d(make_grid(2, 2), make_grid(2, 4), 8, 8);
  CHECK(s.moving_blocks() == 32);
  CHECK(check_schedule(s) == std::nullopt);
}

TEST_CASE("1x2 -> 2x2 collapses to a single real step") {
  // The row dimension contributes one moving class and one local class; the
  // column dimension is all-local. Identity pairs are dropped, leaving one
  // step in which both source processors send simultaneously.
  redist_schedule s = schedule_2d(make_grid(1, 2), make_grid(2, 2), 8, 8);
  REQUIRE(s.steps.size() == 1);
  CHECK(s.steps[0].transfers.size() == 2);
  CHECK(s.moving_blocks() == 32);  // odd block rows change owner: 4 x 8
  CHECK(check_schedule(s) == std::nullopt);
}

TEST_CASE("cost model: latency plus widest transfer per step") {
  redist_schedule s;
  s.src_grid = make_grid(1, 2);
  s.dst_grid = make_grid(1, 3);
  transfer_step step;
  transfer_triple wide{{0, 0}, {0, 1}, {}};
  wide.blocks.resize(100, block_coord{0, 0});
  transfer_triple narrow{{0, 1}, {0, 2}, {}};
  narrow.blocks.resize(40, block_coord{0, 1});
  step.transfers = {wide, narrow};
  s.steps = {step};

  cost_params costs;  // 0.001 s latency, 1e8 B/s, 64x64 doubles
  CHECK(redist_cost(s, costs) == doctest::Approx(0.033768).epsilon(1e-12));

  s.steps.push_back(step);
  CHECK(redist_cost(s, costs) == doctest::Approx(2 * 0.033768).epsilon(1e-12));

  s.via_root = true;
  CHECK(redist_cost(s, costs) == doctest::Approx(8.0 * 2 * 0.033768).epsilon(1e-12));
}

TEST_CASE("execution conserves data and inverts exactly") {
  const std::int64_t rows = 50, cols = 38;  // ragged under 16x16 blocks
  matrix a = numbered(rows, cols);
  block_cyclic_layout src{rows, cols, 16, 16, make_grid(2, 3)};
  block_cyclic_layout dst{rows, cols, 16, 16, make_grid(3, 2)};

  redist_schedule forward =
      schedule_2d(src.grid, dst.grid, src.num_block_rows(), src.num_block_cols());
  auto [moved, stats] = execute(a, src, dst, forward);
  CHECK(moved == scatter(a, dst));
  CHECK(stats.total_blocks == forward.moving_blocks());
  CHECK(gather(moved) == a);

  // The reverse schedule restores the original placement bit for bit.
  redist_schedule back =
      schedule_2d(dst.grid, src.grid, src.num_block_rows(), src.num_block_cols());
  matrix b = gather(moved);
  auto [restored, stats2] = execute(b, dst, src, back);
  CHECK(restored == scatter(a, src));
}

TEST_CASE("via-root plans ship at least as many bytes as direct ones") {
  const std::int64_t rows = 47, cols = 33;
  matrix a = numbered(rows, cols);
  for (auto [sr, sc, dr, dc] : {std::array<int, 4>{2, 2, 2, 3},
                                std::array<int, 4>{1, 4, 2, 2},
                                std::array<int, 4>{3, 1, 1, 3}}) {
    block_cyclic_layout src{rows, cols, 8, 8, make_grid(sr, sc)};
    block_cyclic_layout dst{rows, cols, 8, 8, make_grid(dr, dc)};
    redist_schedule direct =
        schedule_2d(src.grid, dst.grid, src.num_block_rows(), src.num_block_cols());
    redist_schedule root =
        schedule_via_root(src.grid, dst.grid, src.num_block_rows(), src.num_block_cols());

    auto [via_direct, ds] = execute(a, src, dst, direct);
    auto [via_root, rs] = execute(a, src, dst, root);
    CHECK(via_direct == via_root);
    CHECK(rs.total_bytes >= ds.total_bytes);
  }
}

TEST_CASE("execute rejects schedules built for other grids") {
  matrix a = numbered(32, 32);
  block_cyclic_layout src{32, 32, 8, 8, make_grid(2, 2)};
  block_cyclic_layout dst{32, 32, 8, 8, make_grid(2, 3)};
  redist_schedule wrong = schedule_2d(make_grid(2, 2), make_grid(3, 2), 4, 4);
  CHECK_THROWS_AS(execute(a, src, dst, wrong), error);
}

TEST_CASE("schedule rendering shows one destination column per source") {
  redist_schedule s = schedule_1d(2, 3, 12);
  CHECK(render_schedule(s) ==
        "redistribution 2 -> 3 over 1x12 blocks\n"
        "entries: destination processor rank, '-' = idle source\n"
        "step | P0 P1\n"
        "   0 |  2  0\n"
        "   1 |  1  2\n"
        "2 steps, 8 blocks moved\n");
}
