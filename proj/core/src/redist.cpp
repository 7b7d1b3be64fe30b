#include "regrid/redist.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace regrid {

std::int64_t redist_schedule::moving_blocks() const {
  std::int64_t n = 0;
  for (const auto& step : steps)
    for (const auto& t : step.transfers) n += static_cast<std::int64_t>(t.blocks.size());
  return n;
}

namespace {

struct class_edge {
  std::int64_t k = 0;  ///< message class, i.e. residue mod lcm
  int src = 0;
  int dst = 0;
  bool local() const { return src == dst; }
};

/// Proper edge coloring of the bipartite class graph using exactly
/// max-degree colors (alternating-chain construction). Returns one bucket of
/// class edges per color.
std::vector<std::vector<class_edge>> color_classes(int p, int q, bool include_locals) {
  std::int64_t L = std::lcm<std::int64_t>(p, q);
  std::vector<class_edge> edges;
  for (std::int64_t k = 0; k < L; ++k) {
    class_edge e{k, static_cast<int>(k % p), static_cast<int>(k % q)};
    if (!include_locals && e.local()) continue;
    edges.push_back(e);
  }
  if (edges.empty()) return {};

  std::vector<int> ldeg(p, 0), rdeg(q, 0);
  for (const auto& e : edges) {
    ++ldeg[e.src];
    ++rdeg[e.dst];
  }
  int max_deg = std::max(*std::max_element(ldeg.begin(), ldeg.end()),
                         *std::max_element(rdeg.begin(), rdeg.end()));

  const int none = -1;
  // slot[node][color] = edge index currently holding that color at the node
  std::vector<std::vector<int>> lslot(p, std::vector<int>(max_deg, none));
  std::vector<std::vector<int>> rslot(q, std::vector<int>(max_deg, none));
  std::vector<int> color(edges.size(), none);

  auto first_free = [&](const std::vector<int>& slots) {
    for (int c = 0; c < max_deg; ++c)
      if (slots[c] == none) return c;
    return none;
  };

  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    int u = edges[ei].src, v = edges[ei].dst;
    int a = first_free(lslot[u]);
    int b = first_free(rslot[v]);
    if (a != b) {
      // Swap colors a and b along the maximal alternating chain that starts
      // at v; afterwards color a is free at both endpoints.
      std::vector<std::size_t> chain;
      int node = v;
      bool right_side = true;
      int want = a;
      for (;;) {
        int e = right_side ? rslot[node][want] : lslot[node][want];
        if (e == none) break;
        chain.push_back(static_cast<std::size_t>(e));
        node = right_side ? edges[static_cast<std::size_t>(e)].src
                          : edges[static_cast<std::size_t>(e)].dst;
        right_side = !right_side;
        want = (want == a) ? b : a;
      }
      for (std::size_t e : chain) {
        lslot[edges[e].src][color[e]] = none;
        rslot[edges[e].dst][color[e]] = none;
        color[e] = (color[e] == a) ? b : a;
      }
      for (std::size_t e : chain) {
        lslot[edges[e].src][color[e]] = static_cast<int>(e);
        rslot[edges[e].dst][color[e]] = static_cast<int>(e);
      }
    }
    color[ei] = a;
    lslot[u][a] = static_cast<int>(ei);
    rslot[v][a] = static_cast<int>(ei);
  }

  int used = *std::max_element(color.begin(), color.end()) + 1;
  std::vector<std::vector<class_edge>> buckets(static_cast<std::size_t>(used));
  for (std::size_t ei = 0; ei < edges.size(); ++ei)
    buckets[static_cast<std::size_t>(color[ei])].push_back(edges[ei]);
  return buckets;
}

std::vector<std::int64_t> residue_indices(std::int64_t residue, std::int64_t modulus,
                                          std::int64_t limit) {
  std::vector<std::int64_t> out;
  for (std::int64_t b = residue; b < limit; b += modulus) out.push_back(b);
  return out;
}

void check_grid(const proc_grid& g) {
  if (g.rows < 1 || g.cols < 1) fail(errc::bad_spec, "empty processor grid");
}

}  // namespace

redist_schedule schedule_1d(int p, int q, std::int64_t nblocks) {
  if (p < 1 || q < 1) fail(errc::bad_spec, "processor counts must be positive");
  std::int64_t L = std::lcm<std::int64_t>(p, q);
  if (nblocks == 0) nblocks = L;
  if (nblocks < 0) fail(errc::bad_spec, "negative block count");

  redist_schedule sched;
  sched.src_grid = make_linear(p);
  sched.dst_grid = make_linear(q);
  sched.num_block_rows = 1;
  sched.num_block_cols = nblocks;

  for (const auto& bucket : color_classes(p, q, /*include_locals=*/false)) {
    transfer_step step;
    for (const auto& e : bucket) {
      transfer_triple t;
      t.src = proc_coord{0, e.src};
      t.dst = proc_coord{0, e.dst};
      for (std::int64_t b : residue_indices(e.k, L, nblocks)) t.blocks.push_back({0, b});
      if (!t.blocks.empty()) step.transfers.push_back(std::move(t));
    }
    if (!step.transfers.empty()) sched.steps.push_back(std::move(step));
  }
  return sched;
}

redist_schedule schedule_2d(const proc_grid& src, const proc_grid& dst, std::int64_t nbr,
                            std::int64_t nbc) {
  check_grid(src);
  check_grid(dst);
  if (nbr < 1 || nbc < 1) fail(errc::bad_spec, "empty block grid");

  std::int64_t Lr = std::lcm<std::int64_t>(src.rows, dst.rows);
  std::int64_t Lc = std::lcm<std::int64_t>(src.cols, dst.cols);

  auto row_steps = color_classes(src.rows, dst.rows, /*include_locals=*/true);
  auto col_steps = color_classes(src.cols, dst.cols, /*include_locals=*/true);

  redist_schedule sched;
  sched.src_grid = src;
  sched.dst_grid = dst;
  sched.num_block_rows = nbr;
  sched.num_block_cols = nbc;

  for (const auto& rs : row_steps) {
    for (const auto& cs : col_steps) {
      transfer_step step;
      for (const auto& re : rs) {
        auto rows = residue_indices(re.k, Lr, nbr);
        if (rows.empty()) continue;
        for (const auto& ce : cs) {
          if (re.local() && ce.local()) continue;  // block does not move
          auto cols = residue_indices(ce.k, Lc, nbc);
          if (cols.empty()) continue;
          transfer_triple t;
          t.src = proc_coord{re.src, ce.src};
          t.dst = proc_coord{re.dst, ce.dst};
          for (std::int64_t i : rows)
            for (std::int64_t j : cols) t.blocks.push_back({i, j});
          step.transfers.push_back(std::move(t));
        }
      }
      if (!step.transfers.empty()) sched.steps.push_back(std::move(step));
    }
  }
  return sched;
}

redist_schedule schedule_via_root(const proc_grid& src, const proc_grid& dst, std::int64_t nbr,
                                  std::int64_t nbc) {
  check_grid(src);
  check_grid(dst);
  if (nbr < 1 || nbc < 1) fail(errc::bad_spec, "empty block grid");

  redist_schedule sched;
  sched.src_grid = src;
  sched.dst_grid = dst;
  sched.num_block_rows = nbr;
  sched.num_block_cols = nbc;
  sched.via_root = true;
  const proc_coord root{0, 0};

  auto owned = [&](const proc_grid& g, proc_coord p) {
    std::vector<block_coord> blocks;
    for (std::int64_t i = p.r; i < nbr; i += g.rows)
      for (std::int64_t j = p.c; j < nbc; j += g.cols) blocks.push_back({i, j});
    return blocks;
  };

  for (int r = 0; r < src.rows; ++r) {
    for (int c = 0; c < src.cols; ++c) {
      proc_coord p{r, c};
      if (p == root) continue;
      auto blocks = owned(src, p);
      if (blocks.empty()) continue;
      transfer_step step;
      step.transfers.push_back({p, root, std::move(blocks)});
      sched.steps.push_back(std::move(step));
    }
  }
  for (int r = 0; r < dst.rows; ++r) {
    for (int c = 0; c < dst.cols; ++c) {
      proc_coord p{r, c};
      if (p == root) continue;
      auto blocks = owned(dst, p);
      if (blocks.empty()) continue;
      transfer_step step;
      step.transfers.push_back({root, p, std::move(blocks)});
      sched.steps.push_back(std::move(step));
    }
  }
  return sched;
}

std::pair<block_store, transfer_stats> execute(const matrix& global,
                                               const block_cyclic_layout& src_layout,
                                               const block_cyclic_layout& dst_layout,
                                               const redist_schedule& schedule) {
  src_layout.validate();
  dst_layout.validate();
  if (src_layout.global_rows != dst_layout.global_rows ||
      src_layout.global_cols != dst_layout.global_cols ||
      src_layout.block_rows != dst_layout.block_rows ||
      src_layout.block_cols != dst_layout.block_cols)
    fail(errc::schedule_mismatch, "layouts disagree on array or block dimensions");
  if (schedule.src_grid.rows != src_layout.grid.rows ||
      schedule.src_grid.cols != src_layout.grid.cols ||
      schedule.dst_grid.rows != dst_layout.grid.rows ||
      schedule.dst_grid.cols != dst_layout.grid.cols)
    fail(errc::schedule_mismatch, "schedule grids do not match layouts");
  if (schedule.num_block_rows != src_layout.num_block_rows() ||
      schedule.num_block_cols != src_layout.num_block_cols())
    fail(errc::schedule_mismatch, "schedule block grid does not match layouts");

  block_store store = scatter(global, src_layout);
  store.layout = dst_layout;

  transfer_stats stats;
  for (const auto& step : schedule.steps) {
    std::int64_t max_bytes = 0;
    for (const auto& t : step.transfers) {
      auto& from = store.procs[t.src];
      auto& to = store.procs[t.dst];
      std::int64_t bytes = 0;
      for (const auto& b : t.blocks) {
        auto it = from.find(b);
        if (it == from.end())
          fail(errc::schedule_mismatch, "processor (" + std::to_string(t.src.r) + "," +
                                            std::to_string(t.src.c) + ") does not hold block (" +
                                            std::to_string(b.i) + "," + std::to_string(b.j) + ")");
        bytes += static_cast<std::int64_t>(it->second.data.size() * sizeof(double));
        to.insert_or_assign(b, std::move(it->second));
        from.erase(it);
        ++stats.total_blocks;
      }
      stats.total_bytes += bytes;
      max_bytes = std::max(max_bytes, bytes);
    }
    stats.step_max_bytes.push_back(max_bytes);
  }

  // Drop processors whose store emptied out so equality against a freshly
  // scattered destination store is structural.
  for (auto it = store.procs.begin(); it != store.procs.end();) {
    if (it->second.empty())
      it = store.procs.erase(it);
    else
      ++it;
  }
  return {std::move(store), std::move(stats)};
}

double redist_cost(const redist_schedule& schedule, const cost_params& params) {
  if (params.bandwidth <= 0) fail(errc::bad_spec, "bandwidth must be positive");
  double cost = 0.0;
  for (const auto& step : schedule.steps) {
    std::size_t largest = 0;
    for (const auto& t : step.transfers) largest = std::max(largest, t.blocks.size());
    cost += params.latency_per_step +
            static_cast<double>(largest) * params.block_elems * params.element_size /
                params.bandwidth;
  }
  if (schedule.via_root) cost *= params.via_root_multiplier;
  return cost;
}

std::string render_schedule(const redist_schedule& schedule) {
  auto rank = [](const proc_grid& g, proc_coord p) { return p.r * g.cols + p.c; };
  int nsrc = schedule.src_grid.total();

  std::ostringstream out;
  out << "redistribution " << to_string(schedule.src_grid) << " -> "
      << to_string(schedule.dst_grid) << " over " << schedule.num_block_rows << "x"
      << schedule.num_block_cols << " blocks";
  if (schedule.via_root) out << " (via root)";
  out << "\n";
  out << "entries: destination processor rank, '-' = idle source\n";

  out << "step |";
  for (int s = 0; s < nsrc; ++s) out << " P" << s;
  out << "\n";
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    out << std::string(4 - std::min<std::size_t>(4, std::to_string(i).size()), ' ') << i << " |";
    std::vector<std::string> cells(static_cast<std::size_t>(nsrc), "-");
    for (const auto& t : schedule.steps[i].transfers)
      cells[static_cast<std::size_t>(rank(schedule.src_grid, t.src))] =
          std::to_string(rank(schedule.dst_grid, t.dst));
    for (int s = 0; s < nsrc; ++s) {
      out << " ";
      // right-align within the P<k> column width
      std::size_t w = 1 + std::to_string(s).size();
      const std::string& cell = cells[static_cast<std::size_t>(s)];
      if (cell.size() < w) out << std::string(w - cell.size(), ' ');
      out << cell;
    }
    out << "\n";
  }
  out << schedule.steps.size() << " steps, " << schedule.moving_blocks() << " blocks moved\n";
  return out.str();
}

}  // namespace regrid
