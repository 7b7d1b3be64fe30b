#include "regrid/profiler.hpp"

#include <algorithm>

namespace regrid {

void profiler::register_job(const std::string& job_id) {
  if (jobs_.count(job_id)) fail(errc::duplicate_job, job_id);
  jobs_.emplace(job_id, job_history{});
}

bool profiler::has_job(const std::string& job_id) const { return jobs_.count(job_id) > 0; }

const profiler::job_history& profiler::get(const std::string& job_id) const {
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) fail(errc::unknown_job, job_id);
  return it->second;
}

profiler::job_history& profiler::get(const std::string& job_id) {
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) fail(errc::unknown_job, job_id);
  return it->second;
}

void profiler::record(const std::string& job_id, const performance_record& rec) {
  if (rec.iteration_time < 0 || rec.redistribution_time < 0)
    fail(errc::bad_spec, "negative time in performance record");
  auto& h = get(job_id);

  if (!h.records.empty()) {
    const auto& last = h.records.back();
    if (rec.config != last.config && rec.config.total() > last.config.total()) {
      h.expansions.push_back({last.config, rec.config, last.iteration_time, rec.iteration_time,
                              h.records.size()});
    }
  }

  auto key = std::make_pair(rec.config.rows, rec.config.cols);
  auto [it, fresh] = h.best.emplace(key, rec.iteration_time);
  if (!fresh) it->second = std::min(it->second, rec.iteration_time);
  if (std::none_of(h.visit_order.begin(), h.visit_order.end(),
                   [&](const proc_grid& g) { return g == rec.config; }))
    h.visit_order.push_back(rec.config);
  h.records.push_back(rec);
}

bool profiler::expansion_improved(const std::string& job_id) const {
  const auto& h = get(job_id);
  if (h.expansions.empty()) return true;
  return improved(h.expansions.back());
}

std::vector<shrink_point> profiler::shrink_points(const std::string& job_id) const {
  const auto& h = get(job_id);
  if (h.records.empty()) return {};
  proc_grid cur = h.records.back().config;
  double cur_best = h.best.at({cur.rows, cur.cols});

  std::vector<shrink_point> points;
  for (const auto& g : h.visit_order) {
    if (g.total() >= cur.total()) continue;
    shrink_point p;
    p.config = g;
    p.relinquishable = cur.total() - g.total();
    p.expected_degradation = std::max(0.0, h.best.at({g.rows, g.cols}) - cur_best);
    points.push_back(p);
  }
  std::sort(points.begin(), points.end(), [](const shrink_point& a, const shrink_point& b) {
    return a.config.total() > b.config.total();
  });
  return points;
}

sweet_spot_state profiler::sweet_spot(const std::string& job_id) const {
  const auto& h = get(job_id);
  // A sweet spot is evidenced by an expansion from C that did not improve,
  // followed by a return to C. Once in the history, it never un-happens, so
  // the status is monotone.
  for (const auto& e : h.expansions) {
    if (e.record_index < h.sweet_scan_start) continue;
    if (improved(e)) continue;
    for (std::size_t i = e.record_index + 1; i < h.records.size(); ++i) {
      if (h.records[i].config == e.from) return {spot_status::at_sweet_spot, e.from};
    }
  }
  return {spot_status::probing, proc_grid{}};
}

void profiler::reset_sweet_spot(const std::string& job_id) {
  auto& h = get(job_id);
  h.sweet_scan_start = h.records.size();
}

std::vector<proc_grid> profiler::visited(const std::string& job_id) const {
  return get(job_id).visit_order;
}

proc_grid profiler::current_config(const std::string& job_id) const {
  const auto& h = get(job_id);
  if (h.records.empty()) fail(errc::bad_spec, "no records for " + job_id);
  return h.records.back().config;
}

const std::vector<performance_record>& profiler::history(const std::string& job_id) const {
  return get(job_id).records;
}

std::optional<double> profiler::best_time(const std::string& job_id,
                                          const proc_grid& config) const {
  const auto& h = get(job_id);
  auto it = h.best.find({config.rows, config.cols});
  if (it == h.best.end()) return std::nullopt;
  return it->second;
}

}  // namespace regrid
