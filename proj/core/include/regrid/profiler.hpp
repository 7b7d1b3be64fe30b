#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regrid/grid.hpp"

namespace regrid {

/// One iteration's measurement, reported when a job reaches a resize point.
struct performance_record {
  proc_grid config;
  double iteration_time = 0.0;     ///< seconds for the iteration just finished
  double redistribution_time = 0.0;  ///< cost of the resize preceding it, else 0
  int iteration = 0;               ///< 1-based iteration index
};

/// A configuration a job could fall back to, with the expected price.
struct shrink_point {
  proc_grid config;
  int relinquishable = 0;          ///< processors freed by shrinking to it
  double expected_degradation = 0.0;  ///< best seen there minus best seen now, floored at 0
};

enum class spot_status { probing, at_sweet_spot };

struct sweet_spot_state {
  spot_status status = spot_status::probing;
  proc_grid config;  ///< meaningful only when at_sweet_spot
};

/// Tracks per-job iteration-time history across configurations and answers
/// the policy questions the remap scheduler asks: did the last expansion pay
/// off, what can this job shrink to, and has it found its sweet spot.
class profiler {
 public:
  explicit profiler(double improvement_epsilon = 0.0) : epsilon_(improvement_epsilon) {}

  void register_job(const std::string& job_id);
  bool has_job(const std::string& job_id) const;

  void record(const std::string& job_id, const performance_record& rec);

  /// True when the job never expanded, or its most recent expansion cut the
  /// iteration time by more than epsilon relative to the last iteration on
  /// the prior configuration.
  bool expansion_improved(const std::string& job_id) const;

  /// Visited configurations strictly smaller than the current one, largest
  /// first.
  std::vector<shrink_point> shrink_points(const std::string& job_id) const;

  sweet_spot_state sweet_spot(const std::string& job_id) const;

  /// Forgets sweet-spot evidence seen so far (status becomes probing again).
  void reset_sweet_spot(const std::string& job_id);

  /// Configurations the job has run on, in first-visit order.
  std::vector<proc_grid> visited(const std::string& job_id) const;

  proc_grid current_config(const std::string& job_id) const;
  const std::vector<performance_record>& history(const std::string& job_id) const;

  /// Best (smallest) iteration time seen on `config`, if any.
  std::optional<double> best_time(const std::string& job_id, const proc_grid& config) const;

  double epsilon() const { return epsilon_; }

 private:
  struct expansion_event {
    proc_grid from;
    proc_grid to;
    double prior_time = 0.0;  ///< last iteration time on `from`
    double post_time = 0.0;   ///< first iteration time on `to`
    std::size_t record_index = 0;
  };

  struct job_history {
    std::vector<performance_record> records;
    std::vector<proc_grid> visit_order;
    std::map<std::pair<int, int>, double> best;  ///< (rows, cols) -> best time
    std::vector<expansion_event> expansions;
    std::size_t sweet_scan_start = 0;  ///< records before this are ignored after reset
  };

  const job_history& get(const std::string& job_id) const;
  job_history& get(const std::string& job_id);

  bool improved(const expansion_event& e) const { return e.prior_time - e.post_time > epsilon_; }

  double epsilon_;
  std::map<std::string, job_history> jobs_;
};

}  // namespace regrid
