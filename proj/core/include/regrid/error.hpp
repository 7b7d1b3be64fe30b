#pragma once

#include <stdexcept>
#include <string>

namespace regrid {

/// Failure categories surfaced by the library. Tests match on the code,
/// messages are for humans.
enum class errc {
  no_legal_config,
  at_maximum,
  at_minimum,
  out_of_range,
  schedule_mismatch,
  unknown_job,
  duplicate_job,
  not_at_resize_point,
  no_feasible_allocation,
  bad_spec,
  incomplete_trace,
  infeasible_workload,
  parse_error,
};

const char* errc_name(errc code);

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace regrid
