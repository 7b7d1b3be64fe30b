#pragma once

#include <string>

#include "regrid/simkit.hpp"

namespace regrid {

/// Parses the line-oriented workload format:
///
///   cluster 36
///   policy backfill            # fcfs | backfill
///   resizing on                # on | off
///   cost_latency 0.001         # optional cost model overrides
///   cost_bandwidth 1e8
///   cost_element_size 8
///   cost_via_root_multiplier 8
///   via_root off
///   epsilon 0.0                # improvement threshold for probes
///
///   job lu
///     arrival 0
///     kind table               # lu | mm | jacobi | fft | masterworker | table
///     topology grid            # grid | linear
///     problem_size 21000
///     blocks 64 64
///     data 21000 21000         # redistributed array; "data none" disables
///     initial 2x3
///     iterations 34
///     ladder 2x3 3x3 3x4 4x4   # explicit; otherwise enumerated
///     min_procs 4              # enumeration bounds when ladder is implicit
///     granularity 2
///     time 6 110.0             # procs -> seconds per iteration
///     serial_work 1e4          # analytic model knobs
///     comm_coeff 0.5
///     fixed_overhead 0.1
///     work_units 20000         # masterworker knobs
///     unit_time 0.001
///     fail_after 5             # optional forced failure
///   end
///
/// `#` starts a comment; blank lines are ignored. Throws errc::parse_error
/// with a line number on malformed input and errc::bad_spec on semantic
/// problems (unknown kind, initial outside the ladder, ...).
sim_config parse_workload(const std::string& text);

sim_config load_workload(const std::string& path);

/// Inverse of parse_workload for inspection and round-trip tests.
std::string render_workload(const sim_config& config);

}  // namespace regrid
