#pragma once

#include <iosfwd>

namespace regrid {

/// Whole command-line tool as a function so tests can drive it.
/// Exit codes: 0 success, 1 usage or parse problem, 2 infeasible workload,
/// 3 verification failure.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace regrid
