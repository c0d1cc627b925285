#pragma once

#include <iosfwd>

namespace lapi {

/// Entry point of the `lapi` command-line tool. Exit codes: 0 success, 1 usage / I/O / parse
/// failure, 2 assumption violation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lapi
