#pragma once

#include <ostream>

namespace mixts {

/// Entry point of the command-line tool. Returns 0 on success, 1 on invalid
/// input or usage, 2 on numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mixts
