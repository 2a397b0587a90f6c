#pragma once

#include <ostream>

namespace trailnet::cli {

/// Exit codes: 0 success, 1 domain error, 2 input or usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace trailnet::cli
