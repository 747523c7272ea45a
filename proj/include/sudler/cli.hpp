#pragma once

#include <iosfwd>

namespace sudler {

/// Entry point of the `sudler` tool. Exit codes: 0 pass / success,
/// 1 verification failure, 2 usage or internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sudler
