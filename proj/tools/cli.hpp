#pragma once

#include <iosfwd>

namespace ham::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kInvalidInput = 2 };

/// Entry point of the `hambreak` command; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ham::cli
