#pragma once

#include <ostream>

namespace fdesim {

/// Command-line entry point. Returns 0 on success, 1 when a command fails
/// (one-line diagnostic on `err`) and 2 for usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fdesim
