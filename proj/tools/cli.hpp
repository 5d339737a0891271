#pragma once

#include <iosfwd>

namespace polariton::cli {

// Parses argv, runs one verb and returns the process exit code. Diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polariton::cli
