#pragma once

// Command-line front end. parse_and_dispatch returns the process exit code:
// 0 on success, 1 on usage errors, 2 on configuration errors and 3 on
// experiment, frame-format, I/O or target errors.

#include <iosfwd>
#include <string>
#include <vector>

namespace isac::cli {

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isac::cli
