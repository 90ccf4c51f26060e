#pragma once

#include <ostream>
#include <span>
#include <string>

namespace mmrec {

/// Runs one `mmrec` invocation. `args` excludes the program name. Returns 0
/// on success, 1 on a runtime error and 2 on a usage error; diagnostics go
/// to `err` as a single line.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace mmrec
