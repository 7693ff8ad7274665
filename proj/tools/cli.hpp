#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uol::cli {

/// Parses `args` (without the program name) and runs one subcommand.
/// Data goes to `out` or the --output path, diagnostics to `err`.
/// Returns 0 on success, 1 on invalid input, 2 on resource or partial failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uol::cli
