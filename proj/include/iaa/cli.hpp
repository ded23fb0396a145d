#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iaa::cli {

enum ExitCode : int {
    kSuccess = 0,
    kInputError = 1,
    kFlagged = 2,  // workers flagged, or pilot tier hard or worse
};

/// Runs one subcommand. `args` excludes the program name. Report payloads go
/// to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iaa::cli
