#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace optdes::cli {

enum Exit { ok = 0, usage = 1, domain = 2, no_convergence = 3 };

/// Runs one command line (without the program name). Payloads go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optdes::cli
