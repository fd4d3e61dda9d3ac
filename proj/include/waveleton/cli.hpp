#pragma once

#include <string>
#include <vector>

namespace waveleton {

// Entry point of the command-line tool; `args` excludes the program name.
// Parses the subcommand, merges its JSON config file (if any) with flag
// overrides (flags win), executes, writes the produced artifacts plus a
// manifest.json into the run directory, and returns the process exit code:
//   0  success
//   1  validation or usage error (bad flags, bad config, bad parameters)
//   2  runtime failure (I/O, solver breakdown, internal construction)
// Usage errors print the help text to the diagnostic stream.
int run(const std::vector<std::string>& args);

}  // namespace waveleton
