#pragma once

// The eb2jml command line: translate, check and parse.

#include <iosfwd>
#include <string>
#include <vector>

namespace eb2jml::cli {

enum ExitCode : int { Ok = 0, CheckFailed = 1, InputError = 2, LimitReached = 3 };

/// Runs one command. `args` excludes the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eb2jml::cli
