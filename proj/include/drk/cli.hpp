#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drk {

inline constexpr int kSchemaVersion = 1;

// Command-line front end. args excludes the program name. Exit codes: 0 success,
// 1 numeric failure or a failed verification, 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace drk
