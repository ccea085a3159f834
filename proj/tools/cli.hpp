#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "isoflow/error.hpp"
#include "isoflow/hessfn.hpp"

namespace isoflow::cli {

enum ExitCode : int { kPass = 0, kNumerical = 2, kResourceLimit = 3, kBadInput = 4 };

int exit_code_for(ErrorKind kind);

/// "2,3,3", "(2,3,3)", "min:4" or "max:4".
HessenbergFunction parse_hessenberg(const std::string& text);

/// Runs one subcommand; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isoflow::cli
