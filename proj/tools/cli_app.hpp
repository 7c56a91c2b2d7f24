#pragma once

#include <string>
#include <vector>

namespace qdet::cli {

struct CliResult {
    int exit_code = 0;
    std::string out;  // stdout payload
    std::string err;  // warnings and error reports
};

// Runs one command-line invocation (args exclude the program name) and
// captures its output.  Exit codes: 0 success, 1 reproduction mismatch,
// 2 validation failure, 3 numerical degeneracy.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace qdet::cli
