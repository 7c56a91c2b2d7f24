#include <cstdio>

#include "cli_app.hpp"

int main(int argc, char** argv) {
    const qdet::cli::CliResult result =
        qdet::cli::run_cli({argv + 1, argv + argc});
    if (!result.out.empty())
        std::fwrite(result.out.data(), 1, result.out.size(), stdout);
    if (!result.err.empty())
        std::fwrite(result.err.data(), 1, result.err.size(), stderr);
    return result.exit_code;
}
