#pragma once

namespace ract::cli {

/// Full command-line entry point: subcommands train / eval / matrix /
/// aggregate. Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace ract::cli
