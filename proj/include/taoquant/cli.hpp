#pragma once

namespace taoquant::cli {

/// Full command-line entry point, shared by the binary and the CLI tests.
/// Returns the process exit code: 0 success, 1 data/runtime failure,
/// 2 usage or configuration error.
int run(int argc, const char* const* argv);

}  // namespace taoquant::cli
