#pragma once

namespace ehaloha {

/// Entry point of the `ehaloha` command-line tool.
/// Exit codes: 0 success, 2 input/validation error, 3 numerical failure.
int run_cli(int argc, char** argv);

} // namespace ehaloha
