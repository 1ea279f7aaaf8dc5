#pragma once

namespace sabc {

/// Exit statuses of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_input = 2, exit_sampler = 3 };

/// Entry point of the `sabc` tool: generate, discover, evaluate.
int run_cli(int argc, char** argv);

}  // namespace sabc
