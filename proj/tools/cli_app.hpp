#pragma once

namespace softcell::cli {

// Full command-line entry point.  Returns the process exit code:
// 0 success, 1 a requested verification failed, 2 bad usage or bad input.
int run_cli(int argc, char** argv);

}  // namespace softcell::cli
