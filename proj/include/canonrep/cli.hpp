#pragma once

namespace canonrep {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitDomain = 1,       // invariant violation in the input or a construction
  kExitIo = 2,           // unreadable, unwritable or malformed input, bad usage
  kExitStatistical = 3,  // a statistical acceptance test failed
};

int run_cli(int argc, char** argv);

}  // namespace canonrep
