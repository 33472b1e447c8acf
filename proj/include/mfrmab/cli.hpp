#pragma once

namespace mfrmab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInvariantViolation = 3;

/// Entry point of the `mfrmab` command-line tool.
int cli_main(int argc, char** argv);

}  // namespace mfrmab
