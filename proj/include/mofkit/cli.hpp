#pragma once

namespace mofkit::cli {

inline constexpr const char* kVersion = "0.1.0";

// Full command-line entry point. Returns the process exit code:
// 0 all checks passed, 1 input or usage error, 2 verification failure.
int run(int argc, char** argv);

} // namespace mofkit::cli
