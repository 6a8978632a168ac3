// cli.hpp — Command-line entry point, shared by the binary and the tests.

#pragma once

namespace uecorr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

/// Dispatches the subcommands (synth, pointwise, patchwise, field, sweep).
/// Returns one of the kExit* codes; failures print a single machine-parsable
/// line `uecorr: error: <category>: <message>` to stderr.
int run_cli(int argc, const char* const* argv);

} // namespace uecorr
