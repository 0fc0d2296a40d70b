#pragma once

#include <cstdint>
#include <iosfwd>

namespace translim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // bad flags, unreadable or malformed input
inline constexpr int kExitNumeric = 2;

inline constexpr std::uint64_t kDefaultSeed = 20110208;

// Entry point of the `translim` tool. Reports go to `out` (or --output),
// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Entry point of `translim-synth`, which writes a synthetic transaction CSV.
int run_synth(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace translim::cli
