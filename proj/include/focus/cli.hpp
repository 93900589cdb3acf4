#pragma once

#include <iosfwd>

namespace focus::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitEmptyEvaluation = 3;

// Entry point for the `focus` binary: stats, recommend, evaluate, serve.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace focus::cli
