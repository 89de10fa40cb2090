#pragma once

#include <iosfwd>

namespace fakecti::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one fakecti subcommand. Data goes to files or `out`; diagnostics to
/// `err`. Returns 0 on success, 1 on operational errors, 2 on usage errors.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fakecti::cli
