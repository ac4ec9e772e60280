#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssmean::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitEstimation = 2;

/// Entry point behind the ssmean binary. Returns the process exit code:
/// 0 success, 1 I/O or parse failure (including bad flags), 2 when an
/// estimator's preconditions are not met.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssmean::cli
