#pragma once

#include <string>
#include <vector>

namespace bsretract::cli {

// Exit-code taxonomy.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;    // suite: a hard invariant failed
inline constexpr int kExitBadInput = 2;     // parse errors, invalid (p, q), off-variety input
inline constexpr int kExitFlowBudget = 3;   // numerical non-convergence
inline constexpr int kExitStructure = 4;    // predicted structure absent

/// Runs `bsretract <args...>` (args exclude the program name).
int run(const std::vector<std::string>& args);

}  // namespace bsretract::cli
