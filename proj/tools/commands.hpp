#ifndef GRAINSIZE_TOOLS_COMMANDS_HPP
#define GRAINSIZE_TOOLS_COMMANDS_HPP

#include <string>
#include <vector>

#include "run_config.hpp"

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kAstmWarning = "below 50-grain minimum";

// Each command prints its machine-readable result on stdout and diagnostics on stderr.
int cmd_stitch(const RunConfig& config);
int cmd_prep(const RunConfig& config);
int cmd_analyze(const RunConfig& config, const std::vector<std::string>& inputs);
int cmd_evaluate(const RunConfig& config);
int cmd_robustness(const RunConfig& config);
int cmd_synth(const RunConfig& config);

}  // namespace cli

#endif  // GRAINSIZE_TOOLS_COMMANDS_HPP
