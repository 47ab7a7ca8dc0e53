#ifndef LRCYCLE_COMMANDS_H_
#define LRCYCLE_COMMANDS_H_

#include <ostream>

#include "lrcycle/config.h"

namespace lrcycle {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitSeparable = 2,
  kExitDivergence = 3,
  kExitInvariant = 4,
};

// Each command writes its files under cfg.out and a short summary to `out`.
// They throw; run_command maps exceptions to exit codes.
void cmd_solve(const RunConfig& cfg, std::ostream& out);
void cmd_run(const RunConfig& cfg, std::ostream& out);
void cmd_analyze1d(const RunConfig& cfg, std::ostream& out);
void cmd_lift(const RunConfig& cfg, std::ostream& out, std::ostream& err);
void cmd_hunt(const RunConfig& cfg, std::ostream& out);
void cmd_scale(const RunConfig& cfg, std::ostream& out);
// Returns false if any selected criterion failed.
bool cmd_verify(const RunConfig& cfg, std::ostream& out);
void cmd_spectrum(const RunConfig& cfg, std::ostream& out);

// Dispatches on cfg.command; errors go to `err`.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace lrcycle

#endif  // LRCYCLE_COMMANDS_H_
