#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pag {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_usage = 2,
  exit_early_stop = 3,
};

/// Runs `pag <args...>` in-process. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace pag
