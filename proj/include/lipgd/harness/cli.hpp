#pragma once

#include <iosfwd>

namespace lipgd::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitRuntime = 2,
  kExitVerifyFail = 3,
};

/// Subcommands:
///   train  --config F --out D
///   sweep  --config F --out D
///   verify --log P        (a log CSV or a directory searched recursively)
///   plot   --in D --out D
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lipgd::harness
