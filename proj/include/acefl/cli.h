#ifndef ACEFL_CLI_H_
#define ACEFL_CLI_H_

#include <ostream>

namespace acefl {

// Subcommands: run --config <path> --out <dir> [--seed N] [--quiet],
// verify [--seed N], report --in <dir>. Returns 0 on success, 1 when a
// verification check fails or a run aborts, 2 on config or usage errors.
int CliMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace acefl

#endif  // ACEFL_CLI_H_
