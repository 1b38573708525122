#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace clsi {

// Exit codes: 0 pass, 1 fail verdict, 2 usage/config error, 3 numeric
// divergence.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The invariant suite behind the `selftest` subcommand (also used by the
// acceptance harness). Prints one line per check; returns true when every
// check passes.
bool run_selftest(std::ostream& out, uint64_t seed = 1);

}  // namespace clsi
