// cli.hpp: command-line front end.
//
//   cqt <steady|cumulants|sweep|scaling|validate-kernel> --config FILE [--out PATH]
//
// Exit codes: 0 success, 1 numerical failure, 2 configuration or usage error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cqt {

// args excludes the program name. Results go to `out` unless the config or
// --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cqt
