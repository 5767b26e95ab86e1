#ifndef APLCLT_TOOLS_CLI_HPP_
#define APLCLT_TOOLS_CLI_HPP_

#include <string>
#include <vector>

namespace aplclt::cli {

/// Exit codes: 0 ok, 1 parameter or I/O error, 2 resource guard, 3 selftest failure.
int run(int argc, char** argv);
/// Same, with argv[0] supplied internally.
int run(const std::vector<std::string>& args);

}  // namespace aplclt::cli

#endif  // APLCLT_TOOLS_CLI_HPP_
