#ifndef EPIDDE_CLI_HPP
#define EPIDDE_CLI_HPP

#include <string>
#include <vector>

namespace epidde {

// Batch front end. Subcommands: simulate, r0, equilibria, stability,
// critical-delay, bifurcation, sweep-temperature, sweep-isolation,
// sensitivity, validate. Exit 0 on success, 1 on configuration errors,
// 2 on numerical failures.
int cli_dispatch(const std::vector<std::string>& args);
int cli_dispatch(int argc, const char* const* argv);

}  // namespace epidde

#endif
