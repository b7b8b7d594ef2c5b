#ifndef ELDNN_CLI_HPP
#define ELDNN_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace eldnn::cli {

/// Entry point behind the binary: subcommands train, eval, gap, verify,
/// sweep-lambda; flags --config PATH, --seed N (override), --out DIR.
/// Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace eldnn::cli

#endif
