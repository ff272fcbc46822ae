#ifndef VARKIT_CLI_HPP
#define VARKIT_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace varkit::cli {

/// Process exit statuses shared by every subcommand.
enum ExitStatus : int {
    kSuccess = 0,
    kFindings = 1,  // validation errors, conflicts, incomplete derivations
    kUsage = 2,     // bad flags, unreadable files, malformed documents
};

/// Runs one command line (args excludes the program name) against the given
/// streams and returns the exit status.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace varkit::cli

#endif // VARKIT_CLI_HPP
