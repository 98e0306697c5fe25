#ifndef SLOWFAST_CLI_H_
#define SLOWFAST_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace slowfast {

// Entry point of the `slowfast` command-line tool. args excludes the program
// name. Returns the process exit code: 0 success, 2 input error, 3 infeasible
// budget or mixture, 4 grounding parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slowfast

#endif  // SLOWFAST_CLI_H_
