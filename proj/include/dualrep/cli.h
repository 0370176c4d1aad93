// Command-line front end. Subcommands: conjugate, subdiff, check-cyclic,
// build-h, reconstruct, exposed, bronsted, convergence.
//
// Exit codes: 0 success, 2 falsification (a certificate failed or a search
// did not witness its theorem), 1 input error.

#ifndef DUALREP_CLI_H_
#define DUALREP_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace dualrep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitFalsified = 2;

int run(int argc, char** argv);

// `args` excludes the program name. Reports without --out go to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualrep::cli

#endif  // DUALREP_CLI_H_
