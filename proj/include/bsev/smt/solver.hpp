#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bsev::smt {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverConfig {
  /// Executable followed by arguments; the script is written to stdin.
  std::vector<std::string> command = {"z3", "-in"};
  double timeout_s = 30;
};

/// `$BSEV_SOLVER` split on whitespace if set, otherwise `z3 -in`.
SolverConfig default_solver();
std::vector<std::string> split_command(const std::string& s);

enum class Verdict { Unsat, Sat, Unknown, Timeout, Error };
const char* verdict_name(Verdict v);

struct SolverResult {
  Verdict verdict = Verdict::Error;
  std::string model;    // everything after the verdict line
  std::string message;  // diagnostics for Error
  double seconds = 0;
};

/// Runs one script in a fresh solver process. Throws SolverError if the
/// executable cannot be started; other failures are reported as Error.
SolverResult run_solver(const std::string& script, const SolverConfig& cfg);

}  // namespace bsev::smt
