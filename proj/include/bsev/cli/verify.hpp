#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsev/counterexample/ce.hpp"
#include "bsev/engine/build.hpp"
#include "bsev/smt/model.hpp"
#include "bsev/smt/solver.hpp"

namespace bsev::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VerifyOptions {
  std::string target = "all";  // C.m, C.<init>, C, a function, or all
  Calculus calculus = Calculus::Post;
  smt::SolverConfig solver = smt::default_solver();
  bool ce = false;
  bool residuals = true;  // split SAT goals to find the unprovable conjuncts
  std::string dump_smt_dir;  // empty: no dump
  int jobs = 1;
  const RuleSet* post_rules = nullptr;  // replaces the postcondition calculus
  BuildLimits limits;
};

enum class Status { Valid, ValidUpToStatic, Fail, Error };
const char* status_name(Status s);

struct GoalResult {
  const SENode* node = nullptr;
  smt::Verdict verdict = smt::Verdict::Error;
  std::string message;
  double seconds = 0;
  std::vector<std::string> residual;  // unprovable conjuncts, when SAT
  std::optional<smt::SolverModel> model;
};

struct TargetResult {
  std::string name;
  Status status = Status::Error;
  std::string error;  // Status::Error without a tree
  ProofObligation po;
  SETree tree;
  std::vector<GoalResult> goals;          // every logic leaf
  std::vector<std::size_t> open;          // indices of blamed goals
  std::vector<const SENode*> stuck;       // blamed stuck leaves
  std::vector<StaticPayload> statics;
  std::vector<Counterexample> ces;
  double seconds = 0;
};

struct Report {
  std::vector<TargetResult> targets;  // sorted by name
  int exit_code() const;
  std::size_t verified() const;
};

/// Target names selected by `sel`; throws UsageError for unknown names.
std::vector<std::string> resolve_targets(const Program& p, const std::string& sel);

TargetResult verify_target(const Program& p, const NullabilityFacts* facts, const std::string& name,
                           const VerifyOptions& opt);

/// Verifies every selected target, up to `opt.jobs` at a time.
Report verify(const Program& p, const NullabilityFacts* facts, const VerifyOptions& opt);

std::string report_text(const Report& r);
/// One JSON object per line: target, goal, stuck, static, summary.
std::string report_records(const Report& r);

/// Writes `<stem>_ce<k>.mabs` and `.txt` per counterexample; returns paths.
std::vector<std::string> write_counterexamples(const Report& r, const std::string& dir);

}  // namespace bsev::cli
