#pragma once

#include <string>
#include <vector>

#include "bsev/cli/verify.hpp"
#include "bsev/engine/rules.hpp"
#include "bsev/frontend/typecheck.hpp"
#include "bsev/oracle/oracle.hpp"
#include "progen.hpp"

struct CorpusStats {
  int programs = 0;
  int rejected = 0;  // generator output the front end refused
  int valid = 0;
  int failed = 0;
  int violations = 0;  // VALID verdicts the oracle refutes
  std::string first_violation;
};

/// Verifies G.m of `n` generated programs with the postcondition calculus
/// (or `rules`) and runs the oracle on every VALID verdict.
inline CorpusStats run_corpus(int n, unsigned seed, const bsev::RuleSet* rules = nullptr) {
  using namespace bsev;
  CorpusStats st;
  for (int i = 0; i < n; ++i) {
    progen::Gen gen(seed + static_cast<unsigned>(i));
    std::string src = gen.program();
    ++st.programs;
    Program p;
    try {
      p = load_program(src);
    } catch (const std::exception&) {
      ++st.rejected;
      continue;
    }
    NullabilityResult nr = infer_nullability(p);
    cli::VerifyOptions opt;
    opt.target = "G.m";
    opt.post_rules = rules;
    opt.residuals = false;
    cli::TargetResult t = cli::verify_target(p, &nr.facts, "G.m", opt);
    if (t.status != cli::Status::Valid) {
      ++st.failed;
      continue;
    }
    ++st.valid;
    const ClassDecl& c = *p.find_class("G");
    auto vs = oracle::check_soundness(p, c, *c.find_method("m"));
    if (!vs.empty()) {
      ++st.violations;
      if (st.first_violation.empty()) st.first_violation = vs.front().what + " in\n" + src;
    }
  }
  return st;
}

/// The assignment rule for fields, broken: the write is dropped.
inline const bsev::RuleSet& dropped_field_write() {
  using namespace bsev;
  static const RuleSet rs = [] {
    const RuleSet& post = post_calculus();
    std::vector<Rule> rules = post.rules();
    const Rule* skip = nullptr;
    for (const auto& r : post.rules())
      if (r.name == "skip") skip = &r;
    for (auto& r : rules)
      if (r.name == "assign-field") r.apply = skip->apply;
    return RuleSet("post-mutant", std::move(rules), [&post](const SymbolicState& s) { return post.stuck_reason(s); });
  }();
  return rs;
}
