#pragma once

#include <map>
#include <string>

#include "bsev/engine/pattern.hpp"
#include "bsev/engine/translate.hpp"
#include "bsev/frontend/nullability.hpp"

namespace bsev {

struct ProofObligation;

/// Per-PO context handed to rule applications: the program, the enclosing
/// class and method, nullability facts, and deterministic fresh counters.
struct RuleEnv {
  RuleEnv(const Program& p, const ProofObligation& po, const NullabilityFacts* facts);

  const Program& program;
  const ProofObligation& po;
  const NullabilityFacts* facts;  // may be null: everything Nullable
  Translator tr;
  TermPtr obj_inv;  // over `heap`; true outside classes

  /// `prefix_k` with k counting per prefix from 1.
  std::string fresh(const std::string& prefix);
  long long fresh_anon();

  /// Logic variable of a method local or parameter.
  TermPtr local(const std::string& name) const;
  Type local_type(const std::string& name) const;

  bool non_null(const Expr& e) const { return facts && facts->non_null(e); }

  /// Set by a rule whose children are alternatives: the node closes when
  /// any child closes. Reset before every rule application.
  bool disjunctive = false;

 private:
  std::map<std::string, int> counters_;
};

// Building blocks shared by the postcondition and session calculi.

/// `s` with the remaining program replaced.
SymbolicState advance(const SymbolicState& s, Prog rest);
/// Side obligation Γ ⇒ {U}phi, the update already applied.
std::unique_ptr<SENode> side_goal(const SymbolicState& s, const TermPtr& phi, std::string label, CeHint hint = {});
/// The location written by a target.
TermPtr target_location(const Target& t, RuleEnv& env);
/// `U` followed by `target := value` (no-op for an empty target).
logic::Update assign_target(const logic::Update& u, const Target& t, const TermPtr& value, RuleEnv& env);

/// Main-branch effect of `fut = o!m(args)`: fresh future literal bound to
/// the callee's interface contract.
SymbolicState async_call_effect(const SymbolicState& s, const Stmt& call, RuleEnv& env, CeHint& hint);
/// Optional null-check side branch for an asynchronous call's receiver.
std::unique_ptr<SENode> receiver_null_check(const SymbolicState& s, const Stmt& call, RuleEnv& env);
/// Main-branch effect of `v = f.get`.
SymbolicState get_effect(const SymbolicState& s, const Stmt& get, RuleEnv& env, CeHint& hint);
/// Main-branch effect of `await g`: heap anonymized, invariant and guard
/// assumed, lastHeap set to the suspension prestate.
SymbolicState await_effect(const SymbolicState& s, const Stmt& aw, RuleEnv& env, CeHint& hint);

/// Heap and assigned-local havoc at a loop head.
logic::Update loop_havoc(const SymbolicState& s, const Stmt& loop, RuleEnv& env, CeHint& hint);

/// Rules for statements that have the same effect in every calculus:
/// skip, local declarations and assignments, field writes, conditionals,
/// builtin calls, and object creation.
std::vector<Rule> silent_rules();

/// The postcondition calculus: silent rules plus calls, get, await,
/// loops, and return against Post(φ).
const RuleSet& post_calculus();

}  // namespace bsev
