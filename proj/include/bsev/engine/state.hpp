#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bsev/frontend/ast.hpp"
#include "bsev/logic/term.hpp"
#include "bsev/logic/update.hpp"

namespace bsev {

using logic::TermPtr;

/// Remaining program: a persistent list of statements.
struct ProgCell;
using Prog = std::shared_ptr<const ProgCell>;
struct ProgCell {
  StmtPtr head;
  Prog tail;
};

Prog cons(StmtPtr head, Prog tail);
/// `b` followed by `tail`.
Prog prepend(const Block& b, Prog tail);
std::size_t length(const Prog& p);

struct BehavioralSpec {
  enum class Kind { Post, Session };
  Kind kind = Kind::Post;
  TermPtr post;            // Post: formula over heap, oldHeap, lastHeap, result
  SessionTypePtr session;  // Session: remaining type

  static BehavioralSpec post_spec(TermPtr phi) { return {Kind::Post, std::move(phi), nullptr}; }
  static BehavioralSpec session_spec(SessionTypePtr t) { return {Kind::Session, nullptr, std::move(t)}; }
  std::string str() const;
};

/// Contract learned at an asynchronous call, released at `get`.
struct FutureBinding {
  const MethodSig* callee = nullptr;
  std::vector<std::pair<TermPtr, TermPtr>> args;  // parameter var -> argument value
  logic::Sort value_sort;
};

struct SymbolicState {
  std::vector<TermPtr> gamma;
  logic::Update update;
  Prog prog;
  BehavioralSpec spec;
  std::map<std::string, FutureBinding> futures;
  int loop_depth = 0;  // enclosing loop bodies being verified

  // Session calculus bookkeeping.
  bool in_alternative = false;
  std::vector<TermPtr> deferred;  // constraints emitted at this branch's leaves
  TermPtr exit_goal;              // goal when a loop body finishes (session)
};

/// Modality-free proof goal: /\gamma -> goal.
struct Sequent {
  std::vector<TermPtr> gamma;
  TermPtr goal;
};

/// Model-dependent assignment shown in a counterexample.
struct CeAssign {
  std::string lhs;  // `x` or `this.f`
  Type type;
  TermPtr value;
  bool declares = false;
};

/// How a node relates to the source program, for counterexample rendering.
struct CeHint {
  enum class Kind {
    None,
    Keep,      // statement copied verbatim
    Branch,    // `if` with the taken side
    External,  // statement replaced by modeled assignments
    Loop,      // loop boundary; `inside` when continuing into the body
    Leaf,      // proof obligation
  };
  Kind kind = Kind::None;
  const Stmt* stmt = nullptr;
  bool then_branch = false;
  bool inside = false;
  std::string note;  // e.g. "Assume following assignments while blocked:"
  std::vector<CeAssign> assigns;
  TermPtr returned;  // Leaf from a return: the returned value
  TermPtr full_obligation;
  std::string failed_post;  // source text of the violated specification
};

struct StaticPayload {
  std::string kind;  // "context-set" or "compositionality"
  std::string owner;  // Class.method or Class
  std::vector<std::string> succeeds;
  std::vector<std::string> overlaps;
  TermPtr heap_precondition;
  std::vector<std::pair<std::string, std::string>> roles;
  std::vector<std::pair<std::string, std::string>> local_types;  // method -> type text
  std::string str() const;
};

struct SENode {
  enum class Kind { Symbolic, Logic, Static, Stuck };
  Kind kind = Kind::Symbolic;
  int id = 0;
  int depth = 0;
  std::string rule;   // rule applied at this (inner) node
  std::string label;  // Logic: what the goal checks; Stuck: reason

  std::optional<SymbolicState> state;  // Symbolic
  Sequent sequent;                     // Logic
  StaticPayload payload;               // Static
  CeHint hint;                         // how this node was reached

  bool disjunctive = false;  // closes if any child closes (alternatives)
  std::vector<std::unique_ptr<SENode>> children;
  SENode* parent = nullptr;

  bool leaf() const { return children.empty(); }
};

using SETree = std::unique_ptr<SENode>;

std::unique_ptr<SENode> make_symbolic(SymbolicState s, CeHint hint = {});
std::unique_ptr<SENode> make_logic(Sequent s, std::string label, CeHint hint = {});
std::unique_ptr<SENode> make_stuck(std::string reason, CeHint hint = {});
std::unique_ptr<SENode> make_static(StaticPayload p);

/// Textual rendering of a state's modality: `[stmts ⊩ spec]`.
std::string modality_text(const SymbolicState& s);

/// Indented structured dump: one node per line.
std::string dump_tree(const SENode& root);

/// Visits every node in pre-order.
template <typename F>
void for_each_node(const SENode& n, F&& f) {
  f(n);
  for (const auto& c : n.children) for_each_node(*c, f);
}

std::size_t node_count(const SENode& root);

}  // namespace bsev
