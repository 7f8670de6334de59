#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bsev/engine/state.hpp"

namespace bsev {

/// Node kinds of the matchable view of a symbolic state. Every kind has at
/// most one parent; an abstract variable of kind K matches any concrete
/// node whose kind is K or a descendant of K.
enum class Kind {
  Any,
  State,
  Prog,
  ProgSeq,
  ProgNil,
  Stmt,
  SilentStmt,
  Skip,
  VarDecl,
  AssignLocal,
  AssignField,
  If,
  ExprStmt,
  ActionStmt,
  AsyncCall,
  Get,
  SyncCall,
  Await,
  Return,
  New,
  While,
  Expr,
  Spec,
  SpecPost,
  SpecSession,
  Session,
  SCall,
  SSusp,
  SGet,
  SPut,
  SAlt,
  SStar,
  SEnd,
};

const char* to_string(Kind k);
std::optional<Kind> parent(Kind k);
bool is_subkind(Kind k, Kind of);

/// Uniform read-only view used by pattern matching. Children are computed
/// on demand:
///   State       -> [Prog, Spec]
///   ProgSeq     -> [Stmt, Prog]
///   If          -> [Expr, Prog(then), Prog(else)]
///   While       -> [Expr, Prog(body)]
///   SpecPost    -> [Expr]
///   SpecSession -> [Session(head), Session(rest)]
///   SAlt        -> [Session, Session];  SStar -> [Session]
class Matchable {
 public:
  static Matchable of(const SymbolicState& s);
  static Matchable of(const Prog& p);
  static Matchable of(const StmtPtr& s);
  static Matchable of(const SessionTypePtr& t);
  static Matchable of_expr(const ExprPtr& e);
  static Matchable of_spec(const BehavioralSpec& s);
  /// A placeholder standing for an abstract variable; never bound by one.
  static Matchable abstract_node(Kind k);

  Kind kind() const { return kind_; }
  bool is_abstract() const { return abstract_; }
  std::vector<Matchable> children() const;

  const StmtPtr& stmt() const { return stmt_; }
  const Prog& prog() const { return prog_; }
  const SessionTypePtr& session() const { return session_; }
  const ExprPtr& expr() const { return expr_; }

 private:
  Kind kind_ = Kind::Any;
  bool abstract_ = false;
  const SymbolicState* state_ = nullptr;
  Prog prog_;
  StmtPtr stmt_;
  SessionTypePtr session_;
  SessionTypePtr rest_;
  ExprPtr expr_;
  std::shared_ptr<BehavioralSpec> spec_;
};

struct Pattern {
  bool is_var = false;
  std::string name;  // abstract variable name
  Kind kind = Kind::Any;
  std::vector<Pattern> children;  // empty: children unconstrained

  static Pattern var(std::string name, Kind k) { return {true, std::move(name), k, {}}; }
  static Pattern node(Kind k, std::vector<Pattern> children = {}) { return {false, {}, k, std::move(children)}; }
  std::string str() const;
};

/// Pattern for a whole state: a program pattern and a specification pattern.
Pattern state_pattern(Pattern prog, Pattern spec);

using Bindings = std::map<std::string, Matchable>;

/// Binds every abstract variable of `p` to a concrete subnode of `m`, or
/// fails. Node patterns match their kind exactly; variables match subkinds.
std::optional<Bindings> match(const Pattern& p, const Matchable& m);

struct RuleEnv;
using Children = std::vector<std::unique_ptr<SENode>>;

struct Rule {
  std::string name;
  Pattern pattern;
  std::function<Children(const SymbolicState&, const Bindings&, RuleEnv&)> apply;
};

/// An immutable calculus. Construction checks determinism: on a generated
/// corpus covering every statement kind against every specification shape,
/// at most one rule may match.
class RuleSet {
 public:
  using StuckReason = std::function<std::string(const SymbolicState&)>;

  RuleSet(std::string name, std::vector<Rule> rules, StuckReason stuck);

  const std::string& name() const { return name_; }
  const std::vector<Rule>& rules() const { return rules_; }

  /// The unique matching rule, or nullptr.
  const Rule* find(const SymbolicState& s, Bindings& out) const;
  std::string stuck_reason(const SymbolicState& s) const { return stuck_(s); }

  /// One state per (statement kind or empty program) x specification shape.
  static std::vector<SymbolicState> sample_corpus();

 private:
  std::string name_;
  std::vector<Rule> rules_;
  StuckReason stuck_;
};

class RuleConflict : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bsev
