#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsev/frontend/ast.hpp"
#include "bsev/logic/eval.hpp"

namespace bsev::oracle {

using logic::HeapMap;
using logic::Value;

struct ConcreteState {
  std::map<std::string, Value> locals;  // parameters and locals
  HeapMap heap;                         // fields of `this`
};

struct SyncEffect {
  HeapMap writes;
  std::optional<Value> result;
};

/// The environment of one run. Futures are numbered from 1 in creation
/// order. Missing entries leave the heap alone; a `get` without a value
/// blocks.
struct EnvScript {
  std::map<long long, Value> get_results;
  std::vector<HeapMap> await_effects;    // applied at the i-th suspension
  std::vector<SyncEffect> sync_effects;  // the i-th synchronous call
};

struct Outcome {
  enum class Kind {
    Returned,
    Diverged,      // step limit exceeded
    RuntimeError,  // see `reason`
    Blocked,       // the script cannot continue or contradicts a contract
  };
  Kind kind = Kind::Returned;
  std::optional<Value> value;  // returned value, absent for Unit
  ConcreteState final;
  std::string reason;
  std::vector<std::string> output;  // println lines
  long long steps = 0;
};

struct RunOptions {
  long long step_limit = 100000;
};

/// Runs one method of `cls` from `in`. Callees are not executed: each
/// call consumes the script, which has to agree with the callee's
/// contract. Contract checks the verifier also performs (callee
/// preconditions, receivers, invariants at suspension, loop invariants,
/// creation conditions) raise RuntimeError with the check's name.
Outcome run(const Program& p, const ClassDecl& cls, const MethodDecl& m, const ConcreteState& in,
            const EnvScript& env, const RunOptions& opt = {});

/// Value of `e` over a state; `old` is the heap at method entry.
Value eval_expr(const Program& p, const ExprPtr& e, const ConcreteState& s, const HeapMap* old = nullptr,
                const std::optional<Value>& result = std::nullopt);

/// Fields of a fresh `cls` object: initializers evaluated in order, the
/// rest (class parameters included) at their type's default.
ConcreteState initial_state(const Program& p, const ClassDecl& cls);

/// toString as in the language: decimal ints, True/False, object_k, fut_k.
std::string render(const Value& v);

/// Runtime errors that a VALID verdict rules out.
bool verifier_checks(const std::string& reason);

struct Domain {
  long long lo = -3;
  long long hi = 3;
  std::size_t budget = 2000;  // enumerate when smaller, sample otherwise
  unsigned seed = 1;
};

struct Violation {
  ConcreteState input;
  EnvScript env;
  Outcome outcome;
  std::string what;
};

/// Runs `m` from every (or a sample of) input and environment over the
/// domain that satisfies precondition and invariant. Violations are
/// normal terminations with postcondition or invariant false and runtime
/// errors that the verifier claims to rule out.
std::vector<Violation> check_soundness(const Program& p, const ClassDecl& cls, const MethodDecl& m, const Domain& d = {});

}  // namespace bsev::oracle
