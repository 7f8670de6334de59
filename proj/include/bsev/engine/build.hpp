#pragma once

#include <map>
#include <string>
#include <vector>

#include "bsev/engine/pattern.hpp"
#include "bsev/engine/state.hpp"
#include "bsev/frontend/nullability.hpp"

namespace bsev {

enum class Calculus { Post, Session };

struct ProofObligation {
  enum class Kind { Method, Init, Function };
  Kind kind = Kind::Method;
  std::string target;  // Class.method, Class.<init>, or function name
  const ClassDecl* cls = nullptr;
  const MethodDecl* method = nullptr;
  const FunDecl* function = nullptr;
  SymbolicState initial;
  Calculus calculus = Calculus::Post;
  std::map<std::string, Type> locals;  // parameters and declared locals
};

struct BuildLimits {
  int max_depth = 10000;
};

/// Breadth-first symbolic execution until every leaf is a logic, static,
/// or stuck node. Node ids follow creation order.
SETree build_tree(const Program& p, const ProofObligation& po, const RuleSet& rules,
                  const NullabilityFacts* facts, BuildLimits limits = {});

/// Applies the unique matching rule to a symbolic node, or yields a stuck
/// node with the calculus' reason.
Children se_step(const SymbolicState& s, const RuleSet& rules, RuleEnv& env, std::string& rule_name);

/// Session spec when requested and the method has a Local type, otherwise
/// the method contract.
ProofObligation method_po(const Program& p, const ClassDecl& c, const MethodDecl& m, Calculus calc = Calculus::Post);
ProofObligation init_po(const Program& p, const ClassDecl& c);
ProofObligation function_po(const Program& p, const FunDecl& f);

std::vector<StaticPayload> emit_static_nodes(const Program& p);

}  // namespace bsev
