#pragma once

#include <map>
#include <string>

#include "bsev/frontend/ast.hpp"
#include "bsev/logic/term.hpp"

namespace bsev {

using logic::TermPtr;

/// Logic sort of a source type. Interface and null types share Ref.
logic::Sort sort_of(const Type& t);

/// Translates typed expressions to logic terms. Field accesses read the
/// heap variable `heap`; `old(e)` and `last(e)` read `oldHeap`/`lastHeap`.
class Translator {
 public:
  Translator(const Program& p, const ClassDecl* cls) : p_(p), cls_(cls) {}

  TermPtr expr(const ExprPtr& e) const { return go(e, "heap"); }
  /// Null means true.
  TermPtr formula(const ExprPtr& e) const { return e ? expr(e) : logic::true_(); }

  TermPtr field_symbol(const std::string& name) const;
  TermPtr heap_select(const std::string& field) const;

 private:
  TermPtr go(const ExprPtr& e, const std::string& heap) const;

  const Program& p_;
  const ClassDecl* cls_;
};

TermPtr result_var(const Type& t);
TermPtr param_var(const Param& p);

struct Contract {
  TermPtr pre;
  TermPtr post;
};

/// Requires/Ensures of a class method, conjoined with those of the
/// implemented interface method (whose parameters are renamed).
Contract method_contract(const Program& p, const ClassDecl& c, const MethodDecl& m);

/// Requires/Ensures of an interface method over its own parameters.
Contract interface_contract(const Program& p, const MethodSig& sig);

TermPtr object_invariant(const Program& p, const ClassDecl& c);
TermPtr creation_condition(const Program& p, const ClassDecl& c);

/// forall params. pre -> post[result := f(params)]; null if the contract
/// is trivial.
TermPtr function_axiom(const Program& p, const FunDecl& f);

}  // namespace bsev
