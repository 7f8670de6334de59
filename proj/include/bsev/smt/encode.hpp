#pragma once

#include <map>
#include <string>
#include <vector>

#include "bsev/frontend/ast.hpp"
#include "bsev/logic/term.hpp"

namespace bsev::smt {

using logic::Sort;
using logic::TermPtr;

struct EncodeOptions {
  bool produce_model = false;  // adds produce-models and (get-model)
};

/// What each declared SMT constant stands for, so that a model can be read
/// back into logic values.
struct SymbolTable {
  struct Var {
    std::string name;  // program variable or fresh constant
    Sort sort;
  };
  struct Heap {
    std::string heap;    // heap variable name; empty for anon heaps
    long long anon = 0;  // anon index
    Sort sort;           // value sort of this monomorphic heap
  };
  struct Field {
    std::string name;
    Sort sort;
  };
  std::map<std::string, Var> vars;
  std::map<std::string, std::string> fut_lits;  // smt name -> literal
  std::map<std::string, Heap> heaps;
  std::map<std::string, Field> fields;
  std::map<std::string, std::pair<Sort, long long>> undefs;
  std::map<std::string, Sort> nulls;              // smt name -> sort
  std::map<std::string, std::string> functions;  // smt name -> program function
};

struct SmtGoal {
  std::string text;
  SymbolTable symbols;
  std::vector<Sort> heap_sorts;  // value sorts that got a monomorphic heap
};

/// SMT-LIB 2 script whose unsatisfiability means /\gamma -> goal is valid.
/// Heaps are split into one array per field value sort; sorts without a
/// field access get no heap. Case expressions are totalized with an
/// unconstrained fallback per distinct partial case. Program functions are
/// uninterpreted, with their contracts asserted whenever they occur.
/// Output is a pure function of the input.
SmtGoal encode(const Program& p, const std::vector<TermPtr>& gamma, const TermPtr& goal, const EncodeOptions& opt = {});

}  // namespace bsev::smt
