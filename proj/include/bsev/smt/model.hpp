#pragma once

#include <string>

#include "bsev/frontend/ast.hpp"
#include "bsev/logic/eval.hpp"
#include "bsev/smt/encode.hpp"

namespace bsev::smt {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A satisfying assignment translated back to the logic: variables, fresh
/// constants and future literals in `env.vars`, heap variables and anon
/// heaps as field maps, and program functions interpreted by the solver's
/// definitions. Objects are numbered from 1; null is 0.
struct SolverModel {
  logic::EvalEnv env;
};

/// Reads the text following `sat` in a (get-model) response.
SolverModel parse_model(const std::string& text, const SmtGoal& goal, const Program& p);

}  // namespace bsev::smt
