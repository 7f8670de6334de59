#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bsev/frontend/ast.hpp"

namespace bsev {

struct TypeError {
  SourceLoc loc;
  std::string message;

  std::string str() const;
};

/// Type checks `p` in place: every expression gets its `type`, bare names
/// are resolved (field accesses become ExprKind::Field), and `Named` types
/// are resolved to interfaces or datatypes. Returns every violation found;
/// an empty result means `p` is a well-typed program.
std::vector<TypeError> typecheck(Program& p);

/// Thrown by front-end helpers that need a well-typed program.
class FrontendError : public std::runtime_error {
 public:
  explicit FrontendError(std::vector<TypeError> errors);
  const std::vector<TypeError>& errors() const { return errors_; }

 private:
  std::vector<TypeError> errors_;
};

/// parse + typecheck; throws ParseError or FrontendError.
Program load_program(std::string_view source);

}  // namespace bsev
