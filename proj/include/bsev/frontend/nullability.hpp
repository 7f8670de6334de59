#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "bsev/frontend/ast.hpp"

namespace bsev {

/// Nullability of every reference-typed expression occurrence, keyed by
/// Expr::id. Occurrences without an entry are Nullable.
class NullabilityFacts {
 public:
  void set(const Expr& e, Nullability n) { facts_[e.id] = n; }
  Nullability at(const Expr& e) const;
  bool non_null(const Expr& e) const { return at(e) == Nullability::NonNull; }
  std::size_t size() const { return facts_.size(); }

 private:
  std::unordered_map<int, Nullability> facts_;
};

struct NullabilityError {
  SourceLoc loc;
  std::string message;
  std::string str() const;
};

struct NullabilityResult {
  NullabilityFacts facts;
  std::vector<NullabilityError> errors;
};

/// Intraprocedural, flow-sensitive inference over a type-checked program.
/// NonNull sources: declared NonNull fields/params/locals, `new`, futures
/// produced by asynchronous calls, and null-comparison guards on locals
/// and fields. Facts about fields are dropped at suspension points and
/// synchronous self-calls unless the field is declared NonNull.
NullabilityResult infer_nullability(const Program& p);

}  // namespace bsev
