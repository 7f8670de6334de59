#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bsev::smt {

/// S-expression as printed by SMT solvers: an atom or a list. String
/// literals keep their quotes so they can be told apart from symbols.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;

  bool is_atom(std::string_view s) const { return !is_list && atom == s; }
  std::string str() const;
};

class SExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses every top-level s-expression in `text`.
std::vector<SExpr> parse_sexprs(std::string_view text);

}  // namespace bsev::smt
