#pragma once

#include <string>

#include "bsev/frontend/ast.hpp"

namespace bsev {

/// Surface syntax with minimal parentheses; re-parses to the same tree.
std::string to_source(const ExprPtr& e);
std::string to_source(const Stmt& s, int indent = 0);
std::string to_source(const Block& b, int indent = 0);
std::string to_source(const Program& p);

/// One-line rendering of a statement head (for `if`/`while` only the header).
std::string statement_head(const Stmt& s);

/// Typed-AST dump: one declaration or statement per line, every expression
/// fully parenthesized and suffixed with `:Type`. Stable format used by the
/// `check --dump-ast` command and golden tests.
std::string dump_typed(const Program& p);

}  // namespace bsev
