#pragma once

#include <string_view>

#include "bsev/frontend/ast.hpp"
#include "bsev/frontend/lexer.hpp"

namespace bsev {

/// Parses a MiniABS compilation unit with `Spec` annotations. Session-type
/// strings in `Local` annotations are parsed eagerly. Throws ParseError.
Program parse(std::string_view source);

/// Parses a single expression (used for specification strings and tests).
ExprPtr parse_expression(std::string_view source);

/// Parses a local session type:
///   L ::= role!m | role!m(phi) | Susp(phi) | Get(e) | Put | Put(phi)
///       | L.L | (L + L) | L*
/// `.` binds tighter than `+`; the result is in right-associated normal form.
SessionTypePtr parse_session_type(std::string_view source);

}  // namespace bsev
