#pragma once

#include <string>
#include <utility>

#include "bsev/frontend/ast.hpp"

namespace bsev::session_type {

SessionTypePtr call(std::string role, std::string method, ExprPtr formula = nullptr);
SessionTypePtr susp(ExprPtr formula);
SessionTypePtr get(ExprPtr target);
SessionTypePtr put(ExprPtr formula = nullptr);
SessionTypePtr alt(SessionTypePtr l, SessionTypePtr r);
SessionTypePtr star(SessionTypePtr body);
SessionTypePtr end();

/// Sequential composition in right-associated normal form: nested Seqs on
/// the left are flattened and End is dropped unless both sides are End.
SessionTypePtr seq(SessionTypePtr a, SessionTypePtr b);

/// Splits a type into its first action and the remainder (End if none).
/// Alt and Star count as single actions here.
std::pair<SessionTypePtr, SessionTypePtr> split_head(const SessionTypePtr& t);

bool is_end(const SessionTypePtr& t);

/// Surface syntax, e.g. `f!m.g!n.Put(result == 0)`.
std::string to_string(const SessionTypePtr& t);

/// Constructor-tree form used by tests, e.g. `Seq(Call(f,m,true), Put(...))`.
std::string structure(const SessionTypePtr& t);

}  // namespace bsev::session_type
