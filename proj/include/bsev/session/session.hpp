#pragma once

#include "bsev/engine/pattern.hpp"

namespace bsev {

/// The local session-type calculus: the shared silent rules plus rules that
/// consume the head action of the remaining type. Branchings are matched
/// non-greedily: when the next statement fits more than one alternative
/// the tree forks and constraints on call arguments are deferred to the
/// leaves of each branch.
const RuleSet& session_calculus();

/// Whether the first action of `t` could be matched by `s` syntactically.
bool may_start_with(const SessionTypePtr& t, const Stmt& s);

}  // namespace bsev
