#include "bsev/session/session.hpp"

#include "bsev/engine/build.hpp"
#include "bsev/engine/rules.hpp"
#include "bsev/frontend/printer.hpp"
#include "bsev/frontend/session_type.hpp"

namespace bsev {

using namespace logic;
namespace st = session_type;

bool may_start_with(const SessionTypePtr& t, const Stmt& s) {
  auto h = st::split_head(t).first;
  switch (h->kind) {
    case SessionType::Kind::Call: return s.kind == StmtKind::AsyncCall && s.method == h->method;
    case SessionType::Kind::Susp: return s.kind == StmtKind::Await;
    case SessionType::Kind::Get: return s.kind == StmtKind::Get;
    case SessionType::Kind::Put: return s.kind == StmtKind::Return;
    case SessionType::Kind::Star: return s.kind == StmtKind::While;
    case SessionType::Kind::Alt: return may_start_with(h->parts[0], s) || may_start_with(h->parts[1], s);
    default: return false;
  }
}

namespace {

Pattern head(Kind stmt, Kind action) {
  return state_pattern(
      Pattern::node(Kind::ProgSeq, {Pattern::var("S", stmt), Pattern::var("REST", Kind::Prog)}),
      Pattern::node(Kind::SpecSession, {Pattern::var("H", action), Pattern::var("RT", Kind::Session)}));
}

const Stmt& stmt_of(const Bindings& b) { return *b.at("S").stmt(); }
const Prog& rest_of(const Bindings& b) { return b.at("REST").prog(); }
const SessionType& action_of(const Bindings& b) { return *b.at("H").session(); }
const SessionTypePtr& remaining_of(const Bindings& b) { return b.at("RT").session(); }

SymbolicState reduce(SymbolicState s, const SessionTypePtr& remaining) {
  s.spec = BehavioralSpec::session_spec(remaining);
  return s;
}

CeHint leaf(const Stmt* s) {
  CeHint h;
  h.kind = CeHint::Kind::Leaf;
  h.stmt = s;
  return h;
}

// A leaf of the session derivation: the goal itself plus every constraint
// deferred on this branch.
Children leaf_goals(const SymbolicState& s, TermPtr goal, const std::string& label, const Stmt* at, TermPtr returned) {
  Children out;
  CeHint h = leaf(at);
  h.full_obligation = goal;
  h.returned = std::move(returned);
  out.push_back(make_logic(Sequent{s.gamma, goal}, label, std::move(h)));
  for (const auto& d : s.deferred) {
    CeHint dh = leaf(at);
    dh.full_obligation = d;
    out.push_back(make_logic(Sequent{s.gamma, d}, "deferred constraint", std::move(dh)));
  }
  return out;
}

Children rule_call(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& call = stmt_of(b);
  const SessionType& act = action_of(b);
  Children out;
  if (call.method != act.method) {
    out.push_back(make_stuck("specification expected " + st::to_string(b.at("H").session()) + ", found " +
                             statement_head(call)));
    return out;
  }
  auto role_field = env.po.cls->role_field(act.role);
  if (!role_field) throw std::runtime_error("unknown role " + act.role);

  if (auto nc = receiver_null_check(s, call, env)) out.push_back(std::move(nc));
  TermPtr role_check = eq(env.tr.expr(call.expr), env.tr.heap_select(*role_field));
  out.push_back(side_goal(s, role_check, "role " + act.role, leaf(&call)));

  SymbolicState n = advance(s, rest_of(b));
  if (act.formula) {
    const auto* iface = env.program.find_interface(call.expr->type.name());
    const MethodSig* sig = iface->find(call.method);
    Update inst;
    for (std::size_t i = 0; i < sig->params.size(); ++i)
      inst.set(param_var(sig->params[i]), env.tr.expr(call.args[i]));
    // Callee parameters become the caller's argument expressions, which
    // are then read in the current state.
    TermPtr phi = apply_update(s.update, apply_update(inst, env.tr.expr(act.formula)));
    if (!phi->is_true()) {
      if (s.in_alternative) n.deferred.push_back(phi);
      else out.push_back(make_logic(Sequent{s.gamma, phi}, "call constraint", leaf(&call)));
    }
  }
  CeHint hint;
  n = async_call_effect(n, call, env, hint);
  out.push_back(make_symbolic(reduce(std::move(n), remaining_of(b)), std::move(hint)));
  return out;
}

Children rule_alt(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& next = stmt_of(b);
  const SessionType& alt = action_of(b);
  std::vector<SessionTypePtr> fits;
  for (const auto& a : alt.parts)
    if (may_start_with(a, next)) fits.push_back(a);
  Children out;
  if (fits.empty()) {
    out.push_back(make_stuck("specification expected " + st::to_string(b.at("H").session()) + ", found " +
                             statement_head(next)));
    return out;
  }
  env.disjunctive = fits.size() > 1;
  for (const auto& a : fits) {
    SymbolicState n = reduce(s, st::seq(a, remaining_of(b)));
    if (fits.size() > 1) n.in_alternative = true;
    out.push_back(make_symbolic(std::move(n)));
  }
  return out;
}

Children rule_susp(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& aw = stmt_of(b);
  Children out;
  out.push_back(side_goal(s, env.tr.formula(action_of(b).formula), "suspension condition", leaf(&aw)));
  out.push_back(side_goal(s, env.obj_inv, "invariant at suspension", leaf(&aw)));
  CeHint hint;
  SymbolicState n = await_effect(advance(s, rest_of(b)), aw, env, hint);
  out.push_back(make_symbolic(reduce(std::move(n), remaining_of(b)), std::move(hint)));
  return out;
}

Children rule_get(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& g = stmt_of(b);
  Children out;
  TermPtr same = eq(env.tr.expr(g.expr), env.tr.expr(action_of(b).formula));
  out.push_back(side_goal(s, same, "get target", leaf(&g)));
  CeHint hint;
  SymbolicState n = get_effect(advance(s, rest_of(b)), g, env, hint);
  out.push_back(make_symbolic(reduce(std::move(n), remaining_of(b)), std::move(hint)));
  return out;
}

Children rule_put(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& ret = stmt_of(b);
  if (!st::is_end(remaining_of(b))) {
    Children out;
    out.push_back(make_stuck("specification expected " + st::to_string(remaining_of(b)) + " after " +
                             st::to_string(b.at("H").session()) + ", found end of method"));
    return out;
  }
  Update u = s.update;
  TermPtr returned;
  if (ret.expr) {
    TermPtr e = env.tr.expr(ret.expr);
    u = u.assign(var("result", e->sort), e);
    returned = apply_update(s.update, e);
  }
  TermPtr goal = apply_update(u, env.tr.formula(action_of(b).formula));
  Children out = leaf_goals(s, goal, "put", &ret, returned);
  out.front()->hint.failed_post = st::to_string(b.at("H").session());
  return out;
}

Children rule_star(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& loop = stmt_of(b);
  TermPtr inv = env.tr.formula(loop.invariant);
  Children out;
  out.push_back(side_goal(s, inv, "loop invariant initially", leaf(&loop)));

  CeHint hint;
  Update havoc = loop_havoc(s, loop, env, hint);
  TermPtr inv_h = apply_update(havoc, inv);
  TermPtr cond_h = apply_update(havoc, env.tr.expr(loop.expr));

  SymbolicState body = s;
  body.update = havoc;
  body.prog = prepend(loop.else_body, nullptr);
  body.spec = BehavioralSpec::session_spec(action_of(b).parts[0]);
  body.exit_goal = inv;
  body.deferred.clear();
  body.loop_depth = s.loop_depth + 1;
  body.gamma.push_back(inv_h);
  body.gamma.push_back(cond_h);
  CeHint inside = hint;
  inside.inside = true;
  out.push_back(make_symbolic(std::move(body), std::move(inside)));

  SymbolicState use = reduce(advance(s, rest_of(b)), remaining_of(b));
  use.update = havoc;
  use.gamma.push_back(inv_h);
  use.gamma.push_back(not_(cond_h));
  out.push_back(make_symbolic(std::move(use), std::move(hint)));
  return out;
}

// Empty program against an exhausted type: a loop body finished exactly
// one unfolding.
Children rule_end(const SymbolicState& s, const Bindings&, RuleEnv&) {
  TermPtr goal = apply_update(s.update, s.exit_goal ? s.exit_goal : true_());
  return leaf_goals(s, goal, s.loop_depth > 0 ? "loop invariant preserved" : "end", nullptr, nullptr);
}

}  // namespace

const RuleSet& session_calculus() {
  static const RuleSet rules = [] {
    std::vector<Rule> rs = silent_rules();
    std::vector<Rule> own = {
        {"session-call", head(Kind::AsyncCall, Kind::SCall), rule_call},
        {"session-alt", head(Kind::ActionStmt, Kind::SAlt), rule_alt},
        {"session-susp", head(Kind::Await, Kind::SSusp), rule_susp},
        {"session-get", head(Kind::Get, Kind::SGet), rule_get},
        {"session-put", head(Kind::Return, Kind::SPut), rule_put},
        {"session-star", head(Kind::While, Kind::SStar), rule_star},
        {"session-end",
         state_pattern(Pattern::node(Kind::ProgNil),
                       Pattern::node(Kind::SpecSession, {Pattern::node(Kind::SEnd), Pattern::var("RT", Kind::Session)})),
         rule_end},
    };
    rs.insert(rs.end(), own.begin(), own.end());
    return RuleSet("session", std::move(rs), [](const SymbolicState& s) {
      std::string expected = s.spec.kind == BehavioralSpec::Kind::Session
                                 ? st::to_string(st::split_head(s.spec.session).first)
                                 : s.spec.str();
      std::string found = s.prog ? statement_head(*s.prog->head) : "end of block";
      return "specification expected " + expected + ", found " + found;
    });
  }();
  return rules;
}

}  // namespace bsev
