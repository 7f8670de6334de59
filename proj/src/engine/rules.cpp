#include "bsev/engine/rules.hpp"

#include <functional>
#include <set>

#include "bsev/engine/build.hpp"
#include "bsev/frontend/printer.hpp"

namespace bsev {

using namespace logic;

RuleEnv::RuleEnv(const Program& p, const ProofObligation& po, const NullabilityFacts* facts)
    : program(p), po(po), facts(facts), tr(p, po.cls), obj_inv(po.cls ? object_invariant(p, *po.cls) : true_()) {}

std::string RuleEnv::fresh(const std::string& prefix) { return prefix + "_" + std::to_string(++counters_[prefix]); }

long long RuleEnv::fresh_anon() { return ++counters_["anon"]; }

Type RuleEnv::local_type(const std::string& name) const {
  auto it = po.locals.find(name);
  if (it == po.locals.end()) throw SortError("unknown local " + name);
  return it->second;
}

TermPtr RuleEnv::local(const std::string& name) const { return var(name, sort_of(local_type(name))); }

SymbolicState advance(const SymbolicState& s, Prog rest) {
  SymbolicState n = s;
  n.prog = std::move(rest);
  return n;
}

std::unique_ptr<SENode> side_goal(const SymbolicState& s, const TermPtr& phi, std::string label, CeHint hint) {
  TermPtr goal = apply_update(s.update, phi);
  if (hint.kind == CeHint::Kind::None) hint.kind = CeHint::Kind::Leaf;
  hint.full_obligation = goal;
  return make_logic(Sequent{s.gamma, goal}, std::move(label), std::move(hint));
}

TermPtr target_location(const Target& t, RuleEnv& env) {
  if (t.kind == Target::Kind::Local) return env.local(t.name);
  if (t.kind == Target::Kind::Field) return env.tr.heap_select(t.name);
  return nullptr;
}

Update assign_target(const Update& u, const Target& t, const TermPtr& value, RuleEnv& env) {
  switch (t.kind) {
    case Target::Kind::None: return u;
    case Target::Kind::Local: return u.assign(env.local(t.name), value);
    case Target::Kind::Field: {
      auto h = heap_var("heap");
      return u.assign(h, store(h, env.tr.field_symbol(t.name), value));
    }
  }
  return u;
}

namespace {

CeHint keep(const Stmt& s) {
  CeHint h;
  h.kind = CeHint::Kind::Keep;
  h.stmt = &s;
  return h;
}

CeHint external(const Stmt& s, std::string note = {}) {
  CeHint h;
  h.kind = CeHint::Kind::External;
  h.stmt = &s;
  h.note = std::move(note);
  return h;
}

CeHint leaf(const Stmt* s) {
  CeHint h;
  h.kind = CeHint::Kind::Leaf;
  h.stmt = s;
  return h;
}

Type target_type(const Target& t, RuleEnv& env) {
  if (t.kind == Target::Kind::Local) return env.local_type(t.name);
  for (const auto& f : env.po.cls->all_fields())
    if (f.name == t.name) return f.type;
  return Type::unknown();
}

void record_target(CeHint& h, const Target& t, const TermPtr& value, RuleEnv& env) {
  if (t.kind == Target::Kind::None || !value) return;
  h.assigns.push_back({t.kind == Target::Kind::Field ? "this." + t.name : t.name, target_type(t, env), value, t.declares});
}

// Every field of the enclosing class read from `heap`, for "while blocked"
// style counterexample annotations.
void record_fields(CeHint& h, const TermPtr& heap, RuleEnv& env) {
  if (!env.po.cls) return;
  for (const auto& f : env.po.cls->all_fields())
    h.assigns.push_back({"this." + f.name, f.type, select(heap, env.tr.field_symbol(f.name)), false});
}

TermPtr fresh_const(RuleEnv& env, const std::string& prefix, const Sort& s) { return var(env.fresh(prefix), s, VarKind::Fresh); }

bool has_value(const Type& t) { return t.kind() != Type::Kind::Unit && !t.is_unknown(); }

}  // namespace

std::unique_ptr<SENode> receiver_null_check(const SymbolicState& s, const Stmt& call, RuleEnv& env) {
  if (env.non_null(*call.expr)) return nullptr;
  return side_goal(s, ne(env.tr.expr(call.expr), null_lit()), "null check", leaf(&call));
}

SymbolicState async_call_effect(const SymbolicState& s, const Stmt& call, RuleEnv& env, CeHint& hint) {
  const auto* iface = env.program.find_interface(call.expr->type.name());
  const MethodSig* sig = iface ? iface->find(call.method) : nullptr;
  if (!sig) throw std::runtime_error("unknown method " + call.method);
  SymbolicState n = s;
  std::string name = env.fresh("fut");
  TermPtr fut = fut_lit(name);
  FutureBinding b;
  b.callee = sig;
  for (std::size_t i = 0; i < sig->params.size(); ++i)
    b.args.emplace_back(param_var(sig->params[i]), apply_update(s.update, env.tr.expr(call.args[i])));
  if (has_value(sig->return_type)) b.value_sort = sort_of(sig->return_type);
  n.futures[name] = std::move(b);
  n.update = assign_target(s.update, call.target, fut, env);
  hint = external(call);
  record_target(hint, call.target, fut, env);
  return n;
}

SymbolicState get_effect(const SymbolicState& s, const Stmt& get, RuleEnv& env, CeHint& hint) {
  SymbolicState n = s;
  hint = external(get);
  const Type& value_type = get.expr->type.inner();
  if (!has_value(value_type)) return n;
  TermPtr r = fresh_const(env, "r", sort_of(value_type));
  TermPtr fut = apply_update(s.update, env.tr.expr(get.expr));
  if (fut->op == Op::FutLit) {
    auto it = s.futures.find(fut->name);
    if (it != s.futures.end() && it->second.callee) {
      Update inst;
      for (const auto& [param, value] : it->second.args) inst.set(param, value);
      inst.set(var("result", r->sort), r);
      TermPtr post = apply_update(inst, interface_contract(env.program, *it->second.callee).post);
      if (!post->is_true()) n.gamma.push_back(post);
    }
  }
  n.update = assign_target(s.update, get.target, r, env);
  record_target(hint, get.target, r, env);
  return n;
}

SymbolicState await_effect(const SymbolicState& s, const Stmt& aw, RuleEnv& env, CeHint& hint) {
  SymbolicState n = s;
  auto h = heap_var("heap");
  long long k = env.fresh_anon();
  n.update = s.update.assign(heap_var("lastHeap"), h).assign(h, anon(h, k));
  if (!env.obj_inv->is_true()) n.gamma.push_back(apply_update(n.update, env.obj_inv));
  if (!aw.future_guard) {
    TermPtr g = apply_update(n.update, env.tr.expr(aw.expr));
    if (!g->is_true()) n.gamma.push_back(g);
  }
  hint = external(aw, "Assume following assignments while suspended:");
  record_fields(hint, apply_update(n.update, h), env);
  return n;
}

namespace {

struct LoopEffects {
  std::vector<std::string> locals;  // assigned, declared outside the loop
  bool heap = false;
  bool suspends = false;
};

void scan(const Block& b, LoopEffects& fx, std::set<std::string>& declared, std::set<std::string>& seen) {
  for (const auto& s : b) {
    if (s->target.kind == Target::Kind::Local) {
      if (s->target.declares) declared.insert(s->target.name);
      else if (!declared.count(s->target.name) && seen.insert(s->target.name).second) fx.locals.push_back(s->target.name);
    }
    if (s->target.kind == Target::Kind::Field) fx.heap = true;
    if (s->kind == StmtKind::SyncCall) fx.heap = true;
    if (s->kind == StmtKind::Await) fx.heap = fx.suspends = true;
    scan(s->then_body, fx, declared, seen);
    scan(s->else_body, fx, declared, seen);
  }
}

}  // namespace

Update loop_havoc(const SymbolicState& s, const Stmt& loop, RuleEnv& env, CeHint& hint) {
  LoopEffects fx;
  std::set<std::string> declared, seen;
  scan(loop.else_body, fx, declared, seen);
  Update u = s.update;
  hint.kind = CeHint::Kind::Loop;
  hint.stmt = &loop;
  for (const auto& x : fx.locals) {
    TermPtr v = var(env.fresh(x), sort_of(env.local_type(x)), VarKind::Fresh);
    u = u.assign(env.local(x), v);
    hint.assigns.push_back({x, env.local_type(x), v, false});
  }
  if (fx.heap) {
    auto h = heap_var("heap");
    if (fx.suspends) u = u.assign(heap_var("lastHeap"), anon(h, env.fresh_anon()));
    u = u.assign(h, anon(h, env.fresh_anon()));
    record_fields(hint, apply_update(u, h), env);
  }
  return u;
}

namespace {

Pattern head(Kind k, Pattern spec) {
  return state_pattern(Pattern::node(Kind::ProgSeq, {Pattern::var("S", k), Pattern::var("REST", Kind::Prog)}), std::move(spec));
}

Pattern any_spec() { return Pattern::var("SPEC", Kind::Spec); }
Pattern post_spec() { return Pattern::var("PHI", Kind::SpecPost); }

const Stmt& stmt_of(const Bindings& b) { return *b.at("S").stmt(); }
const Prog& rest_of(const Bindings& b) { return b.at("REST").prog(); }

Children one(std::unique_ptr<SENode> n) {
  Children c;
  c.push_back(std::move(n));
  return c;
}

TermPtr default_value(const Type& t, RuleEnv& env) {
  switch (t.kind()) {
    case Type::Kind::Int: return int_lit(0);
    case Type::Kind::Bool: return false_();
    case Type::Kind::Interface:
    case Type::Kind::Fut: return null_lit();
    default: return fresh_const(env, "v", sort_of(t));
  }
}

Children rule_skip(const SymbolicState& s, const Bindings& b, RuleEnv&) {
  return one(make_symbolic(advance(s, rest_of(b)), keep(stmt_of(b))));
}

Children rule_decl(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  SymbolicState n = advance(s, rest_of(b));
  TermPtr v = st.expr ? env.tr.expr(st.expr) : default_value(st.target.decl_type, env);
  n.update = assign_target(s.update, st.target, v, env);
  return one(make_symbolic(std::move(n), keep(st)));
}

Children rule_assign(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  SymbolicState n = advance(s, rest_of(b));
  n.update = assign_target(s.update, st.target, env.tr.expr(st.expr), env);
  return one(make_symbolic(std::move(n), keep(st)));
}

Children rule_if(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  TermPtr c = apply_update(s.update, env.tr.expr(st.expr));
  Children out;
  for (bool then : {true, false}) {
    SymbolicState n = advance(s, prepend(then ? st.then_body : st.else_body, rest_of(b)));
    n.gamma.push_back(then ? c : not_(c));
    CeHint h;
    h.kind = CeHint::Kind::Branch;
    h.stmt = &st;
    h.then_branch = then;
    out.push_back(make_symbolic(std::move(n), std::move(h)));
  }
  return out;
}

Children rule_new(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  const ClassDecl* c = env.program.find_class(st.class_name);
  if (!c) throw std::runtime_error("unknown class " + st.class_name);
  Translator ct(env.program, c);
  TermPtr h = heap_var("heap");
  for (std::size_t i = 0; i < c->params.size(); ++i)
    h = store(h, ct.field_symbol(c->params[i].name), apply_update(s.update, env.tr.expr(st.args[i])));
  Update inst;
  inst.set(heap_var("heap"), h);
  Children out;
  TermPtr cond = apply_update(inst, creation_condition(env.program, *c));
  out.push_back(make_logic(Sequent{s.gamma, cond}, "creation condition", [&] {
    CeHint l = leaf(&st);
    l.full_obligation = cond;
    return l;
  }()));
  SymbolicState n = advance(s, rest_of(b));
  TermPtr o = fresh_const(env, "o", Sort::ref());
  n.gamma.push_back(ne(o, null_lit()));
  n.update = assign_target(s.update, st.target, o, env);
  CeHint hint = external(st);
  record_target(hint, st.target, o, env);
  out.push_back(make_symbolic(std::move(n), std::move(hint)));
  return out;
}

// -- postcondition calculus ----------------------------------------------

Children rule_async(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  Children out;
  if (auto nc = receiver_null_check(s, st, env)) out.push_back(std::move(nc));
  const auto* iface = env.program.find_interface(st.expr->type.name());
  const MethodSig* sig = iface ? iface->find(st.method) : nullptr;
  if (!sig) throw std::runtime_error("unknown method " + st.method);
  Update inst;
  for (std::size_t i = 0; i < sig->params.size(); ++i)
    inst.set(param_var(sig->params[i]), apply_update(s.update, env.tr.expr(st.args[i])));
  TermPtr pre = apply_update(inst, interface_contract(env.program, *sig).pre);
  CeHint l = leaf(&st);
  l.full_obligation = pre;
  out.push_back(make_logic(Sequent{s.gamma, pre}, "callee precondition", std::move(l)));
  CeHint hint;
  SymbolicState n = async_call_effect(advance(s, rest_of(b)), st, env, hint);
  out.push_back(make_symbolic(std::move(n), std::move(hint)));
  return out;
}

Children rule_get(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  CeHint hint;
  SymbolicState n = get_effect(advance(s, rest_of(b)), stmt_of(b), env, hint);
  return one(make_symbolic(std::move(n), std::move(hint)));
}

Children rule_sync(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  const MethodDecl* m = env.po.cls ? env.po.cls->find_method(st.method) : nullptr;
  if (!m) throw std::runtime_error("unknown method " + st.method);
  Contract c = method_contract(env.program, *env.po.cls, *m);
  auto h = heap_var("heap");
  TermPtr pre_heap = apply_update(s.update, h);

  // Callee formulas speak about the callee's parameters and `heap`.
  Update call;
  for (std::size_t i = 0; i < m->sig.params.size(); ++i)
    call.set(param_var(m->sig.params[i]), apply_update(s.update, env.tr.expr(st.args[i])));
  Update at_entry = call;
  at_entry.set(h, pre_heap);

  Children out;
  TermPtr pre = apply_update(at_entry, and_(c.pre, env.obj_inv));
  CeHint l = leaf(&st);
  l.full_obligation = pre;
  out.push_back(make_logic(Sequent{s.gamma, pre}, "callee precondition", std::move(l)));

  TermPtr after = anon(pre_heap, env.fresh_anon());
  Update at_exit = call;
  at_exit.set(h, after);
  at_exit.set(heap_var("oldHeap"), pre_heap);
  TermPtr r;
  if (has_value(m->sig.return_type)) {
    r = fresh_const(env, "r", sort_of(m->sig.return_type));
    at_exit.set(result_var(m->sig.return_type), r);
  }
  SymbolicState n = advance(s, rest_of(b));
  for (const auto& f : {c.post, env.obj_inv}) {
    TermPtr t = apply_update(at_exit, f);
    if (!t->is_true()) n.gamma.push_back(t);
  }
  n.update.set(h, after);
  if (r) n.update = assign_target(n.update, st.target, r, env);
  CeHint hint = external(st, "Assume following assignments while blocked:");
  record_fields(hint, after, env);
  record_target(hint, st.target, r, env);
  out.push_back(make_symbolic(std::move(n), std::move(hint)));
  return out;
}

Children rule_await(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  Children out;
  out.push_back(side_goal(s, env.obj_inv, "invariant at suspension", leaf(&st)));
  CeHint hint;
  SymbolicState n = await_effect(advance(s, rest_of(b)), st, env, hint);
  out.push_back(make_symbolic(std::move(n), std::move(hint)));
  return out;
}

Children rule_while(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  TermPtr inv = env.tr.formula(st.invariant);
  Children out;
  out.push_back(side_goal(s, inv, "loop invariant initially", leaf(&st)));

  CeHint hint;
  Update havoc = loop_havoc(s, st, env, hint);
  TermPtr inv_h = apply_update(havoc, inv);
  TermPtr cond_h = apply_update(havoc, env.tr.expr(st.expr));

  SymbolicState body = s;
  body.update = havoc;
  body.prog = prepend(st.else_body, nullptr);
  body.spec = BehavioralSpec::post_spec(inv);
  body.loop_depth = s.loop_depth + 1;
  body.gamma.push_back(inv_h);
  body.gamma.push_back(cond_h);
  CeHint inside = hint;
  inside.inside = true;
  out.push_back(make_symbolic(std::move(body), std::move(inside)));

  SymbolicState use = advance(s, rest_of(b));
  use.update = havoc;
  use.gamma.push_back(inv_h);
  use.gamma.push_back(not_(cond_h));
  out.push_back(make_symbolic(std::move(use), std::move(hint)));
  return out;
}

Children rule_return(const SymbolicState& s, const Bindings& b, RuleEnv& env) {
  const Stmt& st = stmt_of(b);
  TermPtr phi = s.spec.post ? s.spec.post : true_();
  Update u = s.update;
  CeHint l = leaf(&st);
  if (st.expr) {
    TermPtr e = env.tr.expr(st.expr);
    u = u.assign(var("result", e->sort), e);
    l.returned = apply_update(s.update, e);
  }
  TermPtr obligation = and_(phi, env.obj_inv);
  TermPtr goal = apply_update(u, obligation);
  l.full_obligation = goal;
  l.failed_post = to_string(obligation);
  return one(make_logic(Sequent{s.gamma, goal}, "postcondition", std::move(l)));
}

Children rule_post_end(const SymbolicState& s, const Bindings&, RuleEnv&) {
  TermPtr phi = s.spec.post ? s.spec.post : true_();
  TermPtr goal = apply_update(s.update, phi);
  CeHint l = leaf(nullptr);
  l.full_obligation = goal;
  l.failed_post = to_string(phi);
  return one(make_logic(Sequent{s.gamma, goal}, s.loop_depth > 0 ? "loop invariant preserved" : "postcondition", std::move(l)));
}

}  // namespace

std::vector<Rule> silent_rules() {
  return {
      {"skip", head(Kind::Skip, any_spec()), rule_skip},
      {"builtin", head(Kind::ExprStmt, any_spec()), rule_skip},
      {"declare", head(Kind::VarDecl, any_spec()), rule_decl},
      {"assign-local", head(Kind::AssignLocal, any_spec()), rule_assign},
      {"assign-field", head(Kind::AssignField, any_spec()), rule_assign},
      {"if", head(Kind::If, any_spec()), rule_if},
      {"new", head(Kind::New, any_spec()), rule_new},
  };
}

const RuleSet& post_calculus() {
  static const RuleSet rules = [] {
    std::vector<Rule> rs = silent_rules();
    std::vector<Rule> post = {
        {"async-call", head(Kind::AsyncCall, post_spec()), rule_async},
        {"get", head(Kind::Get, post_spec()), rule_get},
        {"sync-call", head(Kind::SyncCall, post_spec()), rule_sync},
        {"await", head(Kind::Await, post_spec()), rule_await},
        {"while", head(Kind::While, post_spec()), rule_while},
        {"return", head(Kind::Return, post_spec()), rule_return},
        {"end", state_pattern(Pattern::node(Kind::ProgNil), post_spec()), rule_post_end},
    };
    rs.insert(rs.end(), post.begin(), post.end());
    return RuleSet("post", std::move(rs), [](const SymbolicState& s) {
      if (!s.prog) return std::string("no rule for the empty program against ") + s.spec.str();
      return "no rule for " + statement_head(*s.prog->head) + " against " + s.spec.str();
    });
  }();
  return rules;
}

}  // namespace bsev
