#include "bsev/engine/build.hpp"

#include <deque>

#include "bsev/engine/rules.hpp"
#include "bsev/engine/translate.hpp"

namespace bsev {

using namespace logic;

Children se_step(const SymbolicState& s, const RuleSet& rules, RuleEnv& env, std::string& rule_name) {
  Bindings b;
  const Rule* r = rules.find(s, b);
  Children out;
  if (!r) {
    rule_name.clear();
    out.push_back(make_stuck(rules.stuck_reason(s)));
    return out;
  }
  rule_name = r->name;
  env.disjunctive = false;
  return r->apply(s, b, env);
}

SETree build_tree(const Program& p, const ProofObligation& po, const RuleSet& rules, const NullabilityFacts* facts,
                  BuildLimits limits) {
  RuleEnv env(p, po, facts);
  int next_id = 0;
  SETree root = make_symbolic(po.initial);
  root->id = next_id++;
  std::deque<SENode*> queue{root.get()};
  while (!queue.empty()) {
    SENode* n = queue.front();
    queue.pop_front();
    Children cs;
    if (n->depth >= limits.max_depth) {
      cs.push_back(make_stuck("depth"));
    } else {
      cs = se_step(*n->state, rules, env, n->rule);
      n->disjunctive = env.disjunctive;
    }
    for (auto& c : cs) {
      c->id = next_id++;
      c->depth = n->depth + 1;
      c->parent = n;
      if (c->kind == SENode::Kind::Symbolic) queue.push_back(c.get());
    }
    for (auto& c : cs) n->children.push_back(std::move(c));
  }
  return root;
}

namespace {

void collect_locals(const Block& b, std::map<std::string, Type>& out) {
  for (const auto& s : b) {
    if (s->target.kind == Target::Kind::Local && s->target.declares) out[s->target.name] = s->target.decl_type;
    collect_locals(s->then_body, out);
    collect_locals(s->else_body, out);
  }
}

bool ends_with_return(const Block& b) { return !b.empty() && b.back()->kind == StmtKind::Return; }

std::vector<TermPtr> nontrivial(std::vector<TermPtr> xs) {
  std::vector<TermPtr> out;
  for (auto& x : xs)
    if (x && !x->is_true()) out.push_back(std::move(x));
  return out;
}

}  // namespace

ProofObligation method_po(const Program& p, const ClassDecl& c, const MethodDecl& m, Calculus calc) {
  ProofObligation po;
  po.kind = ProofObligation::Kind::Method;
  po.target = c.name + "." + m.sig.name;
  po.cls = &c;
  po.method = &m;
  po.calculus = calc == Calculus::Session && m.local_type ? Calculus::Session : Calculus::Post;
  for (const auto& prm : m.sig.params) po.locals[prm.name] = prm.type;
  collect_locals(m.body, po.locals);

  Contract ct = method_contract(p, c, m);
  SymbolicState& s = po.initial;
  s.gamma = nontrivial({ct.pre, object_invariant(p, c)});
  s.gamma.push_back(eq(heap_var("oldHeap"), heap_var("heap")));

  Block body = m.body;
  if (!ends_with_return(body)) {
    auto ret = std::make_shared<Stmt>();
    ret->kind = StmtKind::Return;
    ret->id = next_node_id();
    ret->loc = m.sig.loc;
    body.push_back(ret);
  }
  s.prog = prepend(body, nullptr);
  s.spec = po.calculus == Calculus::Session ? BehavioralSpec::session_spec(m.local_type)
                                            : BehavioralSpec::post_spec(ct.post);
  return po;
}

ProofObligation init_po(const Program& p, const ClassDecl& c) {
  ProofObligation po;
  po.kind = ProofObligation::Kind::Init;
  po.target = c.name + ".<init>";
  po.cls = &c;
  SymbolicState& s = po.initial;
  s.gamma = nontrivial({creation_condition(p, c)});
  Block inits;
  for (const auto& f : c.fields) {
    ExprPtr v = f.init;
    if (!v) {
      switch (f.type.kind()) {
        case Type::Kind::Int: v = make_int(0); v->type = Type::int_(); break;
        case Type::Kind::Bool: v = make_bool(false); v->type = Type::bool_(); break;
        case Type::Kind::Interface:
        case Type::Kind::Fut:
          v = std::make_shared<Expr>();
          v->kind = ExprKind::NullLit;
          v->id = next_node_id();
          v->type = Type::null();
          break;
        default: continue;  // data and string fields start unconstrained
      }
    }
    auto st = std::make_shared<Stmt>();
    st->kind = StmtKind::Assign;
    st->id = next_node_id();
    st->loc = f.loc;
    st->target.kind = Target::Kind::Field;
    st->target.name = f.name;
    st->expr = v;
    inits.push_back(st);
  }
  s.prog = prepend(inits, nullptr);
  s.spec = BehavioralSpec::post_spec(object_invariant(p, c));
  return po;
}

ProofObligation function_po(const Program& p, const FunDecl& f) {
  ProofObligation po;
  po.kind = ProofObligation::Kind::Function;
  po.target = f.name;
  po.function = &f;
  for (const auto& prm : f.params) po.locals[prm.name] = prm.type;
  po.locals["result"] = f.return_type;
  Translator t(p, nullptr);
  SymbolicState& s = po.initial;
  s.gamma = nontrivial({function_axiom(p, f), t.formula(f.pre)});
  auto st = std::make_shared<Stmt>();
  st->kind = StmtKind::Assign;
  st->id = next_node_id();
  st->loc = f.loc;
  st->target.kind = Target::Kind::Local;
  st->target.name = "result";
  st->expr = f.body;
  s.prog = cons(st, nullptr);
  s.spec = BehavioralSpec::post_spec(t.formula(f.post));
  return po;
}

std::vector<StaticPayload> emit_static_nodes(const Program& p) {
  std::vector<StaticPayload> out;
  for (const auto& c : p.classes) {
    for (const auto& m : c.methods) {
      if (m.succeeds.empty() && m.overlaps.empty()) continue;
      StaticPayload s;
      s.kind = "context-set";
      s.owner = c.name + "." + m.sig.name;
      s.succeeds = m.succeeds;
      s.overlaps = m.overlaps;
      std::vector<TermPtr> heap_part;
      for (const auto& conj : conjuncts(method_contract(p, c, m).pre))
        if (!free_symbols(conj).heap_vars.empty()) heap_part.push_back(conj);
      s.heap_precondition = and_(heap_part);
      out.push_back(std::move(s));
    }
    StaticPayload comp;
    comp.kind = "compositionality";
    comp.owner = c.name;
    comp.roles = c.roles;
    for (const auto& m : c.methods)
      if (m.local_type) comp.local_types.emplace_back(m.sig.name, m.local_type_text);
    if (!comp.local_types.empty()) out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace bsev
