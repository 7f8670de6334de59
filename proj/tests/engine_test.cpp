#include "doctest.h"

#include <random>

#include "bsev/engine/build.hpp"
#include "bsev/engine/rules.hpp"
#include "bsev/frontend/parser.hpp"
#include "bsev/frontend/typecheck.hpp"
#include "bsev/logic/eval.hpp"
#include "fixtures.hpp"

using namespace bsev;
using namespace bsev::logic;

namespace {

struct Loaded {
  Program p;
  NullabilityResult nr;
};

Loaded load(const std::string& src) {
  Loaded l{load_program(src), {}};
  l.nr = infer_nullability(l.p);
  return l;
}

SETree tree_of(const Loaded& l, const std::string& cls, const std::string& method) {
  const ClassDecl* c = l.p.find_class(cls);
  return build_tree(l.p, method_po(l.p, *c, *c->find_method(method)), post_calculus(), &l.nr.facts);
}

std::vector<const SENode*> nodes(const SENode& root, SENode::Kind k) {
  std::vector<const SENode*> out;
  for_each_node(root, [&](const SENode& n) {
    if (n.kind == k) out.push_back(&n);
  });
  return out;
}

std::vector<std::string> gamma_strings(const SymbolicState& s) {
  std::vector<std::string> out;
  for (const auto& g : s.gamma) out.push_back(to_string(g));
  return out;
}

bool contains(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

StmtPtr stmt_from(const std::string& body) {
  Program p = parse("class K { Unit m() { " + body + " } }");
  return p.classes[0].methods[0].body[0];
}

SymbolicState state_with(const std::string& body) {
  Program p = parse("class K { Unit m() { " + body + " } }");
  SymbolicState s;
  s.prog = prepend(p.classes[0].methods[0].body, nullptr);
  s.spec = BehavioralSpec::post_spec(true_());
  return s;
}

const char* kHeartbeatTree =
    "#0 symbolic (async-call) [Fut<Int> req = this.s!httpRequest(); Int status = req.get; if (status == 200) return "
    "this.beats; ⊩ heap.beats >= old.beats && result == heap.beats]\n"
    "  #1 logic [null check] heap.s != null\n"
    "  #2 logic [callee precondition] true\n"
    "  #3 symbolic (get) [Int status = req.get; if (status == 200) return this.beats; ⊩ heap.beats >= old.beats && "
    "result == heap.beats]\n"
    "    #4 symbolic (if) [if (status == 200) return this.beats; ⊩ heap.beats >= old.beats && result == heap.beats]\n"
    "      #5 symbolic (assign-field) [this.beats = this.beats + 1; return this.beats; ⊩ heap.beats >= old.beats && "
    "result == heap.beats]\n"
    "        #7 symbolic (return) [return this.beats; ⊩ heap.beats >= old.beats && result == heap.beats]\n"
    "          #10 logic [postcondition] heap.beats + 1 >= old.beats && heap.beats + 1 == heap.beats + 1 && heap.s != "
    "null\n"
    "      #6 symbolic (sync-call) [this.handleError(); return this.beats; ⊩ heap.beats >= old.beats && result == "
    "heap.beats]\n"
    "        #8 logic [callee precondition] heap.s != null\n"
    "        #9 symbolic (return) [return this.beats; ⊩ heap.beats >= old.beats && result == heap.beats]\n"
    "          #11 logic [postcondition] select(anon(heap, 1), this.beats) >= old.beats && select(anon(heap, 1), "
    "this.beats) == select(anon(heap, 1), this.beats) && select(anon(heap, 1), this.s) != null\n";

}  // namespace

TEST_CASE("pattern matching binds constructor children") {
  auto st = state_with("if (true) { skip; } else { skip; skip; } skip;");
  Pattern if_rule = state_pattern(
      Pattern::node(Kind::ProgSeq,
                    {Pattern::node(Kind::If, {Pattern::var("E", Kind::Expr), Pattern::var("S1", Kind::Prog),
                                              Pattern::var("S2", Kind::Prog)}),
                     Pattern::var("REST", Kind::Prog)}),
      Pattern::var("SPEC", Kind::Spec));
  auto b = match(if_rule, Matchable::of(st));
  REQUIRE(b);
  CHECK(b->size() == 5);
  CHECK(length(b->at("S1").prog()) == 1);
  CHECK(length(b->at("S2").prog()) == 2);
  CHECK(length(b->at("REST").prog()) == 1);
  CHECK(b->at("E").expr()->bool_value);

  auto skip_state = state_with("skip; skip;");
  CHECK_FALSE(match(if_rule, Matchable::of(skip_state)));
}

TEST_CASE("abstract variables follow the subkind table") {
  const std::vector<std::string> bodies = {
      "skip;",          "Int x = 1;",    "Int x = 1; x = 2;", "while (false) { skip; }", "return;",
      "await true;",    "if (true) { skip; }"};
  for (const auto& body : bodies) {
    auto s = state_with(body);
    const Prog& prog = s.prog;
    Matchable m = Matchable::of(prog->head);
    // Every statement is matched by an abstract Stmt and by exactly one of
    // the two statement families.
    CHECK(match(Pattern::var("X", Kind::Stmt), m));
    bool silent = bool(match(Pattern::var("X", Kind::SilentStmt), m));
    bool action = bool(match(Pattern::var("X", Kind::ActionStmt), m));
    CHECK(silent != action);
    CHECK_FALSE(match(Pattern::var("X", Kind::Expr), m));
  }
  // Exhaustive: a variable of kind K matches a node of kind J iff J is K or
  // below K in the table.
  for (int k = 0; k <= static_cast<int>(Kind::SEnd); ++k) {
    for (int j = 0; j <= static_cast<int>(Kind::SEnd); ++j) {
      bool expect = false;
      for (std::optional<Kind> c = static_cast<Kind>(j); c; c = parent(*c))
        if (*c == static_cast<Kind>(k)) expect = true;
      CHECK(is_subkind(static_cast<Kind>(j), static_cast<Kind>(k)) == expect);
    }
  }
  // Abstract placeholders are never bound.
  CHECK_FALSE(match(Pattern::var("X", Kind::Stmt), Matchable::abstract_node(Kind::Skip)));
  CHECK(match(Pattern::node(Kind::Skip), Matchable::of(stmt_from("skip;"))));
}

TEST_CASE("calculus registration rejects overlapping rules") {
  CHECK(post_calculus().rules().size() == 14);
  auto noop = [](const SymbolicState&, const Bindings&, RuleEnv&) { return Children{}; };
  auto p = [](Kind k) {
    return state_pattern(Pattern::node(Kind::ProgSeq, {Pattern::var("S", k), Pattern::var("R", Kind::Prog)}),
                         Pattern::var("SPEC", Kind::Spec));
  };
  CHECK_THROWS_AS(RuleSet("bad", {{"a", p(Kind::Stmt), noop}, {"b", p(Kind::Skip), noop}}, {}), RuleConflict);
  CHECK_NOTHROW(RuleSet("ok", {{"a", p(Kind::While), noop}, {"b", p(Kind::Skip), noop}}, {}));
}

TEST_CASE("se_step examples") {
  Loaded l = load("class K { Int beats = 0; Unit m(Bool e) { if (e) { skip; } else { this.beats = 1; } skip; } }");
  const ClassDecl& k = l.p.classes[0];
  ProofObligation po = method_po(l.p, k, k.methods[0]);
  RuleEnv env(l.p, po, &l.nr.facts);
  std::string rule;

  Children cs = se_step(po.initial, post_calculus(), env, rule);
  CHECK(rule == "if");
  REQUIRE(cs.size() == 2);
  CHECK(to_string(cs[0]->state->gamma.back()) == "e");
  CHECK(to_string(cs[1]->state->gamma.back()) == "!e");
  CHECK(length(cs[0]->state->prog) == 3);  // skip; skip; return;
  CHECK(length(cs[1]->state->prog) == 3);

  Children skip = se_step(*cs[0]->state, post_calculus(), env, rule);
  CHECK(rule == "skip");
  REQUIRE(skip.size() == 1);
  CHECK(length(skip[0]->state->prog) == 2);
  CHECK(skip[0]->state->gamma.size() == cs[0]->state->gamma.size());
}

TEST_CASE("field assignment update agrees with execution") {
  Loaded l = load("class K { Int beats = 0; Unit m() { this.beats = this.beats + 1; } }");
  const ClassDecl& k = l.p.classes[0];
  ProofObligation po = method_po(l.p, k, k.methods[0]);
  RuleEnv env(l.p, po, &l.nr.facts);
  std::string rule;
  Children cs = se_step(po.initial, post_calculus(), env, rule);
  CHECK(rule == "assign-field");
  REQUIRE(cs.size() == 1);
  const Update& u = cs[0]->state->update;
  TermPtr beats = select(heap_var("heap"), field("K", "beats", Sort::int_()));
  TermPtr after = apply_update(u, beats);
  CHECK(to_string(after) == "heap.beats + 1");
  for (int v = -3; v <= 3; ++v) {
    EvalEnv e;
    e.heaps["heap"] = Value::heap_of({{"beats", Value::int_(v)}});
    CHECK(evaluate(after, e).i == v + 1);
  }
}

TEST_CASE("heartbeat tree matches the hand derivation") {
  Loaded l = load(read_fixture("monitor.mabs"));
  auto t = tree_of(l, "Monitor", "heartbeat");
  CHECK(dump_tree(*t) == kHeartbeatTree);
  // Same PO, same tree.
  CHECK(dump_tree(*tree_of(l, "Monitor", "heartbeat")) == kHeartbeatTree);
  CHECK(nodes(*t, SENode::Kind::Stuck).empty());
  CHECK(nodes(*t, SENode::Kind::Logic).size() == 5);
}

TEST_CASE("proof obligations for methods, initialization, and functions") {
  Loaded mon = load(read_fixture("monitor.mabs"));
  const ClassDecl& m = mon.p.classes[0];
  auto hb = method_po(mon.p, m, *m.find_method("heartbeat"));
  CHECK(contains(gamma_strings(hb.initial), "heap.s != null"));
  CHECK(contains(gamma_strings(hb.initial), "oldHeap == heap"));

  Loaded plain = load("class K { Unit m() { return; } }");
  auto t = build_tree(plain.p, method_po(plain.p, plain.p.classes[0], plain.p.classes[0].methods[0]), post_calculus(),
                      &plain.nr.facts);
  REQUIRE(t->children.size() == 1);
  CHECK(t->children[0]->kind == SENode::Kind::Logic);
  CHECK(t->children[0]->sequent.goal->is_true());
  CHECK(gamma_strings(*t->state) == std::vector<std::string>{"oldHeap == heap"});

  auto init = init_po(mon.p, m);
  CHECK(gamma_strings(init.initial) == std::vector<std::string>{"heap.s != null"});
  auto it = build_tree(mon.p, init, post_calculus(), &mon.nr.facts);
  auto goals = nodes(*it, SENode::Kind::Logic);
  REQUIRE(goals.size() == 1);
  CHECK(to_string(goals[0]->sequent.goal) == "heap.s != null");

  Loaded fac = load(read_fixture("fac.mabs"));
  auto fpo = function_po(fac.p, fac.p.functions[0]);
  CHECK(gamma_strings(fpo.initial) ==
        std::vector<std::string>{"forall Int x_1. x_1 >= 0 -> fac(x_1) >= 0", "n >= 0"});
  auto ft = build_tree(fac.p, fpo, post_calculus(), nullptr);
  auto fg = nodes(*ft, SENode::Kind::Logic);
  REQUIRE(fg.size() == 1);
  CHECK(to_string(fg[0]->sequent.goal) == "(if n <= 1 then 1 else n * fac(n - 1)) >= 0");
}

TEST_CASE("sync call and await extend the path condition over an anonymous heap") {
  Loaded l = load(
      "[Spec:ObjInv(this.s != null)] class K(I s) { Int beats = 0;"
      " [Spec:Ensures(this.beats == 0)] Unit clear() { this.beats = 0; }"
      " Unit m() { this.clear(); }"
      " Unit w(Int i) { await this.beats == i; } }"
      "interface I { Unit x(); }");
  auto sync = tree_of(l, "K", "m");
  const SENode* after = sync->children.at(1).get();
  REQUIRE(after->kind == SENode::Kind::Symbolic);
  auto g = gamma_strings(*after->state);
  CHECK(contains(g, "select(anon(heap, 1), this.beats) == 0"));
  CHECK(contains(g, "select(anon(heap, 1), this.s) != null"));
  CHECK(to_string(sync->children.at(0)->sequent.goal) == "heap.s != null");

  auto aw = tree_of(l, "K", "w");
  CHECK(aw->children.at(0)->label == "invariant at suspension");
  auto ga = gamma_strings(*aw->children.at(1)->state);
  CHECK(contains(ga, "select(anon(heap, 1), this.s) != null"));
  CHECK(contains(ga, "select(anon(heap, 1), this.beats) == i"));
  CHECK(to_string(apply_update(aw->children.at(1)->state->update, heap_var("lastHeap"))) == "heap");
}

TEST_CASE("while rule: initially, preserved, used") {
  Loaded l = load(
      "class K { [Spec:Requires(n >= 0)][Spec:Ensures(result == n)] Int m(Int n) { Int i = 0;"
      " [Spec:WhileInv(i <= n)] while (i < n) { i = i + 1; } return i; } }");
  auto t = tree_of(l, "K", "m");
  std::map<std::string, std::string> goals;
  for (const auto* n : nodes(*t, SENode::Kind::Logic)) goals[n->label] = to_string(n->sequent.goal);
  CHECK(goals["loop invariant initially"] == "0 <= n");
  CHECK(goals["loop invariant preserved"] == "i_1 + 1 <= n");
  CHECK(goals["postcondition"] == "i_1 == n");
  const SENode* loop = t->children.at(0).get();
  REQUIRE(loop->rule == "while");
  auto use = gamma_strings(*loop->children.at(2)->state);
  CHECK(contains(use, "i_1 <= n"));
  CHECK(contains(use, "!(i_1 < n)"));

  Loaded f = load("class K { Int x = 0; Unit m() { while (this.x < 3) { this.x = this.x + 1; } } }");
  auto ft = tree_of(f, "K", "m");
  auto body = ft->children.at(1).get();
  CHECK(to_string(apply_update(body->state->update, heap_var("heap"))) == "anon(heap, 1)");
}

TEST_CASE("object creation checks the creation condition and yields a non-null reference") {
  Loaded v = load(
      "interface Server { Int httpRequest(); }"
      "interface Mon { Int heartbeat(); }"
      "[Spec:Requires(this.s != null)] class Monitor(Server s) implements Mon { Int heartbeat() { return 0; } }"
      "class Main(Server srv) { Unit run() { Mon m = new Monitor(this.srv); m!heartbeat(); } }");
  auto t = tree_of(v, "Main", "run");
  REQUIRE(t->rule == "new");
  CHECK(t->children.at(0)->label == "creation condition");
  CHECK(to_string(t->children.at(0)->sequent.goal) == "heap.srv != null");
  const SENode* call = t->children.at(1).get();
  CHECK(call->rule == "async-call");
  for (const auto& c : call->children) CHECK(c->label != "null check");
}

TEST_CASE("depth limit yields a stuck node") {
  Loaded l = load("class K { Unit m() { skip; skip; skip; skip; } }");
  const ClassDecl& k = l.p.classes[0];
  auto t = build_tree(l.p, method_po(l.p, k, k.methods[0]), post_calculus(), &l.nr.facts, {2});
  auto stuck = nodes(*t, SENode::Kind::Stuck);
  REQUIRE(stuck.size() == 1);
  CHECK(stuck[0]->label == "depth");
}

TEST_CASE("static nodes for context sets and local types") {
  Loaded cs = load(read_fixture("context_sets.mabs"));
  auto s = emit_static_nodes(cs.p);
  REQUIRE(s.size() == 1);
  CHECK(s[0].kind == "context-set");
  CHECK(s[0].owner == "Account.grow");
  CHECK(s[0].succeeds == std::vector<std::string>{"open"});
  CHECK(s[0].overlaps == std::vector<std::string>{"touch"});
  CHECK(to_string(s[0].heap_precondition) == "heap.x > 0");

  Loaded tc = load(read_fixture("three_calls.mabs"));
  auto f = emit_static_nodes(tc.p);
  REQUIRE(f.size() == 1);
  CHECK(f[0].kind == "compositionality");
  CHECK(f[0].roles.size() == 2);

  CHECK(emit_static_nodes(load(read_fixture("monitor.mabs")).p).empty());
}

TEST_CASE("nullability pruning removes exactly the null checks of NonNull fields") {
  auto src = [](bool a_nonnull, bool b_nonnull) {
    return std::string("interface I { Unit x(); }") + "class K(" + (a_nonnull ? "[NonNull] " : "") + "I a, " +
           (b_nonnull ? "[NonNull] " : "") +
           "I b) { Unit m() { this.a!x(); this.b!x(); this.a!x(); this.b!x(); this.b!x(); } }";
  };
  auto checks = [](const Loaded& l) {
    std::vector<std::string> out;
    auto t = tree_of(l, "K", "m");
    for (const auto* n : nodes(*t, SENode::Kind::Logic))
      if (n->label == "null check") out.push_back(to_string(n->sequent.goal));
    return out;
  };
  CHECK(checks(load(src(true, true))).empty());
  auto only_b = checks(load(src(true, false)));
  CHECK(only_b == std::vector<std::string>(3, "heap.b != null"));
  auto only_a = checks(load(src(false, true)));
  CHECK(only_a == std::vector<std::string>(2, "heap.a != null"));
}
