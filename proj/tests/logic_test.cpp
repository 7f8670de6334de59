#include "doctest.h"

#include <random>

#include "bsev/logic/eval.hpp"
#include "bsev/logic/update.hpp"

using namespace bsev::logic;

namespace {

TermPtr ivar(const std::string& n) { return var(n, Sort::int_()); }
TermPtr hp() { return heap_var("heap"); }
TermPtr fld(const std::string& n) { return field("C", n, Sort::int_()); }

const std::vector<std::string> kVars = {"a", "b", "c"};
const std::vector<std::string> kFields = {"f", "g"};

struct Gen {
  std::mt19937 rng;
  explicit Gen(unsigned seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  TermPtr heap_term(int depth) {
    if (depth == 0 || pick(3) == 0) return hp();
    return store(heap_term(depth - 1), fld(kFields[pick(2)]), int_term(depth - 1));
  }

  TermPtr int_term(int depth) {
    if (depth == 0 || pick(4) == 0) {
      switch (pick(3)) {
        case 0: return int_lit(pick(7) - 3);
        case 1: return ivar(kVars[pick(3)]);
        default: return select(hp(), fld(kFields[pick(2)]));
      }
    }
    switch (pick(5)) {
      case 0: return arith(Op::Add, int_term(depth - 1), int_term(depth - 1));
      case 1: return arith(Op::Sub, int_term(depth - 1), int_term(depth - 1));
      case 2: return arith(Op::Mul, int_term(depth - 1), int_term(depth - 1));
      case 3: return ite(formula(depth - 1), int_term(depth - 1), int_term(depth - 1));
      default: return select(heap_term(depth - 1), fld(kFields[pick(2)]));
    }
  }

  TermPtr formula(int depth) {
    if (depth == 0 || pick(4) == 0) {
      static const Op ops[] = {Op::Lt, Op::Le, Op::Gt, Op::Ge};
      if (pick(5) == 0) return eq(int_term(0), int_term(0));
      return cmp(ops[pick(4)], int_term(depth > 0 ? 1 : 0), int_term(0));
    }
    switch (pick(4)) {
      case 0: return and_(formula(depth - 1), formula(depth - 1));
      case 1: return or_(formula(depth - 1), formula(depth - 1));
      case 2: return not_(formula(depth - 1));
      default: return implies(formula(depth - 1), formula(depth - 1));
    }
  }

  Update update() {
    Update u;
    int n = 1 + pick(3);
    for (int k = 0; k < n; ++k) {
      if (pick(3) == 0) u.set(hp(), heap_term(2));
      else u.set(ivar(kVars[pick(3)]), int_term(2));
    }
    return u;
  }

  EvalEnv state() {
    EvalEnv env;
    for (const auto& v : kVars) env.vars[v] = Value::int_(pick(7) - 3);
    HeapMap h;
    for (const auto& f : kFields) h[f] = Value::int_(pick(7) - 3);
    env.heaps["heap"] = Value::heap_of(h);
    return env;
  }
};

// State after executing the elementaries of `u` simultaneously in `env`.
EvalEnv execute(const Update& u, const EvalEnv& env) {
  EvalEnv out = env;
  for (const auto& [loc, val] : u.elements()) {
    Value v = evaluate(val, env);
    if (loc->op == Op::HeapVar) out.heaps[loc->name] = v;
    else out.vars[loc->name] = v;
  }
  return out;
}

}  // namespace

TEST_CASE("apply_update examples") {
  auto beats = ivar("beats");
  auto old_beats = ivar("oldBeats");
  Update u;
  u.set(beats, arith(Op::Add, beats, int_lit(1)));
  CHECK(to_string(apply_update(u, cmp(Op::Ge, beats, old_beats))) == "beats + 1 >= oldBeats");

  auto phi = cmp(Op::Ge, select(hp(), fld("beats")), int_lit(1));
  CHECK(apply_update(Update{}, phi) == phi);

  Update h;
  h.set(hp(), store(hp(), fld("beats"), int_lit(0)));
  CHECK(to_string(apply_update(h, phi)) == "0 >= 1");

  Update bad;
  CHECK_THROWS_AS(bad.set(ivar("x"), true_()), SortError);
}

TEST_CASE("simplify_select_store examples") {
  auto s = field("C", "s", Sort::ref());
  CHECK(to_string(simplify_select_store(select(store(hp(), fld("beats"), int_lit(5)), fld("beats")))) == "5");
  CHECK(to_string(simplify_select_store(select(store(hp(), fld("beats"), int_lit(5)), s))) == "heap.s");
  auto opaque = select(anon(hp(), 1), fld("beats"));
  CHECK(simplify_select_store(opaque) == opaque);
  CHECK(to_string(opaque) == "select(anon(heap, 1), this.beats)");
}

TEST_CASE("free_symbols examples") {
  auto s1 = free_symbols(cmp(Op::Ge, ivar("beats"), int_lit(0)));
  CHECK(s1.vars == std::set<std::string>{"beats"});

  auto s2 = free_symbols(forall({{"x", Sort::int_()}}, cmp(Op::Ge, var("x", Sort::int_(), VarKind::Bound), int_lit(0))));
  CHECK(s2.vars.empty());

  auto residual = cmp(Op::Ge, select(anon(hp(), 1), fld("beats")), select(hp(), fld("beats")));
  auto s3 = free_symbols(residual);
  CHECK(s3.vars.empty());
  CHECK(s3.heap_vars == std::set<std::string>{"heap"});
  CHECK(s3.anons == std::set<long long>{1});
  CHECK(s3.fields == std::set<std::string>{"beats"});
  CHECK(to_string(residual) == "select(anon(heap, 1), this.beats) >= heap.beats");
}

TEST_CASE("substitution lemma on random updates") {
  Gen g(20261015);
  int checked = 0;
  for (int n = 0; n < 1500; ++n) {
    Update u = g.update();
    TermPtr phi = g.formula(3);
    EvalEnv sigma = g.state();
    bool lhs = evaluate(apply_update(u, phi), sigma).truth();
    bool rhs = evaluate(phi, execute(u, sigma)).truth();
    REQUIRE_MESSAGE(lhs == rhs, to_string(u) << " applied to " << to_string(phi));
    ++checked;
  }
  CHECK(checked >= 1000);
}

TEST_CASE("sequential composition matches execution in sequence") {
  Gen g(7);
  for (int n = 0; n < 500; ++n) {
    Update u1 = g.update();
    Update u2 = g.update();
    TermPtr phi = g.formula(2);
    EvalEnv sigma = g.state();
    bool lhs = evaluate(apply_update(u1.then(u2), phi), sigma).truth();
    bool rhs = evaluate(phi, execute(u2, execute(u1, sigma))).truth();
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("select/store simplification preserves evaluation") {
  Gen g(99);
  for (int n = 0; n < 1000; ++n) {
    TermPtr t = g.int_term(4);
    EvalEnv sigma = g.state();
    REQUIRE(evaluate(t, sigma) == evaluate(simplify_select_store(t), sigma));
  }
}

TEST_CASE("empty update is identity and updates distribute over connectives") {
  Gen g(3);
  for (int n = 0; n < 200; ++n) {
    TermPtr a = g.formula(2);
    TermPtr b = g.formula(2);
    CHECK(apply_update(Update{}, a) == a);
    Update u = g.update();
    CHECK(equal(apply_update(u, and_(a, b)), and_(apply_update(u, a), apply_update(u, b))));
  }
}

TEST_CASE("euclidean division") {
  CHECK(euclid_div(7, 2) == 3);
  CHECK(euclid_mod(7, 2) == 1);
  CHECK(euclid_div(-7, 2) == -4);
  CHECK(euclid_mod(-7, 2) == 1);
  CHECK(euclid_div(7, -2) == -3);
  CHECK(euclid_mod(7, -2) == 1);
  CHECK(euclid_div(-7, -2) == 4);
  CHECK(euclid_mod(-7, -2) == 1);
}
