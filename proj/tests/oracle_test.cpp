#include "doctest.h"

#include "bsev/frontend/parser.hpp"
#include "bsev/frontend/typecheck.hpp"
#include "bsev/oracle/oracle.hpp"
#include "fixtures.hpp"

using namespace bsev;
using namespace bsev::oracle;
using logic::HeapMap;

namespace {

ConcreteState monitor_state(long long beats) {
  ConcreteState s;
  s.heap["s"] = Value::ref(3);
  s.heap["beats"] = Value::int_(beats);
  return s;
}

bool holds(const Program& p, const ExprPtr& e, const Outcome& o, const HeapMap& old) {
  return !e || eval_expr(p, e, o.final, &old, o.value).truth();
}

}  // namespace

TEST_CASE("heartbeat with a successful request counts one beat") {
  Program p = load_program(read_fixture("monitor.mabs"));
  const ClassDecl& c = *p.find_class("Monitor");
  EnvScript env;
  env.get_results[1] = Value::int_(200);
  Outcome o = run(p, c, *c.find_method("heartbeat"), monitor_state(0), env);
  REQUIRE(o.kind == Outcome::Kind::Returned);
  CHECK(o.value == Value::int_(1));
  CHECK(o.final.heap.at("beats") == Value::int_(1));
  CHECK(holds(p, c.find_method("heartbeat")->sig.post, o, monitor_state(0).heap));
}

TEST_CASE("a failed request plus a shrinking handler breaks the heartbeat contract") {
  Program p = load_program(read_fixture("monitor.mabs"));
  const ClassDecl& c = *p.find_class("Monitor");
  EnvScript env;
  env.get_results[1] = Value::int_(201);
  SyncEffect fx;
  fx.writes["beats"] = Value::int_(21238);
  env.sync_effects.push_back(fx);
  ConcreteState in = monitor_state(21239);
  Outcome o = run(p, c, *c.find_method("heartbeat"), in, env);
  REQUIRE(o.kind == Outcome::Kind::Returned);
  CHECK(o.value == Value::int_(21238));
  CHECK_FALSE(holds(p, c.find_method("heartbeat")->sig.post, o, in.heap));
}

TEST_CASE("unscripted get blocks instead of guessing") {
  Program p = load_program(read_fixture("monitor.mabs"));
  const ClassDecl& c = *p.find_class("Monitor");
  Outcome o = run(p, c, *c.find_method("heartbeat"), monitor_state(0), {});
  CHECK(o.kind == Outcome::Kind::Blocked);
}

TEST_CASE("constant return and output") {
  Program p = load_program(R"(
    class K {
      Int f = 2;
      Int zero() { println(toString(this.f + 1)); return 0; }
    }
  )");
  const ClassDecl& c = *p.find_class("K");
  ConcreteState in = initial_state(p, c);
  CHECK(in.heap.at("f") == Value::int_(2));
  Outcome o = run(p, c, *c.find_method("zero"), in, {});
  REQUIRE(o.kind == Outcome::Kind::Returned);
  CHECK(o.value == Value::int_(0));
  REQUIRE(o.output.size() == 1);
  CHECK(o.output[0] == "3");
}

TEST_CASE("checked runtime errors and divergence") {
  Program p = load_program(R"(
    interface I { Int m(Int x); }
    class K(I o) {
      Int n = 0;
      Unit call() { Fut<Int> f = this.o!m(1); }
      [Spec:Ensures(true)]
      Unit spin() { while (true) { this.n = this.n + 1; } }
      Int div(Int d) { return 10 / d; }
    }
  )");
  const ClassDecl& c = *p.find_class("K");
  ConcreteState in = initial_state(p, c);
  Outcome o = run(p, c, *c.find_method("call"), in, {});
  CHECK(o.kind == Outcome::Kind::RuntimeError);
  CHECK(o.reason == "null receiver");
  CHECK(verifier_checks(o.reason));

  o = run(p, c, *c.find_method("spin"), in, {}, RunOptions{500});
  CHECK(o.kind == Outcome::Kind::Diverged);

  in.locals["d"] = Value::int_(0);
  o = run(p, c, *c.find_method("div"), in, {});
  CHECK(o.kind == Outcome::Kind::RuntimeError);
  CHECK_FALSE(verifier_checks(o.reason));
}

TEST_CASE("soundness check finds a seeded bug and passes its fix") {
  Program bad = load_program(R"(
    class K {
      Int x = 0;
      [Spec:Requires(v > 0)][Spec:Ensures(this.x > 1)]
      Unit set(Int v) { this.x = v; }
    }
  )");
  const ClassDecl& c = *bad.find_class("K");
  auto vs = check_soundness(bad, c, *c.find_method("set"));
  REQUIRE_FALSE(vs.empty());
  CHECK(vs.front().input.locals.at("v") == Value::int_(1));

  Program good = load_program(R"(
    class K {
      Int x = 0;
      [Spec:Requires(v > 0)][Spec:Ensures(this.x > 1)]
      Unit set(Int v) { this.x = v + 1; }
    }
  )");
  const ClassDecl& g = *good.find_class("K");
  CHECK(check_soundness(good, g, *g.find_method("set")).empty());
}
