#include "doctest.h"

#include <functional>

#include "bsev/frontend/nullability.hpp"
#include "bsev/frontend/parser.hpp"
#include "bsev/frontend/printer.hpp"
#include "bsev/frontend/session_type.hpp"
#include "bsev/frontend/typecheck.hpp"
#include "fixtures.hpp"

using namespace bsev;

namespace {

std::vector<std::string> errors_of(const std::string& src) {
  Program p = parse(src);
  std::vector<std::string> out;
  for (const auto& e : typecheck(p)) out.push_back(e.message);
  return out;
}

bool mentions(const std::vector<std::string>& errs, const std::string& needle) {
  for (const auto& e : errs)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("monitor listing parses to one class with three methods") {
  Program p = parse(read_fixture("monitor.mabs"));
  REQUIRE(p.classes.size() == 1);
  const auto& c = p.classes[0];
  CHECK(c.name == "Monitor");
  CHECK(c.methods.size() == 3);
  REQUIRE(c.obj_invariant);
  CHECK(to_source(c.obj_invariant) == "this.s != null");
  CHECK(typecheck(p).empty());
}

TEST_CASE("empty source gives an empty program") {
  Program p = parse("");
  CHECK(p.classes.empty());
  CHECK(p.interfaces.empty());
  CHECK(p.functions.empty());
  CHECK(p.datatypes.empty());
}

TEST_CASE("missing brace is reported at end of input") {
  std::string src = "class C(){ Unit m(){ return; }";
  try {
    parse(src);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.found() == "end of input");
    CHECK(e.loc().line == 1);
    CHECK(e.loc().col == static_cast<int>(src.size()) + 1);
  }
}

TEST_CASE("pretty printing round-trips on the fixture corpus") {
  for (const char* name : {"monitor.mabs", "fac.mabs", "three_calls.mabs", "nongreedy.mabs", "context_sets.mabs", "desk.mabs"}) {
    CAPTURE(name);
    Program p = parse(read_fixture(name));
    std::string once = to_source(p);
    std::string twice = to_source(parse(once));
    CHECK(once == twice);
    Program typed = load_program(once);
    CHECK(dump_typed(typed) == dump_typed(load_program(read_fixture(name))));
  }
}

TEST_CASE("defaults without annotations") {
  Program p = load_program("interface I { Unit m(); } class C() implements I { Int x = 1; Unit m() { skip; } }");
  const auto& c = p.classes[0];
  CHECK(c.creation_cond == nullptr);
  CHECK(c.obj_invariant == nullptr);
  CHECK(c.methods[0].sig.pre == nullptr);
  CHECK(c.methods[0].sig.post == nullptr);
  CHECK(c.methods[0].local_type == nullptr);
}

TEST_CASE("type errors") {
  SUBCASE("sort clash in declaration") {
    auto errs = errors_of("class C() { Unit m() { Int x = True; } }");
    REQUIRE(errs.size() == 1);
    CHECK(mentions(errs, "Bool"));
  }
  SUBCASE("non-Bool postcondition") {
    auto errs = errors_of("class C() { [Spec:Ensures(result + 1)] Unit m() { skip; } }");
    CHECK(mentions(errs, "Ensures must be Bool"));
  }
  SUBCASE("all violations are reported") {
    auto errs = errors_of("class C() { Unit m() { Int x = True; Bool y = 3; z = 1; } }");
    CHECK(errs.size() == 3);
  }
  SUBCASE("old only in specifications") {
    auto errs = errors_of("class C() { Int f = 0; Unit m() { this.f = old(this.f); } }");
    CHECK(mentions(errs, "only allowed in specifications"));
  }
  SUBCASE("interface specs cannot mention fields") {
    auto errs = errors_of("interface I { [Spec:Ensures(this.x > 0)] Int m(); }");
    CHECK(mentions(errs, "no 'this'"));
  }
  SUBCASE("creation condition mentions only class parameters") {
    auto errs = errors_of("[Spec:Requires(this.x > 0)] class C(Int p) { Int x = 0; }");
    CHECK(mentions(errs, "not accessible"));
  }
  SUBCASE("context sets resolve to declared methods") {
    auto errs = errors_of("class C() { [Spec:Succeeds(nope)] Unit m() { skip; } }");
    CHECK(mentions(errs, "unknown method 'nope'"));
  }
  SUBCASE("guards are Bool or futures") {
    auto errs = errors_of("class C() { Unit m() { await 3; } }");
    CHECK(mentions(errs, "await guard"));
  }
  SUBCASE("NonNull only on reference types") {
    auto errs = errors_of("class C([NonNull] Int x) { }");
    CHECK(mentions(errs, "NonNull"));
  }
  SUBCASE("unknown role in a local type") {
    auto errs = errors_of(
        "interface I { Unit m(); } class C(I f) { [Spec:Local(\"q!m.Put\")] Unit m() { return; } }");
    CHECK(mentions(errs, "unknown role 'q'"));
  }
  SUBCASE("duplicate global names") {
    auto errs = errors_of("data D = A | B; def Int A() = 1;");
    CHECK(mentions(errs, "duplicate name 'A'"));
  }
  SUBCASE("interface signature must match") {
    auto errs = errors_of("interface I { Int m(); } class C() implements I { Bool m() { return True; } }");
    CHECK(mentions(errs, "does not match"));
  }
}

TEST_CASE("every expression is typed after checking") {
  Program p = load_program(read_fixture("monitor.mabs"));
  std::string dump = dump_typed(p);
  CHECK(dump.find(":?") == std::string::npos);
  CHECK(dump.find("(this.beats:Int)") != std::string::npos);
}

TEST_CASE("session type grammar") {
  CHECK(session_type::structure(parse_session_type("f!m.g!n.Put(result == 0)")) ==
        "Seq(Call(f,m,true), Seq(Call(g,n,true), Put(result == 0)))");
  CHECK(session_type::structure(parse_session_type("((r!m(i > 0).r!n) + r!m(i < 0)).Put")) ==
        "Seq(Alt(Seq(Call(r,m,i > 0), Call(r,n,true)), Call(r,m,i < 0)), Put(true))");
  CHECK(session_type::structure(parse_session_type("(f!m)*.Susp(this.x > 0).Get(fut)")) ==
        "Seq(Star(Call(f,m,true)), Seq(Susp(this.x > 0), Get(fut)))");
  CHECK_THROWS_AS(parse_session_type(""), ParseError);
  CHECK_THROWS_AS(parse_session_type("f!m."), ParseError);
  auto t = parse_session_type("((r!m(i > 0).r!n) + r!m(i < 0)).Put");
  CHECK(session_type::to_string(parse_session_type(session_type::to_string(t))) == session_type::to_string(t));
}

namespace {

// Finds the receiver expression of the k-th asynchronous call in a method.
const Expr& receiver(const Program& p, const std::string& method, std::size_t k) {
  std::vector<const Stmt*> calls;
  std::function<void(const Block&)> walk = [&](const Block& b) {
    for (const auto& s : b) {
      if (s->kind == StmtKind::AsyncCall) calls.push_back(s.get());
      walk(s->then_body);
      walk(s->else_body);
    }
  };
  for (const auto& c : p.classes)
    if (const auto* m = c.find_method(method)) walk(m->body);
  REQUIRE(k < calls.size());
  return *calls[k]->expr;
}

}  // namespace

TEST_CASE("nullability of the guided example") {
  Program p = load_program(read_fixture("three_calls.mabs"));
  auto r = infer_nullability(p);
  CHECK(r.errors.empty());
  CHECK(r.facts.non_null(receiver(p, "m", 0)));
  CHECK_FALSE(r.facts.non_null(receiver(p, "m", 1)));
  CHECK(r.facts.non_null(receiver(p, "m", 2)));
}

TEST_CASE("null guards dominate uses") {
  Program p = load_program(R"(
    interface I { Unit m(); }
    class C(I g) {
      Unit a(I x) { if (x != null) { x!m(); } x!m(); }
      Unit b(I x) { if (x == null) { skip; } else { x!m(); } }
      Unit c() { if (this.g != null) { await True; this.g!m(); } }
      Unit d(I x) { if (x != null && this.g != null) { x!m(); this.g!m(); } }
    })");
  auto r = infer_nullability(p);
  CHECK(r.facts.non_null(receiver(p, "a", 0)));
  CHECK_FALSE(r.facts.non_null(receiver(p, "a", 1)));
  CHECK(r.facts.non_null(receiver(p, "b", 0)));
  CHECK_FALSE(r.facts.non_null(receiver(p, "c", 0)));
  CHECK(r.facts.non_null(receiver(p, "d", 0)));
  CHECK(r.facts.non_null(receiver(p, "d", 1)));
}

TEST_CASE("new results are non-null and loops keep only preserved facts") {
  Program p = load_program(R"(
    interface I { Unit m(); }
    class K() implements I { Unit m() { skip; } }
    class C() {
      Unit a(Int k) {
        Int n = k;
        I x = new K();
        I y = new K();
        while (n > 0) { x!m(); y = null; n = n - 1; }
        y!m();
      }
    })");
  auto r = infer_nullability(p);
  CHECK(r.facts.non_null(receiver(p, "a", 0)));
  CHECK_FALSE(r.facts.non_null(receiver(p, "a", 1)));
}

TEST_CASE("nullable value flowing into a NonNull target is an error") {
  Program p = load_program(R"(
    interface I { Unit m(); }
    class C([NonNull] I f) {
      Unit a(I x) { this.f = x; }
      Unit b(I x) { if (x != null) { this.f = x; } }
    })");
  auto r = infer_nullability(p);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].loc.line == 4);
}
