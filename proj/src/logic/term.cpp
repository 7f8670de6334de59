#include "bsev/logic/term.hpp"

#include <functional>

namespace bsev::logic {

std::string Sort::str() const {
  switch (kind) {
    case Kind::Int: return "Int";
    case Kind::Bool: return "Bool";
    case Kind::Ref: return "Ref";
    case Kind::Fut: return "Fut";
    case Kind::String: return "String";
    case Kind::Heap: return "Heap";
    case Kind::Data: return name;
  }
  return "?";
}

namespace {

std::shared_ptr<Term> node(Op op, Sort s) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->sort = std::move(s);
  return t;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw SortError(what);
}

void require_sort(const TermPtr& t, const Sort& s, const char* ctx) {
  require(t->sort == s, std::string(ctx) + ": expected " + s.str() + ", got " + t->sort.str());
}

bool ref_like(const Sort& s) { return s.kind == Sort::Kind::Ref || s.kind == Sort::Kind::Fut || s.kind == Sort::Kind::String; }

}  // namespace

TermPtr var(std::string name, Sort s, VarKind k) {
  auto t = node(Op::Var, std::move(s));
  t->name = std::move(name);
  t->var_kind = k;
  return t;
}

TermPtr heap_var(std::string name) {
  auto t = node(Op::HeapVar, Sort::heap());
  t->name = std::move(name);
  return t;
}

TermPtr field(std::string owner, std::string name, Sort s) {
  auto t = node(Op::Field, std::move(s));
  t->owner = std::move(owner);
  t->name = std::move(name);
  return t;
}

TermPtr select(TermPtr heap, TermPtr f) {
  require_sort(heap, Sort::heap(), "select");
  require(f->op == Op::Field, "select: second argument must be a field symbol");
  auto t = node(Op::Select, f->sort);
  t->args = {std::move(heap), std::move(f)};
  return t;
}

TermPtr store(TermPtr heap, TermPtr f, TermPtr value) {
  require_sort(heap, Sort::heap(), "store");
  require(f->op == Op::Field, "store: second argument must be a field symbol");
  require(value->sort == f->sort || (value->op == Op::Null && ref_like(f->sort)),
          "store: value of sort " + value->sort.str() + " into field " + f->name);
  auto t = node(Op::Store, Sort::heap());
  t->args = {std::move(heap), std::move(f), std::move(value)};
  return t;
}

TermPtr anon(TermPtr heap, long long index) {
  require_sort(heap, Sort::heap(), "anon");
  auto t = node(Op::Anon, Sort::heap());
  t->value = index;
  t->args = {std::move(heap)};
  return t;
}

TermPtr int_lit(long long v) {
  auto t = node(Op::IntLit, Sort::int_());
  t->value = v;
  return t;
}

TermPtr bool_lit(bool b) { return b ? true_() : false_(); }

TermPtr true_() {
  static const TermPtr t = [] {
    auto n = node(Op::BoolLit, Sort::bool_());
    n->value = 1;
    return TermPtr(n);
  }();
  return t;
}

TermPtr false_() {
  static const TermPtr t = node(Op::BoolLit, Sort::bool_());
  return t;
}

TermPtr null_lit() {
  static const TermPtr t = node(Op::Null, Sort::ref());
  return t;
}

TermPtr fut_lit(std::string name) {
  auto t = node(Op::FutLit, Sort::fut());
  t->name = std::move(name);
  return t;
}

TermPtr fun(std::string name, std::vector<TermPtr> args, Sort result) {
  auto t = node(Op::Fun, std::move(result));
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

TermPtr ctor(std::string name, std::vector<TermPtr> args, Sort data) {
  auto t = node(Op::Ctor, std::move(data));
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

TermPtr is_ctor(std::string c, TermPtr x) {
  require(x->sort.kind == Sort::Kind::Data, "constructor test on non-datatype");
  auto t = node(Op::IsCtor, Sort::bool_());
  t->name = std::move(c);
  t->args = {std::move(x)};
  return t;
}

TermPtr ctor_arg(std::string c, long long pos, TermPtr x, Sort s) {
  require(x->sort.kind == Sort::Kind::Data, "constructor argument of non-datatype");
  auto t = node(Op::CtorArg, std::move(s));
  t->name = std::move(c);
  t->value = pos;
  t->args = {std::move(x)};
  return t;
}

TermPtr ite(TermPtr c, TermPtr a, TermPtr b) {
  require_sort(c, Sort::bool_(), "ite condition");
  Sort s = a->op == Op::Null ? b->sort : a->sort;
  require(a->sort == b->sort || a->op == Op::Null || b->op == Op::Null, "ite branches differ in sort");
  if (c->is_true()) return a;
  if (c->is_false()) return b;
  auto t = node(Op::Ite, s);
  t->args = {std::move(c), std::move(a), std::move(b)};
  return t;
}

TermPtr case_(TermPtr scrutinee, std::vector<CaseArm> arms, Sort s) {
  require(scrutinee->sort.kind == Sort::Kind::Data, "case on non-datatype");
  auto t = node(Op::Case, std::move(s));
  t->args = {std::move(scrutinee)};
  t->arms = std::move(arms);
  return t;
}

TermPtr undef(Sort s, long long index) {
  auto t = node(Op::Undef, std::move(s));
  t->value = index;
  return t;
}

TermPtr not_(TermPtr a) {
  require_sort(a, Sort::bool_(), "not");
  if (a->op == Op::BoolLit) return bool_lit(!a->value);
  if (a->op == Op::Not) return a->args[0];
  auto t = node(Op::Not, Sort::bool_());
  t->args = {std::move(a)};
  return t;
}

namespace {

TermPtr junction(Op op, std::vector<TermPtr> xs) {
  const bool is_and = op == Op::And;
  std::vector<TermPtr> flat;
  for (auto& x : xs) {
    require_sort(x, Sort::bool_(), is_and ? "and" : "or");
    if (x->op == Op::BoolLit) {
      if ((x->value != 0) == is_and) continue;  // neutral element
      return x;                                 // absorbing element
    }
    if (x->op == op) flat.insert(flat.end(), x->args.begin(), x->args.end());
    else flat.push_back(std::move(x));
  }
  if (flat.empty()) return bool_lit(is_and);
  if (flat.size() == 1) return flat[0];
  auto t = node(op, Sort::bool_());
  t->args = std::move(flat);
  return t;
}

}  // namespace

TermPtr and_(std::vector<TermPtr> xs) { return junction(Op::And, std::move(xs)); }
TermPtr and_(TermPtr a, TermPtr b) { return and_(std::vector<TermPtr>{std::move(a), std::move(b)}); }
TermPtr or_(std::vector<TermPtr> xs) { return junction(Op::Or, std::move(xs)); }
TermPtr or_(TermPtr a, TermPtr b) { return or_(std::vector<TermPtr>{std::move(a), std::move(b)}); }

TermPtr implies(TermPtr a, TermPtr b) {
  require_sort(a, Sort::bool_(), "implies");
  require_sort(b, Sort::bool_(), "implies");
  if (a->is_true()) return b;
  if (a->is_false() || b->is_true()) return true_();
  auto t = node(Op::Implies, Sort::bool_());
  t->args = {std::move(a), std::move(b)};
  return t;
}

TermPtr eq(TermPtr a, TermPtr b) {
  bool ok = a->sort == b->sort || (a->op == Op::Null && ref_like(b->sort)) || (b->op == Op::Null && ref_like(a->sort));
  require(ok, "equality between " + a->sort.str() + " and " + b->sort.str());
  auto t = node(Op::Eq, Sort::bool_());
  t->args = {std::move(a), std::move(b)};
  return t;
}

TermPtr ne(TermPtr a, TermPtr b) { return not_(eq(std::move(a), std::move(b))); }

TermPtr cmp(Op op, TermPtr a, TermPtr b) {
  require(op == Op::Lt || op == Op::Le || op == Op::Gt || op == Op::Ge, "cmp: not a comparison");
  require_sort(a, Sort::int_(), "comparison");
  require_sort(b, Sort::int_(), "comparison");
  auto t = node(op, Sort::bool_());
  t->args = {std::move(a), std::move(b)};
  return t;
}

TermPtr arith(Op op, TermPtr a, TermPtr b) {
  require(op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div || op == Op::Mod, "arith: bad operator");
  require_sort(a, Sort::int_(), "arithmetic");
  require_sort(b, Sort::int_(), "arithmetic");
  auto t = node(op, Sort::int_());
  t->args = {std::move(a), std::move(b)};
  return t;
}

TermPtr neg(TermPtr a) {
  require_sort(a, Sort::int_(), "negation");
  if (a->op == Op::IntLit) return int_lit(-a->value);
  auto t = node(Op::Neg, Sort::int_());
  t->args = {std::move(a)};
  return t;
}

namespace {

TermPtr quantifier(Op op, std::vector<BoundVar> vars, TermPtr body) {
  require_sort(body, Sort::bool_(), "quantifier body");
  if (vars.empty() || body->op == Op::BoolLit) return body;
  auto t = node(op, Sort::bool_());
  t->bound = std::move(vars);
  t->args = {std::move(body)};
  return t;
}

}  // namespace

TermPtr forall(std::vector<BoundVar> vars, TermPtr body) { return quantifier(Op::Forall, std::move(vars), std::move(body)); }
TermPtr exists(std::vector<BoundVar> vars, TermPtr body) { return quantifier(Op::Exists, std::move(vars), std::move(body)); }

bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->sort != b->sort || a->name != b->name || a->value != b->value ||
      a->var_kind != b->var_kind || a->owner != b->owner || a->args.size() != b->args.size() ||
      a->bound.size() != b->bound.size() || a->arms.size() != b->arms.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  for (std::size_t i = 0; i < a->bound.size(); ++i)
    if (a->bound[i].name != b->bound[i].name || a->bound[i].sort != b->bound[i].sort) return false;
  for (std::size_t i = 0; i < a->arms.size(); ++i) {
    const auto& x = a->arms[i];
    const auto& y = b->arms[i];
    if (x.ctor != y.ctor || x.binders.size() != y.binders.size() || !equal(x.body, y.body)) return false;
    for (std::size_t j = 0; j < x.binders.size(); ++j)
      if (x.binders[j].name != y.binders[j].name) return false;
  }
  return true;
}

std::vector<TermPtr> conjuncts(const TermPtr& t) {
  if (t->op == Op::And) return t->args;
  return {t};
}

namespace {

// Rebuilds `t` with new children, keeping all other attributes.
TermPtr with_children(const TermPtr& t, std::vector<TermPtr> args, std::vector<CaseArm> arms) {
  auto n = std::make_shared<Term>(*t);
  n->args = std::move(args);
  n->arms = std::move(arms);
  return n;
}

}  // namespace

TermPtr simplify_select_store(const TermPtr& t) {
  if (t->args.empty() && t->arms.empty()) return t;
  bool changed = false;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) {
    args.push_back(simplify_select_store(a));
    changed |= args.back() != a;
  }
  std::vector<CaseArm> arms = t->arms;
  for (auto& arm : arms) {
    auto b = simplify_select_store(arm.body);
    changed |= b != arm.body;
    arm.body = b;
  }
  if (t->op == Op::Select) {
    TermPtr h = args[0];
    const TermPtr& f = args[1];
    while (h->op == Op::Store) {
      const TermPtr& g = h->args[1];
      if (g->name == f->name && g->owner == f->owner) return h->args[2];
      h = h->args[0];
      changed = true;
    }
    args[0] = h;
  }
  return changed ? with_children(t, std::move(args), std::move(arms)) : t;
}

Symbols free_symbols(const TermPtr& root) {
  Symbols out;
  std::function<void(const TermPtr&, std::set<std::string>&)> walk = [&](const TermPtr& t, std::set<std::string>& bound) {
    switch (t->op) {
      case Op::Var:
        if (!bound.count(t->name)) out.vars.insert(t->name);
        break;
      case Op::HeapVar: out.heap_vars.insert(t->name); break;
      case Op::Field: out.fields.insert(t->name); break;
      case Op::Anon: out.anons.insert(t->value); break;
      case Op::FutLit: out.fut_lits.insert(t->name); break;
      case Op::Fun: out.functions.insert(t->name); break;
      case Op::Undef: out.undefs.insert({t->sort, t->value}); break;
      default: break;
    }
    std::set<std::string> inner = bound;
    for (const auto& b : t->bound) inner.insert(b.name);
    for (const auto& a : t->args) walk(a, inner);
    for (const auto& arm : t->arms) {
      std::set<std::string> arm_bound = bound;
      for (const auto& b : arm.binders) arm_bound.insert(b.name);
      walk(arm.body, arm_bound);
    }
  };
  std::set<std::string> none;
  walk(root, none);
  return out;
}

namespace {

int precedence(const Term& t) {
  switch (t.op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Eq: return 4;
    case Op::Not:
      return t.args[0]->op == Op::Eq ? 4 : 8;  // printed as `a != b`
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: return 5;
    case Op::Add:
    case Op::Sub: return 6;
    case Op::Mul:
    case Op::Div:
    case Op::Mod: return 7;
    case Op::Neg: return 8;
    case Op::Ite:
    case Op::Case:
    case Op::Forall:
    case Op::Exists: return 0;
    default: return 9;
  }
}

std::string heap_name(const std::string& h) {
  if (h == "oldHeap") return "old";
  if (h == "lastHeap") return "last";
  return h;
}

std::string print(const TermPtr& t);

std::string wrap(const TermPtr& t, int min_prec) {
  std::string s = print(t);
  return precedence(*t) < min_prec ? "(" + s + ")" : s;
}

std::string infix(const Term& t, const char* op, bool right_assoc = false) {
  int p = precedence(t);
  return wrap(t.args[0], right_assoc ? p + 1 : p) + " " + op + " " + wrap(t.args[1], right_assoc ? p : p + 1);
}

std::string list(const std::vector<TermPtr>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + print(xs[i]);
  return s;
}

std::string print(const TermPtr& tp) {
  const Term& t = *tp;
  switch (t.op) {
    case Op::Var: return t.name;
    case Op::HeapVar: return t.name;
    case Op::Field: return "this." + t.name;
    case Op::Select:
      if (t.args[0]->op == Op::HeapVar) return heap_name(t.args[0]->name) + "." + t.args[1]->name;
      return "select(" + print(t.args[0]) + ", " + print(t.args[1]) + ")";
    case Op::Store: return "store(" + list(t.args) + ")";
    case Op::Anon: return "anon(" + print(t.args[0]) + ", " + std::to_string(t.value) + ")";
    case Op::IntLit: return std::to_string(t.value);
    case Op::BoolLit: return t.value ? "true" : "false";
    case Op::Null: return "null";
    case Op::FutLit: return t.name;
    case Op::Fun:
    case Op::Ctor: return t.args.empty() && t.op == Op::Ctor ? t.name : t.name + "(" + list(t.args) + ")";
    case Op::IsCtor: return "is" + t.name + "(" + print(t.args[0]) + ")";
    case Op::CtorArg: return t.name + "#" + std::to_string(t.value) + "(" + print(t.args[0]) + ")";
    case Op::Ite:
      return "if " + print(t.args[0]) + " then " + print(t.args[1]) + " else " + print(t.args[2]);
    case Op::Case: {
      std::string s = "case " + print(t.args[0]) + " { ";
      for (const auto& a : t.arms) {
        s += a.ctor;
        if (!a.binders.empty()) {
          s += "(";
          for (std::size_t i = 0; i < a.binders.size(); ++i) s += (i ? ", " : "") + a.binders[i].name;
          s += ")";
        }
        s += " => " + print(a.body) + "; ";
      }
      return s + "}";
    }
    case Op::Undef: return "undef_" + t.sort.str() + "_" + std::to_string(t.value);
    case Op::Not:
      if (t.args[0]->op == Op::Eq) return infix(*t.args[0], "!=");
      return "!" + wrap(t.args[0], 8);
    case Op::And:
    case Op::Or: {
      std::string s;
      for (std::size_t i = 0; i < t.args.size(); ++i)
        s += (i ? (t.op == Op::And ? " && " : " || ") : "") + wrap(t.args[i], precedence(t) + 1);
      return s;
    }
    case Op::Implies: return infix(t, "->", true);
    case Op::Eq: return infix(t, "==");
    case Op::Lt: return infix(t, "<");
    case Op::Le: return infix(t, "<=");
    case Op::Gt: return infix(t, ">");
    case Op::Ge: return infix(t, ">=");
    case Op::Add: return infix(t, "+");
    case Op::Sub: return infix(t, "-");
    case Op::Mul: return infix(t, "*");
    case Op::Div: return infix(t, "/");
    case Op::Mod: return infix(t, "%");
    case Op::Neg: return "-" + wrap(t.args[0], 9);
    case Op::Forall:
    case Op::Exists: {
      std::string s = t.op == Op::Forall ? "forall " : "exists ";
      for (std::size_t i = 0; i < t.bound.size(); ++i)
        s += (i ? ", " : "") + t.bound[i].sort.str() + " " + t.bound[i].name;
      return s + ". " + print(t.args[0]);
    }
  }
  return "?";
}

}  // namespace

std::string to_string(const TermPtr& t) { return print(t); }

}  // namespace bsev::logic
