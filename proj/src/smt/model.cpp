#include "bsev/smt/model.hpp"

#include <map>
#include <memory>

#include "bsev/engine/translate.hpp"
#include "bsev/smt/sexpr.hpp"

namespace bsev::smt {

using logic::HeapMap;
using logic::Sort;
using logic::Value;

namespace {

struct MVal;
using MPtr = std::shared_ptr<const MVal>;
using Scope = std::map<std::string, MVal>;

// Solver-side value. Arrays and functions are closures over s-expressions.
struct MVal {
  enum class K { Int, Bool, Str, Atom, Ctor, ConstArray, Store, Lambda, Named };
  K k = K::Int;
  long long i = 0;
  std::string s;           // Str payload, Atom, Ctor or Named function name
  std::vector<MVal> args;  // Ctor arguments; Store: key, value
  MPtr base;               // ConstArray default, Store base
  std::vector<std::string> params;
  std::shared_ptr<const SExpr> body;
  std::shared_ptr<const Scope> scope;

  static MVal int_(long long v) { return {K::Int, v}; }
  static MVal bool_(bool b) { return {K::Bool, b ? 1 : 0}; }
  static MVal atom(std::string a) {
    MVal m;
    m.k = K::Atom;
    m.s = std::move(a);
    return m;
  }

  friend bool operator==(const MVal& a, const MVal& b) {
    if (a.k == K::Atom && b.k == K::Ctor) return b.args.empty() && a.s == b.s;
    if (a.k == K::Ctor && b.k == K::Atom) return b == a;
    return a.k == b.k && a.i == b.i && a.s == b.s && a.args == b.args;
  }
};

struct Def {
  std::vector<std::string> params;
  SExpr body;
};

class ModelEval {
 public:
  ModelEval(std::map<std::string, Def> defs, const Program& p) : defs_(std::move(defs)), p_(p) {}

  MVal global(const std::string& name) {
    auto c = cache_.find(name);
    if (c != cache_.end()) return c->second;
    auto d = defs_.find(name);
    if (d == defs_.end()) throw ModelError("model lacks " + name);
    if (!d->second.params.empty()) return named(name);
    MVal v = eval(d->second.body, {});
    cache_[name] = v;
    return v;
  }

  bool has(const std::string& name) const { return defs_.count(name) > 0; }

  MVal apply(const MVal& f, const std::vector<MVal>& args) {
    switch (f.k) {
      case MVal::K::ConstArray: return *f.base;
      case MVal::K::Store: return args.size() == 1 && args[0] == f.args[0] ? f.args[1] : apply(*f.base, args);
      case MVal::K::Lambda: {
        Scope sc = *f.scope;
        for (std::size_t i = 0; i < f.params.size() && i < args.size(); ++i) sc[f.params[i]] = args[i];
        return eval(*f.body, sc);
      }
      case MVal::K::Named: {
        const Def& d = defs_.at(f.s);
        Scope sc;
        for (std::size_t i = 0; i < d.params.size() && i < args.size(); ++i) sc[d.params[i]] = args[i];
        return eval(d.body, sc);
      }
      default: break;
    }
    throw ModelError("applying a non-function value");
  }

  MVal eval(const SExpr& e, const Scope& sc) {
    if (!e.is_list) return eval_atom(e.atom, sc);
    if (e.items.empty()) throw ModelError("empty application");
    const SExpr& h = e.items[0];
    if (h.is_list) {
      // ((as const T) v), ((_ is C) x)
      if (h.items.size() >= 2 && h.items[0].is_atom("as") && h.items[1].is_atom("const")) {
        MVal a;
        a.k = MVal::K::ConstArray;
        a.base = std::make_shared<MVal>(eval(e.items.at(1), sc));
        return a;
      }
      if (h.items.size() == 3 && h.items[0].is_atom("_") && h.items[1].is_atom("is")) {
        MVal x = eval(e.items.at(1), sc);
        return MVal::bool_(x.s == h.items[2].atom);
      }
      throw ModelError("unsupported application " + e.str());
    }
    const std::string& op = h.atom;
    auto arg = [&](std::size_t i) { return eval(e.items.at(i), sc); };
    auto ints = [&](std::size_t i) { return arg(i).i; };
    std::size_t n = e.items.size() - 1;
    if (op == "_" && n == 2 && e.items[1].is_atom("as-array")) return named(e.items[2].atom);
    if (op == "as") return arg(1);
    if (op == "-") return n == 1 ? MVal::int_(-ints(1)) : MVal::int_(ints(1) - ints(2));
    if (op == "+" || op == "*") {
      long long acc = op == "+" ? 0 : 1;
      for (std::size_t i = 1; i <= n; ++i) acc = op == "+" ? acc + ints(i) : acc * ints(i);
      return MVal::int_(acc);
    }
    if (op == "div" || op == "mod") {
      long long a = ints(1), b = ints(2);
      if (b == 0) return MVal::int_(0);
      return MVal::int_(op == "div" ? logic::euclid_div(a, b) : logic::euclid_mod(a, b));
    }
    if (op == "abs") return MVal::int_(std::llabs(ints(1)));
    if (op == "<") return MVal::bool_(ints(1) < ints(2));
    if (op == "<=") return MVal::bool_(ints(1) <= ints(2));
    if (op == ">") return MVal::bool_(ints(1) > ints(2));
    if (op == ">=") return MVal::bool_(ints(1) >= ints(2));
    if (op == "=") return MVal::bool_(arg(1) == arg(2));
    if (op == "distinct") return MVal::bool_(!(arg(1) == arg(2)));
    if (op == "not") return MVal::bool_(!arg(1).i);
    if (op == "and" || op == "or") {
      bool all = op == "and";
      for (std::size_t i = 1; i <= n; ++i)
        if ((arg(i).i != 0) != all) return MVal::bool_(!all);
      return MVal::bool_(all);
    }
    if (op == "=>") return MVal::bool_(!arg(1).i || arg(2).i);
    if (op == "ite") return arg(1).i ? arg(2) : arg(3);
    if (op == "let") {
      Scope inner = sc;
      for (const auto& b : e.items.at(1).items) inner[b.items.at(0).atom] = eval(b.items.at(1), sc);
      return eval(e.items.at(2), inner);
    }
    if (op == "select") return apply(arg(1), {arg(2)});
    if (op == "store") {
      MVal s;
      s.k = MVal::K::Store;
      s.base = std::make_shared<MVal>(arg(1));
      s.args = {arg(2), arg(3)};
      return s;
    }
    if (op == "lambda") {
      MVal l;
      l.k = MVal::K::Lambda;
      for (const auto& p : e.items.at(1).items) l.params.push_back(p.items.at(0).atom);
      l.body = std::make_shared<SExpr>(e.items.at(2));
      l.scope = std::make_shared<Scope>(sc);
      return l;
    }
    std::vector<MVal> args;
    for (std::size_t i = 1; i <= n; ++i) args.push_back(arg(i));
    if (auto d = defs_.find(op); d != defs_.end() && !sc.count(op)) return apply(named(op), args);
    if (auto v = sc.find(op); v != sc.end()) return apply(v->second, args);
    if (p_.find_ctor(op)) {
      MVal c;
      c.k = MVal::K::Ctor;
      c.s = op;
      c.args = std::move(args);
      return c;
    }
    // Selector C_i.
    auto us = op.rfind('_');
    if (us != std::string::npos && n == 1 && p_.find_ctor(op.substr(0, us))) {
      std::size_t idx = std::stoul(op.substr(us + 1));
      const MVal& x = args[0];
      if (x.k == MVal::K::Ctor && x.s == op.substr(0, us) && idx < x.args.size()) return x.args[idx];
      return MVal::int_(0);
    }
    throw ModelError("unknown operator " + op);
  }

 private:
  MVal named(const std::string& f) {
    MVal m;
    m.k = MVal::K::Named;
    m.s = f;
    return m;
  }

  MVal eval_atom(const std::string& a, const Scope& sc) {
    if (auto v = sc.find(a); v != sc.end()) return v->second;
    if (a == "true") return MVal::bool_(true);
    if (a == "false") return MVal::bool_(false);
    if (!a.empty() && std::isdigit(static_cast<unsigned char>(a[0]))) return MVal::int_(std::stoll(a));
    if (a.size() >= 2 && a.front() == '"') {
      MVal s;
      s.k = MVal::K::Str;
      for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        s.s += a[i];
        if (a[i] == '"') ++i;
      }
      return s;
    }
    if (defs_.count(a)) return global(a);
    return MVal::atom(a);
  }

  std::map<std::string, Def> defs_;
  std::map<std::string, MVal> cache_;
  const Program& p_;
};

long long universe_index(const std::string& atom) {
  auto bang = atom.rfind('!');
  if (bang == std::string::npos) return 0;
  try {
    return std::stoll(atom.substr(bang + 1));
  } catch (...) {
    return 0;
  }
}

class Reader {
 public:
  Reader(ModelEval& ev, const SmtGoal& g, const Program& p) : p_(p) {
    for (const auto& [name, s] : g.symbols.nulls)
      if (ev.has(name)) nulls_[s] = ev.global(name);
    for (const auto& [name, lit] : g.symbols.fut_lits) {
      if (!ev.has(name)) continue;
      long long id = universe_index(lit);
      if (auto us = lit.rfind('_'); us != std::string::npos) id = std::atoll(lit.c_str() + us + 1);
      futs_.push_back({ev.global(name), id});
    }
  }

  Value to_logic(const MVal& m, const Sort& s) {
    switch (s.kind) {
      case Sort::Kind::Int: return Value::int_(m.i);
      case Sort::Kind::Bool: return Value::bool_(m.i != 0);
      case Sort::Kind::String:
        if (m.k != MVal::K::Str) return Value::string("");
        return Value::string(m.s);
      case Sort::Kind::Ref: {
        if (is_null(m, s)) return Value::ref(0);
        return Value::ref(universe_index(m.s) + 1);
      }
      case Sort::Kind::Fut: {
        if (is_null(m, s)) return Value::fut(0);
        for (const auto& [v, id] : futs_)
          if (v == m) return Value::fut(id);
        return Value::fut(1000 + universe_index(m.s));
      }
      case Sort::Kind::Data: {
        std::vector<Value> args;
        auto c = p_.find_ctor(m.s);
        if (!c) throw ModelError("unknown constructor " + m.s);
        for (std::size_t i = 0; i < m.args.size() && i < c->second->args.size(); ++i)
          args.push_back(to_logic(m.args[i], sort_of(c->second->args[i])));
        return Value::data(s, m.s, std::move(args));
      }
      case Sort::Kind::Heap: break;
    }
    throw ModelError("cannot read value of sort " + s.str());
  }

  MVal to_model(const Value& v) {
    switch (v.sort.kind) {
      case Sort::Kind::Int: return MVal::int_(v.i);
      case Sort::Kind::Bool: return MVal::bool_(v.i != 0);
      case Sort::Kind::String: {
        MVal s;
        s.k = MVal::K::Str;
        s.s = v.s;
        return s;
      }
      case Sort::Kind::Ref:
      case Sort::Kind::Fut: {
        if (v.i == 0) {
          auto nl = nulls_.find(v.sort);
          return nl != nulls_.end() ? nl->second : MVal::atom(v.sort.str() + "!null");
        }
        if (v.sort.kind == Sort::Kind::Fut)
          for (const auto& [m, id] : futs_)
            if (id == v.i) return m;
        return MVal::atom(v.sort.str() + "!val!" + std::to_string(v.sort.kind == Sort::Kind::Ref ? v.i - 1 : v.i - 1000));
      }
      case Sort::Kind::Data: {
        MVal c;
        c.k = v.args.empty() ? MVal::K::Atom : MVal::K::Ctor;
        c.s = v.s;
        for (const auto& a : v.args) c.args.push_back(to_model(a));
        return c;
      }
      case Sort::Kind::Heap: break;
    }
    throw ModelError("cannot pass heap values to solver functions");
  }

 private:
  bool is_null(const MVal& m, const Sort& s) {
    auto nl = nulls_.find(s);
    return nl != nulls_.end() && nl->second == m;
  }

  const Program& p_;
  std::map<Sort, MVal> nulls_;
  std::vector<std::pair<MVal, long long>> futs_;
};

}  // namespace

SolverModel parse_model(const std::string& text, const SmtGoal& goal, const Program& p) {
  std::vector<SExpr> top;
  try {
    top = parse_sexprs(text);
  } catch (const SExprError& e) {
    throw ModelError(std::string("malformed model: ") + e.what());
  }
  // z3 wraps the model in one list; older versions prefix it with `model`.
  std::vector<SExpr> items;
  for (const auto& t : top) {
    if (!t.is_list) continue;
    bool wrapper = t.items.empty() || t.items[0].is_list || t.items[0].is_atom("model");
    if (wrapper)
      for (const auto& i : t.items)
        if (i.is_list) items.push_back(i);
    if (!wrapper) items.push_back(t);
  }
  std::map<std::string, Def> defs;
  for (const auto& it : items) {
    if (it.items.size() != 5 || !it.items[0].is_atom("define-fun")) continue;
    Def d;
    for (const auto& prm : it.items[2].items) d.params.push_back(prm.items.at(0).atom);
    d.body = it.items[4];
    defs[it.items[1].atom] = std::move(d);
  }

  auto ev = std::make_shared<ModelEval>(std::move(defs), p);
  auto rd = std::make_shared<Reader>(*ev, goal, p);
  SolverModel m;
  const auto& sym = goal.symbols;

  for (const auto& [name, v] : sym.vars)
    if (ev->has(name)) m.env.vars[v.name] = rd->to_logic(ev->global(name), v.sort);
  for (const auto& [name, lit] : sym.fut_lits)
    if (ev->has(name)) m.env.vars[lit] = rd->to_logic(ev->global(name), Sort::fut());
  for (const auto& [name, key] : sym.undefs)
    if (ev->has(name)) m.env.undefs[key] = rd->to_logic(ev->global(name), key.first);

  std::map<std::string, HeapMap> heaps;
  std::map<long long, HeapMap> anons;
  for (const auto& [hname, h] : sym.heaps) {
    if (!ev->has(hname)) continue;
    MVal arr = ev->global(hname);
    HeapMap& target = h.anon ? anons[h.anon] : heaps[h.heap];
    for (const auto& [fname, f] : sym.fields) {
      if (f.sort != h.sort || !ev->has(fname)) continue;
      target[f.name] = rd->to_logic(ev->apply(arr, {ev->global(fname)}), f.sort);
    }
  }
  for (auto& [n, hm] : heaps) m.env.heaps[n] = Value::heap_of(std::move(hm));
  for (auto& [k, hm] : anons) m.env.anons[k] = Value::heap_of(std::move(hm));

  std::map<std::string, std::string> fun_smt;
  for (const auto& [smt_name, f] : sym.functions) fun_smt[f] = smt_name;
  m.env.functions = [ev, rd, fun_smt, &p](const std::string& f, const std::vector<Value>& args) -> Value {
    auto it = fun_smt.find(f);
    const FunDecl* fd = p.find_function(f);
    if (it == fun_smt.end() || !fd || !ev->has(it->second))
      throw logic::EvalError("function " + f + " is not interpreted by the model");
    std::vector<MVal> margs;
    for (const auto& a : args) margs.push_back(rd->to_model(a));
    return rd->to_logic(ev->apply(ev->global(it->second), margs), sort_of(fd->return_type));
  };
  return m;
}

}  // namespace bsev::smt
