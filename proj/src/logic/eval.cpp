#include "bsev/logic/eval.hpp"

namespace bsev::logic {

std::string Value::str() const {
  switch (sort.kind) {
    case Sort::Kind::Int: return std::to_string(i);
    case Sort::Kind::Bool: return i ? "True" : "False";
    case Sort::Kind::Ref: return i == 0 ? "null" : "object_" + std::to_string(i);
    case Sort::Kind::Fut: return i == 0 ? "null" : "fut_" + std::to_string(i);
    case Sort::Kind::String: return "\"" + s + "\"";
    case Sort::Kind::Data: {
      if (args.empty()) return s;
      std::string out = s + "(";
      for (std::size_t k = 0; k < args.size(); ++k) out += (k ? ", " : "") + args[k].str();
      return out + ")";
    }
    case Sort::Kind::Heap: {
      std::string out = "{";
      bool first = true;
      for (const auto& [f, v] : *heap) {
        out += (first ? "" : ", ") + f + ": " + v.str();
        first = false;
      }
      return out + "}";
    }
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  auto nullish = [](const Value& v) {
    return (v.sort.kind == Sort::Kind::Ref || v.sort.kind == Sort::Kind::Fut) && v.i == 0;
  };
  if (nullish(a) && nullish(b)) return true;
  if (a.sort != b.sort || a.i != b.i || a.s != b.s || a.args != b.args) return false;
  if (a.sort.kind == Sort::Kind::Heap) return *a.heap == *b.heap;
  return true;
}

long long euclid_div(long long a, long long b) {
  long long q = a / b;
  long long r = a % b;
  if (r < 0) q += b > 0 ? -1 : 1;
  return q;
}

long long euclid_mod(long long a, long long b) {
  long long r = a % b;
  if (r < 0) r += b > 0 ? b : -b;
  return r;
}

namespace {

class Evaluator {
 public:
  explicit Evaluator(const EvalEnv& env) : env_(env) {}

  Value eval(const TermPtr& tp) {
    const Term& t = *tp;
    switch (t.op) {
      case Op::Var: {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
          if (it->first == t.name) return it->second;
        auto v = env_.vars.find(t.name);
        if (v == env_.vars.end()) throw EvalError("unbound variable " + t.name);
        return v->second;
      }
      case Op::HeapVar: {
        auto h = env_.heaps.find(t.name);
        if (h == env_.heaps.end()) throw EvalError("unbound heap " + t.name);
        return h->second;
      }
      case Op::Field: throw EvalError("field symbol outside select/store");
      case Op::Select: {
        Value h = eval(t.args[0]);
        const std::string& f = t.args[1]->name;
        auto it = h.heap->find(f);
        if (it != h.heap->end()) return it->second;
        if (env_.heap_default)
          if (auto d = env_.heap_default(f, t.sort)) return *d;
        throw EvalError("heap has no field " + f);
      }
      case Op::Store: {
        Value h = eval(t.args[0]);
        HeapMap m = *h.heap;
        m[t.args[1]->name] = eval(t.args[2]);
        return Value::heap_of(std::move(m));
      }
      case Op::Anon: {
        auto a = env_.anons.find(t.value);
        if (a == env_.anons.end()) throw EvalError("no anon heap " + std::to_string(t.value));
        return a->second;
      }
      case Op::IntLit: return Value::int_(t.value);
      case Op::BoolLit: return Value::bool_(t.value != 0);
      case Op::Null: return Value::ref(0);
      case Op::FutLit: {
        auto v = env_.vars.find(t.name);
        if (v == env_.vars.end()) throw EvalError("unbound future " + t.name);
        return v->second;
      }
      case Op::Fun: {
        if (!env_.functions) throw EvalError("no interpretation for function " + t.name);
        std::vector<Value> args;
        for (const auto& a : t.args) args.push_back(eval(a));
        return env_.functions(t.name, args);
      }
      case Op::Ctor: {
        std::vector<Value> args;
        for (const auto& a : t.args) args.push_back(eval(a));
        return Value::data(t.sort, t.name, std::move(args));
      }
      case Op::IsCtor: return Value::bool_(eval(t.args[0]).s == t.name);
      case Op::CtorArg: {
        Value d = eval(t.args[0]);
        if (d.s != t.name || t.value >= static_cast<long long>(d.args.size()))
          throw EvalError("constructor argument of wrong constructor");
        return d.args[t.value];
      }
      case Op::Ite: return eval(t.args[0]).truth() ? eval(t.args[1]) : eval(t.args[2]);
      case Op::Case: {
        Value d = eval(t.args[0]);
        for (const auto& arm : t.arms) {
          if (arm.ctor != "_" && arm.ctor != d.s) continue;
          std::size_t mark = bound_.size();
          for (std::size_t k = 0; k < arm.binders.size() && k < d.args.size(); ++k)
            bound_.emplace_back(arm.binders[k].name, d.args[k]);
          Value r = eval(arm.body);
          bound_.resize(mark);
          return r;
        }
        throw EvalError("unmatched case on " + d.s);
      }
      case Op::Undef: {
        auto u = env_.undefs.find({t.sort, t.value});
        if (u == env_.undefs.end()) throw EvalError("no value for undef");
        return u->second;
      }
      case Op::Not: return Value::bool_(!eval(t.args[0]).truth());
      case Op::And:
        for (const auto& a : t.args)
          if (!eval(a).truth()) return Value::bool_(false);
        return Value::bool_(true);
      case Op::Or:
        for (const auto& a : t.args)
          if (eval(a).truth()) return Value::bool_(true);
        return Value::bool_(false);
      case Op::Implies: return Value::bool_(!eval(t.args[0]).truth() || eval(t.args[1]).truth());
      case Op::Eq: return Value::bool_(eval(t.args[0]) == eval(t.args[1]));
      case Op::Lt: return Value::bool_(eval(t.args[0]).i < eval(t.args[1]).i);
      case Op::Le: return Value::bool_(eval(t.args[0]).i <= eval(t.args[1]).i);
      case Op::Gt: return Value::bool_(eval(t.args[0]).i > eval(t.args[1]).i);
      case Op::Ge: return Value::bool_(eval(t.args[0]).i >= eval(t.args[1]).i);
      case Op::Add: return Value::int_(eval(t.args[0]).i + eval(t.args[1]).i);
      case Op::Sub: return Value::int_(eval(t.args[0]).i - eval(t.args[1]).i);
      case Op::Mul: return Value::int_(eval(t.args[0]).i * eval(t.args[1]).i);
      case Op::Div:
      case Op::Mod: {
        long long a = eval(t.args[0]).i;
        long long b = eval(t.args[1]).i;
        if (b == 0) throw EvalError("division by zero");
        return Value::int_(t.op == Op::Div ? euclid_div(a, b) : euclid_mod(a, b));
      }
      case Op::Neg: return Value::int_(-eval(t.args[0]).i);
      case Op::Forall:
      case Op::Exists: return Value::bool_(quantify(t, 0));
    }
    throw EvalError("unknown term");
  }

 private:
  bool quantify(const Term& t, std::size_t k) {
    const bool all = t.op == Op::Forall;
    if (k == t.bound.size()) return eval(t.args[0]).truth();
    const auto& bv = t.bound[k];
    std::vector<Value> domain;
    if (bv.sort.kind == Sort::Kind::Int) {
      for (long long v = env_.quant_lo; v <= env_.quant_hi; ++v) domain.push_back(Value::int_(v));
    } else if (bv.sort.kind == Sort::Kind::Bool) {
      domain = {Value::bool_(false), Value::bool_(true)};
    } else {
      throw EvalError("cannot enumerate sort " + bv.sort.str());
    }
    for (const auto& v : domain) {
      bound_.emplace_back(bv.name, v);
      bool r = quantify(t, k + 1);
      bound_.pop_back();
      if (r != all) return r;
    }
    return all;
  }

  const EvalEnv& env_;
  std::vector<std::pair<std::string, Value>> bound_;
};

}  // namespace

Value evaluate(const TermPtr& t, const EvalEnv& env) { return Evaluator(env).eval(t); }

}  // namespace bsev::logic
