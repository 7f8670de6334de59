#include "bsev/oracle/oracle.hpp"

#include <functional>
#include <random>
#include <set>

namespace bsev::oracle {

using logic::Sort;

std::string render(const Value& v) {
  if (v.sort.kind == Sort::Kind::String) return v.s;
  return v.str();
}

bool verifier_checks(const std::string& reason) {
  static const std::set<std::string> checked = {"null receiver", "callee precondition", "invariant at suspension",
                                                "loop invariant", "creation condition"};
  return checked.count(reason) > 0;
}

namespace {

struct Stop {
  Outcome::Kind kind;
  std::string reason;
};

[[noreturn]] void fail(const std::string& reason) { throw Stop{Outcome::Kind::RuntimeError, reason}; }
[[noreturn]] void block(const std::string& reason) { throw Stop{Outcome::Kind::Blocked, reason}; }

Sort value_sort(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Bool: return Sort::bool_();
    case Type::Kind::Interface:
    case Type::Kind::Null: return Sort::ref();
    case Type::Kind::Fut: return Sort::fut();
    case Type::Kind::String: return Sort::string();
    case Type::Kind::Data: return Sort::data(t.name());
    default: return Sort::int_();
  }
}

Value default_of(const Program& p, const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Bool: return Value::bool_(false);
    case Type::Kind::Interface:
    case Type::Kind::Null: return Value::ref(0);
    case Type::Kind::Fut: return Value::fut(0);
    case Type::Kind::String: return Value::string("");
    case Type::Kind::Data: {
      const DataDecl* d = p.find_data(t.name());
      const CtorDecl& c = d->ctors.front();
      std::vector<Value> args;
      for (const auto& a : c.args) args.push_back(default_of(p, a));
      return Value::data(Sort::data(t.name()), c.name, std::move(args));
    }
    default: return Value::int_(0);
  }
}

// Expression evaluation over locals, the current heap, and the heaps that
// `old` and `last` refer to.
class ExprEval {
 public:
  ExprEval(const Program& p, long long* steps, long long limit) : p_(p), steps_(steps), limit_(limit) {}

  const std::map<std::string, Value>* locals = nullptr;
  const HeapMap* heap = nullptr;
  const HeapMap* old = nullptr;
  const HeapMap* last = nullptr;
  std::optional<Value> result;
  std::function<void(const std::string&)> print;

  Value eval(const ExprPtr& e) { return go(*e, heap); }

 private:
  void tick() {
    if (steps_ && ++*steps_ > limit_) throw Stop{Outcome::Kind::Diverged, "step limit"};
  }

  Value lookup(const std::string& n) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto v = it->find(n);
      if (v != it->end()) return v->second;
    }
    auto v = locals->find(n);
    if (v == locals->end()) throw std::runtime_error("unbound name " + n);
    return v->second;
  }

  Value go(const Expr& e, const HeapMap* h) {
    tick();
    switch (e.kind) {
      case ExprKind::IntLit: return Value::int_(e.int_value);
      case ExprKind::BoolLit: return Value::bool_(e.bool_value);
      case ExprKind::NullLit: return Value::ref(0);
      case ExprKind::StringLit: return Value::string(e.text);
      case ExprKind::Name: return lookup(e.text);
      case ExprKind::Field: {
        auto it = h->find(e.text);
        if (it == h->end()) throw std::runtime_error("no field " + e.text);
        return it->second;
      }
      case ExprKind::Result:
        if (!result) throw std::runtime_error("result outside a postcondition");
        return *result;
      case ExprKind::Unary: {
        Value a = go(*e.args[0], h);
        return e.unop == UnOp::Not ? Value::bool_(!a.truth()) : Value::int_(-a.i);
      }
      case ExprKind::Binary: return binary(e, h);
      case ExprKind::Call: return call(e, h);
      case ExprKind::If: return go(*e.args[0], h).truth() ? go(*e.args[1], h) : go(*e.args[2], h);
      case ExprKind::Case: {
        Value d = go(*e.args[0], h);
        for (const auto& b : e.branches) {
          if (b.ctor != "_" && b.ctor != d.s) continue;
          std::map<std::string, Value> sc;
          for (std::size_t i = 0; i < b.binders.size() && i < d.args.size(); ++i) sc[b.binders[i]] = d.args[i];
          scopes_.push_back(std::move(sc));
          Value r = go(*b.body, h);
          scopes_.pop_back();
          return r;
        }
        fail("unmatched case");
      }
      case ExprKind::Old: return go(*e.args[0], old ? old : h);
      case ExprKind::Last: return go(*e.args[0], last ? last : h);
    }
    throw std::runtime_error("unknown expression");
  }

  Value binary(const Expr& e, const HeapMap* h) {
    if (e.binop == BinOp::And) return Value::bool_(go(*e.args[0], h).truth() && go(*e.args[1], h).truth());
    if (e.binop == BinOp::Or) return Value::bool_(go(*e.args[0], h).truth() || go(*e.args[1], h).truth());
    if (e.binop == BinOp::Implies) return Value::bool_(!go(*e.args[0], h).truth() || go(*e.args[1], h).truth());
    Value a = go(*e.args[0], h);
    Value b = go(*e.args[1], h);
    switch (e.binop) {
      case BinOp::Add: return Value::int_(a.i + b.i);
      case BinOp::Sub: return Value::int_(a.i - b.i);
      case BinOp::Mul: return Value::int_(a.i * b.i);
      case BinOp::Div:
      case BinOp::Mod:
        if (b.i == 0) fail("division by zero");
        return Value::int_(e.binop == BinOp::Div ? logic::euclid_div(a.i, b.i) : logic::euclid_mod(a.i, b.i));
      case BinOp::Eq: return Value::bool_(a == b);
      case BinOp::Ne: return Value::bool_(a != b);
      case BinOp::Lt: return Value::bool_(a.i < b.i);
      case BinOp::Le: return Value::bool_(a.i <= b.i);
      case BinOp::Gt: return Value::bool_(a.i > b.i);
      case BinOp::Ge: return Value::bool_(a.i >= b.i);
      default: break;
    }
    throw std::runtime_error("unknown operator");
  }

  Value call(const Expr& e, const HeapMap* h) {
    std::vector<Value> args;
    for (const auto& a : e.args) args.push_back(go(*a, h));
    if (e.ref == NameRef::Constructor) return Value::data(value_sort(e.type), e.text, std::move(args));
    if (e.text == "toString") return Value::string(render(args.at(0)));
    if (e.text == "println") {
      if (print) print(render(args.at(0)));
      return Value::int_(0);
    }
    const FunDecl* f = p_.find_function(e.text);
    if (!f) throw std::runtime_error("unknown function " + e.text);
    std::map<std::string, Value> frame;
    for (std::size_t i = 0; i < f->params.size(); ++i) frame[f->params[i].name] = args[i];
    // Function bodies see only their parameters.
    auto saved_scopes = std::move(scopes_);
    scopes_.clear();
    const auto* saved_locals = locals;
    locals = &frame;
    Value r = go(*f->body, h);
    locals = saved_locals;
    scopes_ = std::move(saved_scopes);
    return r;
  }

  const Program& p_;
  long long* steps_;
  long long limit_;
  std::vector<std::map<std::string, Value>> scopes_;
};

struct FutRecord {
  const MethodSig* callee = nullptr;
  std::vector<Value> args;
};

class Machine {
 public:
  Machine(const Program& p, const ClassDecl& c, const EnvScript& env, const RunOptions& opt)
      : p_(p), c_(c), env_(env), opt_(opt), ev_(p, &steps_, opt.step_limit) {
    ev_.print = [this](const std::string& s) { output_.push_back(s); };
  }

  Outcome run(const MethodDecl& m, const ConcreteState& in) {
    state_ = in;
    entry_ = in.heap;
    last_ = in.heap;
    Outcome out;
    try {
      exec(m.body);
    } catch (const Stop& s) {
      out.kind = s.kind;
      out.reason = s.reason;
    } catch (const Returned&) {
      out.value = ret_;
    }
    out.final = std::move(state_);
    out.output = std::move(output_);
    out.steps = steps_;
    return out;
  }

 private:
  struct Returned {};

  Value eval(const ExprPtr& e) {
    ev_.locals = &state_.locals;
    ev_.heap = &state_.heap;
    ev_.old = &entry_;
    ev_.last = &last_;
    ev_.result.reset();
    return ev_.eval(e);
  }

  bool holds(const ExprPtr& e, const std::map<std::string, Value>& locals, const HeapMap& heap, const HeapMap* old,
             const std::optional<Value>& result = std::nullopt) {
    if (!e) return true;
    ev_.locals = &locals;
    ev_.heap = &heap;
    ev_.old = old ? old : &heap;
    ev_.last = &last_;
    ev_.result = result;
    return ev_.eval(e).truth();
  }

  bool invariant(const HeapMap& h) { return holds(c_.obj_invariant, {}, h, nullptr); }

  void assign(const Target& t, const Value& v) {
    if (t.kind == Target::Kind::Local) state_.locals[t.name] = v;
    if (t.kind == Target::Kind::Field) state_.heap[t.name] = v;
  }

  const MethodSig* interface_sig(const std::string& iface, const std::string& m) {
    const InterfaceDecl* i = p_.find_interface(iface);
    return i ? i->find(m) : nullptr;
  }

  std::map<std::string, Value> bind(const std::vector<Param>& ps, const std::vector<Value>& vs) {
    std::map<std::string, Value> out;
    for (std::size_t i = 0; i < ps.size() && i < vs.size(); ++i) out[ps[i].name] = vs[i];
    return out;
  }

  void exec(const Block& b) {
    for (const auto& s : b) exec(*s);
  }

  void exec(const Stmt& s) {
    if (++steps_ > opt_.step_limit) throw Stop{Outcome::Kind::Diverged, "step limit"};
    switch (s.kind) {
      case StmtKind::Skip: return;
      case StmtKind::VarDecl:
        assign(s.target, s.expr ? eval(s.expr) : default_of(p_, s.target.decl_type));
        return;
      case StmtKind::Assign: assign(s.target, eval(s.expr)); return;
      case StmtKind::ExprStmt: eval(s.expr); return;
      case StmtKind::If: exec(eval(s.expr).truth() ? s.then_body : s.else_body); return;
      case StmtKind::While:
        while (true) {
          if (!holds(s.invariant, state_.locals, state_.heap, &entry_)) fail("loop invariant");
          if (!eval(s.expr).truth()) break;
          exec(s.else_body);
        }
        return;
      case StmtKind::Return:
        if (s.expr) ret_ = eval(s.expr);
        throw Returned{};
      case StmtKind::AsyncCall: {
        Value recv = eval(s.expr);
        if (recv.i == 0) fail("null receiver");
        std::vector<Value> args;
        for (const auto& a : s.args) args.push_back(eval(a));
        const MethodSig* sig = interface_sig(s.expr->type.name(), s.method);
        if (sig && !holds(sig->pre, bind(sig->params, args), state_.heap, nullptr)) fail("callee precondition");
        long long id = ++futs_;
        records_[id] = {sig, args};
        assign(s.target, Value::fut(id));
        return;
      }
      case StmtKind::Get: {
        Value f = eval(s.expr);
        auto it = env_.get_results.find(f.i);
        if (f.i == 0 || it == env_.get_results.end()) block("future never resolved");
        auto rec = records_.find(f.i);
        if (rec != records_.end() && rec->second.callee) {
          const MethodSig* sig = rec->second.callee;
          if (!holds(sig->post, bind(sig->params, rec->second.args), state_.heap, nullptr, it->second))
            block("scripted future value contradicts the callee contract");
        }
        assign(s.target, it->second);
        return;
      }
      case StmtKind::Await: {
        if (!invariant(state_.heap)) fail("invariant at suspension");
        last_ = state_.heap;
        if (awaits_ < env_.await_effects.size())
          for (const auto& [f, v] : env_.await_effects[awaits_]) state_.heap[f] = v;
        ++awaits_;
        if (!invariant(state_.heap)) block("scripted suspension breaks the invariant");
        if (s.future_guard) {
          Value f = eval(s.expr);
          if (!env_.get_results.count(f.i)) block("future never resolved");
        } else if (!eval(s.expr).truth()) {
          block("guard stays false");
        }
        return;
      }
      case StmtKind::SyncCall: {
        const MethodDecl* m = c_.find_method(s.method);
        std::vector<Value> args;
        for (const auto& a : s.args) args.push_back(eval(a));
        auto frame = bind(m->sig.params, args);
        const MethodSig* isig = c_.implements.empty() ? nullptr : interface_sig(c_.implements, s.method);
        std::map<std::string, Value> iframe = isig ? bind(isig->params, args) : frame;
        bool pre = holds(m->sig.pre, frame, state_.heap, nullptr) && invariant(state_.heap) &&
                   (!isig || holds(isig->pre, iframe, state_.heap, nullptr));
        if (!pre) fail("callee precondition");
        HeapMap before = state_.heap;
        std::optional<Value> result;
        if (m->sig.return_type.kind() != Type::Kind::Unit) result = default_of(p_, m->sig.return_type);
        if (syncs_ < env_.sync_effects.size()) {
          const SyncEffect& fx = env_.sync_effects[syncs_];
          for (const auto& [f, v] : fx.writes) state_.heap[f] = v;
          if (fx.result && result) result = fx.result;
        }
        ++syncs_;
        bool post = holds(m->sig.post, frame, state_.heap, &before, result) && invariant(state_.heap) &&
                    (!isig || holds(isig->post, iframe, state_.heap, &before, result));
        if (!post) block("scripted call effect contradicts the callee contract");
        if (result) assign(s.target, *result);
        return;
      }
      case StmtKind::New: {
        const ClassDecl* nc = p_.find_class(s.class_name);
        HeapMap fields;
        for (std::size_t i = 0; i < nc->params.size() && i < s.args.size(); ++i) fields[nc->params[i].name] = eval(s.args[i]);
        if (!holds(nc->creation_cond, {}, fields, nullptr)) fail("creation condition");
        assign(s.target, Value::ref(1000 + ++objects_));
        return;
      }
    }
  }

  const Program& p_;
  const ClassDecl& c_;
  const EnvScript& env_;
  RunOptions opt_;
  long long steps_ = 0;
  ExprEval ev_;
  ConcreteState state_;
  HeapMap entry_, last_;
  std::optional<Value> ret_;
  std::vector<std::string> output_;
  long long futs_ = 0, objects_ = 0;
  std::size_t awaits_ = 0, syncs_ = 0;
  std::map<long long, FutRecord> records_;
};

}  // namespace

Outcome run(const Program& p, const ClassDecl& cls, const MethodDecl& m, const ConcreteState& in, const EnvScript& env,
            const RunOptions& opt) {
  return Machine(p, cls, env, opt).run(m, in);
}

Value eval_expr(const Program& p, const ExprPtr& e, const ConcreteState& s, const HeapMap* old,
                const std::optional<Value>& result) {
  ExprEval ev(p, nullptr, 0);
  ev.locals = &s.locals;
  ev.heap = &s.heap;
  ev.old = old;
  ev.result = result;
  return ev.eval(e);
}

ConcreteState initial_state(const Program& p, const ClassDecl& cls) {
  ConcreteState s;
  for (const auto& f : cls.all_fields())
    s.heap[f.name] = f.init ? eval_expr(p, f.init, s) : default_of(p, f.type);
  return s;
}

// ---------------------------------------------------------------------------
// Soundness checking

namespace {

// A slot is one independently chosen value of the input or environment.
struct Slot {
  enum class Where { Local, Field, Get, Await, SyncWrite, SyncResult };
  Where where;
  std::string name;
  std::size_t index = 0;
  std::vector<Value> domain;
};

std::vector<Value> domain_of(const Program& p, const Type& t, Nullability n, const Domain& d) {
  std::vector<Value> out;
  switch (t.kind()) {
    case Type::Kind::Int:
      for (long long v = d.lo; v <= d.hi; ++v) out.push_back(Value::int_(v));
      break;
    case Type::Kind::Bool: out = {Value::bool_(false), Value::bool_(true)}; break;
    case Type::Kind::Interface:
      if (n == Nullability::Nullable) out.push_back(Value::ref(0));
      out.push_back(Value::ref(1));
      out.push_back(Value::ref(2));
      break;
    case Type::Kind::Fut: out = {Value::fut(0), Value::fut(101)}; break;
    case Type::Kind::String: out = {Value::string(""), Value::string("a")}; break;
    case Type::Kind::Data: {
      const DataDecl* dd = p.find_data(t.name());
      for (const auto& c : dd->ctors) {
        if (c.args.empty()) {
          out.push_back(Value::data(Sort::data(t.name()), c.name));
          continue;
        }
        // Vary the first argument, default the rest.
        auto first = domain_of(p, c.args[0], Nullability::Nullable, d);
        for (const auto& v : first) {
          std::vector<Value> args{v};
          for (std::size_t i = 1; i < c.args.size(); ++i) args.push_back(default_of(p, c.args[i]));
          out.push_back(Value::data(Sort::data(t.name()), c.name, std::move(args)));
        }
      }
      break;
    }
    default: out.push_back(Value::int_(0));
  }
  return out;
}

struct Calls {
  std::vector<const Stmt*> gets, awaits, syncs;
};

void collect(const Block& b, Calls& c) {
  for (const auto& s : b) {
    if (s->kind == StmtKind::Get) c.gets.push_back(s.get());
    if (s->kind == StmtKind::Await) c.awaits.push_back(s.get());
    if (s->kind == StmtKind::SyncCall) c.syncs.push_back(s.get());
    collect(s->then_body, c);
    collect(s->else_body, c);
  }
}

std::size_t count_async(const Block& b) {
  std::size_t n = 0;
  for (const auto& s : b) n += (s->kind == StmtKind::AsyncCall) + count_async(s->then_body) + count_async(s->else_body);
  return n;
}

}  // namespace

std::vector<Violation> check_soundness(const Program& p, const ClassDecl& cls, const MethodDecl& m, const Domain& d) {
  std::vector<Slot> slots;
  for (const auto& prm : m.sig.params)
    slots.push_back({Slot::Where::Local, prm.name, 0, domain_of(p, prm.type, prm.nullability, d)});
  auto fields = cls.all_fields();
  for (const auto& f : fields) slots.push_back({Slot::Where::Field, f.name, 0, domain_of(p, f.type, f.nullability, d)});

  Calls calls;
  collect(m.body, calls);
  // Futures are numbered in creation order; every future may be read.
  std::size_t futures = count_async(m.body);
  for (std::size_t k = 1; k <= futures && !calls.gets.empty(); ++k) {
    // All gets in these programs read values of the same few types; take
    // the type of the first get whose future is k, or the first get.
    const Stmt* g = calls.gets[std::min(k - 1, calls.gets.size() - 1)];
    slots.push_back({Slot::Where::Get, "", k, domain_of(p, g->expr->type.inner(), Nullability::Nullable, d)});
  }
  for (std::size_t i = 0; i < calls.awaits.size(); ++i)
    for (const auto& f : fields)
      slots.push_back({Slot::Where::Await, f.name, i, domain_of(p, f.type, f.nullability, d)});
  for (std::size_t i = 0; i < calls.syncs.size(); ++i) {
    for (const auto& f : fields)
      slots.push_back({Slot::Where::SyncWrite, f.name, i, domain_of(p, f.type, f.nullability, d)});
    const MethodDecl* callee = cls.find_method(calls.syncs[i]->method);
    if (callee && callee->sig.return_type.kind() != Type::Kind::Unit)
      slots.push_back({Slot::Where::SyncResult, "", i, domain_of(p, callee->sig.return_type, Nullability::Nullable, d)});
  }

  double space = 1;
  for (const auto& s : slots) space *= static_cast<double>(s.domain.size());
  bool exhaustive = space <= static_cast<double>(d.budget);
  std::size_t runs = exhaustive ? static_cast<std::size_t>(space) : d.budget;
  std::mt19937 rng(d.seed);

  const MethodSig* isig = nullptr;
  if (!cls.implements.empty())
    if (const InterfaceDecl* i = p.find_interface(cls.implements)) isig = i->find(m.sig.name);

  std::vector<Violation> out;
  std::vector<std::size_t> idx(slots.size(), 0);
  for (std::size_t r = 0; r < runs; ++r) {
    if (exhaustive) {
      if (r > 0) {
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == slots[i].domain.size()) idx[i++] = 0;
      }
    } else {
      for (std::size_t i = 0; i < slots.size(); ++i) idx[i] = rng() % slots[i].domain.size();
    }
    ConcreteState in;
    EnvScript env;
    env.await_effects.resize(calls.awaits.size());
    env.sync_effects.resize(calls.syncs.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const Slot& s = slots[i];
      const Value& v = s.domain[idx[i]];
      switch (s.where) {
        case Slot::Where::Local: in.locals[s.name] = v; break;
        case Slot::Where::Field: in.heap[s.name] = v; break;
        case Slot::Where::Get: env.get_results[static_cast<long long>(s.index)] = v; break;
        case Slot::Where::Await: env.await_effects[s.index][s.name] = v; break;
        case Slot::Where::SyncWrite: env.sync_effects[s.index].writes[s.name] = v; break;
        case Slot::Where::SyncResult: env.sync_effects[s.index].result = v; break;
      }
    }

    // Inputs satisfying precondition and invariant only.
    auto pre_ok = [&] {
      auto check = [&](const ExprPtr& e, const std::map<std::string, Value>& locals) {
        if (!e) return true;
        ConcreteState st{locals, in.heap};
        return eval_expr(p, e, st, &in.heap).truth();
      };
      std::map<std::string, Value> ilocals;
      if (isig)
        for (std::size_t i = 0; i < isig->params.size() && i < m.sig.params.size(); ++i)
          ilocals[isig->params[i].name] = in.locals[m.sig.params[i].name];
      return check(m.sig.pre, in.locals) && check(cls.obj_invariant, {}) && (!isig || check(isig->pre, ilocals));
    };
    try {
      if (!pre_ok()) continue;
    } catch (const Stop&) {
      continue;
    }

    Outcome o = run(p, cls, m, in, env);
    std::string what;
    if (o.kind == Outcome::Kind::RuntimeError && verifier_checks(o.reason)) {
      what = o.reason;
    } else if (o.kind == Outcome::Kind::Returned) {
      try {
        ConcreteState fin{in.locals, o.final.heap};
        for (const auto& prm : m.sig.params) fin.locals[prm.name] = in.locals[prm.name];
        bool post = !m.sig.post || eval_expr(p, m.sig.post, fin, &in.heap, o.value).truth();
        if (post && isig && isig->post) {
          ConcreteState ifin{{}, o.final.heap};
          for (std::size_t i = 0; i < isig->params.size() && i < m.sig.params.size(); ++i)
            ifin.locals[isig->params[i].name] = in.locals[m.sig.params[i].name];
          post = eval_expr(p, isig->post, ifin, &in.heap, o.value).truth();
        }
        bool inv = !cls.obj_invariant || eval_expr(p, cls.obj_invariant, ConcreteState{{}, o.final.heap}).truth();
        if (!post) what = "postcondition";
        else if (!inv) what = "invariant at return";
      } catch (const Stop&) {
        // Partial specifications (division by zero, unmatched case) do not count.
      }
    }
    if (!what.empty()) out.push_back({in, env, o, what});
  }
  return out;
}

}  // namespace bsev::oracle
