#include "bsev/frontend/typecheck.hpp"

#include <functional>
#include <map>
#include <set>

#include "bsev/frontend/parser.hpp"

namespace bsev {

std::string TypeError::str() const {
  return std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": type error: " + message;
}

namespace {

std::string join_errors(const std::vector<TypeError>& errs) {
  std::string s;
  for (const auto& e : errs) s += (s.empty() ? "" : "\n") + e.str();
  return s;
}

}  // namespace

FrontendError::FrontendError(std::vector<TypeError> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

Program load_program(std::string_view source) {
  Program p = parse(source);
  auto errs = typecheck(p);
  if (!errs.empty()) throw FrontendError(std::move(errs));
  return p;
}

namespace {

enum class FieldAccess { None, ParamsOnly, All };

struct Ctx {
  const ClassDecl* cls = nullptr;
  FieldAccess fields = FieldAccess::None;
  bool spec = false;  // old/last allowed
  std::optional<Type> result;
};

struct VarInfo {
  Type type;
  NameRef ref;
};

bool compatible(const Type& a, const Type& b) {
  if (a.is_unknown() || b.is_unknown()) return true;
  if (a == b) return true;
  auto nullish = [](const Type& t) { return t.is_reference() || t.kind() == Type::Kind::String; };
  if (a.kind() == Type::Kind::Null) return nullish(b);
  if (b.kind() == Type::Kind::Null) return nullish(a);
  return false;
}

bool assignable(const Type& target, const Type& source) {
  if (source.kind() == Type::Kind::Null && target.kind() == Type::Kind::Null) return true;
  if (target.kind() == Type::Kind::Null) return false;
  return compatible(target, source);
}

Type join(const Type& a, const Type& b) { return a.kind() == Type::Kind::Null ? b : a; }

bool is_arith(BinOp op) {
  return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div || op == BinOp::Mod;
}
bool is_rel(BinOp op) { return op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt || op == BinOp::Ge; }

class Checker {
 public:
  explicit Checker(Program& p) : p_(p) {}

  std::vector<TypeError> run() {
    check_names();
    for (auto& d : p_.datatypes)
      for (auto& c : d.ctors)
        for (auto& t : c.args) resolve(t, d.loc);
    for (auto& i : p_.interfaces) check_interface(i);
    for (auto& f : p_.functions) check_function(f);
    for (auto& c : p_.classes) check_class(c);
    return std::move(errs_);
  }

 private:
  void error(SourceLoc loc, std::string msg) { errs_.push_back(TypeError{loc, std::move(msg)}); }

  void check_names() {
    std::map<std::string, std::string> seen;
    auto add = [&](const std::string& n, const char* what, SourceLoc loc) {
      auto [it, fresh] = seen.emplace(n, what);
      if (!fresh) error(loc, std::string("duplicate name '") + n + "' (" + what + " clashes with " + it->second + ")");
    };
    for (const auto& i : p_.interfaces) add(i.name, "interface", i.loc);
    for (const auto& c : p_.classes) add(c.name, "class", c.loc);
    for (const auto& f : p_.functions) add(f.name, "function", f.loc);
    for (const auto& d : p_.datatypes) {
      add(d.name, "datatype", d.loc);
      for (const auto& c : d.ctors) add(c.name, "constructor", d.loc);
    }
  }

  void resolve(Type& t, SourceLoc loc) {
    if (t.kind() == Type::Kind::Fut) {
      Type inner = t.inner();
      resolve(inner, loc);
      t = Type::fut(inner);
      return;
    }
    if (t.kind() != Type::Kind::Named) return;
    if (p_.find_interface(t.name())) t = Type::interface(t.name());
    else if (p_.find_data(t.name())) t = Type::data(t.name());
    else {
      error(loc, "unknown type '" + t.name() + "'");
      t = Type::unknown();
    }
  }

  void check_nullability(const Type& t, Nullability n, SourceLoc loc, const std::string& what) {
    if (n == Nullability::NonNull && !t.is_reference() && !t.is_unknown())
      error(loc, "NonNull annotation on non-reference " + what);
  }

  void resolve_params(std::vector<Param>& ps) {
    std::set<std::string> names;
    for (auto& p : ps) {
      resolve(p.type, p.loc);
      check_nullability(p.type, p.nullability, p.loc, "parameter '" + p.name + "'");
      if (!names.insert(p.name).second) error(p.loc, "duplicate parameter '" + p.name + "'");
    }
  }

  void expect_bool(const ExprPtr& e, const std::string& what) {
    if (!e) return;
    Type t = check(e);
    if (!t.is_unknown() && t.kind() != Type::Kind::Bool)
      error(e->loc, what + " must be Bool, found " + t.str());
  }

  void check_interface(InterfaceDecl& i) {
    std::set<std::string> names;
    for (auto& m : i.methods) {
      if (!names.insert(m.name).second) error(m.loc, "duplicate method '" + m.name + "' in interface " + i.name);
      resolve_params(m.params);
      resolve(m.return_type, m.loc);
      Ctx c;
      push_params(m.params);
      cur_ = c;
      expect_bool(m.pre, "Requires");
      cur_.result = m.return_type;
      expect_bool(m.post, "Ensures");
      pop();
    }
  }

  void check_function(FunDecl& f) {
    resolve_params(f.params);
    resolve(f.return_type, f.loc);
    push_params(f.params);
    cur_ = Ctx{};
    expect_bool(f.pre, "Requires");
    Type body = check(f.body);
    if (!assignable(f.return_type, body))
      error(f.body->loc, "function '" + f.name + "' returns " + body.str() + ", declared " + f.return_type.str());
    cur_.result = f.return_type;
    expect_bool(f.post, "Ensures");
    pop();
  }

  void check_class(ClassDecl& c) {
    resolve_params(c.params);
    std::set<std::string> field_names;
    for (const auto& p : c.params) field_names.insert(p.name);
    for (auto& f : c.fields) {
      resolve(f.type, f.loc);
      check_nullability(f.type, f.nullability, f.loc, "field '" + f.name + "'");
      if (!field_names.insert(f.name).second) error(f.loc, "duplicate field '" + f.name + "'");
    }
    cls_ = &c;

    cur_ = Ctx{&c, FieldAccess::ParamsOnly, false, std::nullopt};
    frames_.emplace_back();
    expect_bool(c.creation_cond, "class Requires");
    cur_.fields = FieldAccess::All;
    expect_bool(c.obj_invariant, "ObjInv");
    // Field initializers see class parameters and earlier fields.
    cur_.fields = FieldAccess::ParamsOnly;
    for (auto& f : c.fields) {
      if (f.init) {
        Type t = check(f.init);
        if (!assignable(f.type, t)) error(f.loc, "field '" + f.name + "' initialized with " + t.str());
      }
      initialized_.insert(f.name);
    }
    initialized_.clear();
    pop();

    for (const auto& [role, field] : c.roles) {
      bool ok = false;
      for (const auto& f : c.all_fields())
        if (f.name == field) ok = f.type.kind() == Type::Kind::Interface;
      if (!ok) error(c.loc, "role '" + role + "' must map to a field of interface type, got '" + field + "'");
    }

    const InterfaceDecl* iface = nullptr;
    if (!c.implements.empty()) {
      iface = p_.find_interface(c.implements);
      if (!iface) error(c.loc, "class " + c.name + " implements unknown interface '" + c.implements + "'");
    }
    std::set<std::string> mnames;
    for (auto& m : c.methods) {
      if (!mnames.insert(m.sig.name).second) error(m.sig.loc, "duplicate method '" + m.sig.name + "'");
      resolve_params(m.sig.params);
      resolve(m.sig.return_type, m.sig.loc);
    }
    if (iface) {
      for (const auto& im : iface->methods) {
        const MethodDecl* md = c.find_method(im.name);
        if (!md) {
          error(c.loc, "class " + c.name + " does not implement " + iface->name + "." + im.name);
          continue;
        }
        bool same = md->sig.params.size() == im.params.size() && md->sig.return_type == im.return_type;
        for (std::size_t k = 0; same && k < im.params.size(); ++k) same = md->sig.params[k].type == im.params[k].type;
        if (!same) error(md->sig.loc, "signature of " + c.name + "." + im.name + " does not match interface " + iface->name);
      }
    }
    for (auto& m : c.methods) check_method(c, m);
    cls_ = nullptr;
  }

  void check_method(ClassDecl& c, MethodDecl& m) {
    push_params(m.sig.params);
    cur_ = Ctx{&c, FieldAccess::All, true, std::nullopt};
    expect_bool(m.sig.pre, "Requires");
    cur_.result = m.sig.return_type;
    expect_bool(m.sig.post, "Ensures");
    for (const auto& lists : {m.succeeds, m.overlaps})
      for (const auto& n : lists)
        if (!c.find_method(n)) error(m.sig.loc, "context set names unknown method '" + n + "'");

    cur_ = Ctx{&c, FieldAccess::All, false, std::nullopt};
    method_ = &m;
    all_local_decls_.clear();
    check_block(m.body, true);
    // Session-type formulas may mention any local of the body.
    frames_.emplace_back();
    for (const auto& [name, info] : all_local_decls_) frames_.back().emplace(name, info);
    all_local_decls_.clear();
    if (m.local_type) check_session(c, m, m.local_type);
    pop();
    pop();
    method_ = nullptr;
  }

  void check_session(ClassDecl& c, MethodDecl& m, const SessionTypePtr& t) {
    using K = SessionType::Kind;
    switch (t->kind) {
      case K::Call: {
        auto field = c.role_field(t->role);
        if (!field) {
          error(m.sig.loc, "unknown role '" + t->role + "' in Local type of " + m.sig.name);
          return;
        }
        const MethodSig* callee = nullptr;
        for (const auto& f : c.all_fields())
          if (f.name == *field && f.type.kind() == Type::Kind::Interface)
            if (auto* i = p_.find_interface(f.type.name())) callee = i->find(t->method);
        if (!callee) {
          error(m.sig.loc, "role '" + t->role + "' has no method '" + t->method + "'");
          return;
        }
        if (t->formula) {
          push_params(callee->params);
          cur_ = Ctx{&c, FieldAccess::All, true, std::nullopt};
          expect_bool(t->formula, "call action formula");
          pop();
        }
        return;
      }
      case K::Susp:
        cur_ = Ctx{&c, FieldAccess::All, true, std::nullopt};
        expect_bool(t->formula, "Susp formula");
        return;
      case K::Put:
        cur_ = Ctx{&c, FieldAccess::All, true, m.sig.return_type};
        expect_bool(t->formula, "Put formula");
        return;
      case K::Get: {
        cur_ = Ctx{&c, FieldAccess::All, false, std::nullopt};
        Type ty = check(t->formula);
        if (!ty.is_unknown() && ty.kind() != Type::Kind::Fut) error(t->formula->loc, "Get target must be a future");
        return;
      }
      case K::Seq:
      case K::Alt:
      case K::Star:
        for (const auto& p : t->parts) check_session(c, m, p);
        return;
      case K::End: return;
    }
  }

  // -- scopes -----------------------------------------------------------------
  void push_params(const std::vector<Param>& ps) {
    frames_.emplace_back();
    for (const auto& p : ps) frames_.back()[p.name] = VarInfo{p.type, NameRef::Param};
  }
  void pop() { frames_.pop_back(); }

  const VarInfo* lookup(const std::string& n) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  std::optional<FieldDecl> field(const std::string& n) const {
    if (!cur_.cls || cur_.fields == FieldAccess::None) return std::nullopt;
    if (cur_.fields == FieldAccess::ParamsOnly) {
      for (const auto& p : cur_.cls->params)
        if (p.name == n) return FieldDecl{p.name, p.type, p.nullability, nullptr, p.loc};
      // Field initializers may read earlier body fields; the creation
      // condition cannot, but it is Bool-checked before any body field.
      for (const auto& f : cur_.cls->fields) {
        if (f.name == n && initialized_.count(n)) return f;
      }
      return std::nullopt;
    }
    for (const auto& f : cur_.cls->all_fields())
      if (f.name == n) return f;
    return std::nullopt;
  }

  // -- statements -------------------------------------------------------------
  void declare(const Target& t, SourceLoc loc) {
    if (lookup(t.name)) error(loc, "redeclaration of '" + t.name + "'");
    frames_.back()[t.name] = VarInfo{t.decl_type, NameRef::Local};
    all_local_decls_.emplace_back(t.name, VarInfo{t.decl_type, NameRef::Local});
  }

  Type target_type(Target& t, SourceLoc loc) {
    switch (t.kind) {
      case Target::Kind::None: return Type::unknown();
      case Target::Kind::Local: {
        if (t.declares) {
          resolve(t.decl_type, loc);
          check_nullability(t.decl_type, t.nullability, loc, "variable '" + t.name + "'");
          return t.decl_type;
        }
        if (auto* v = lookup(t.name)) {
          if (v->ref == NameRef::Param) {
            // ABS forbids assigning parameters.
            error(loc, "cannot assign to parameter '" + t.name + "'");
          }
          return v->type;
        }
        if (auto f = field(t.name)) {
          t.kind = Target::Kind::Field;
          return f->type;
        }
        error(loc, "unknown variable '" + t.name + "'");
        return Type::unknown();
      }
      case Target::Kind::Field: {
        if (auto f = field(t.name)) return f->type;
        error(loc, "unknown field '" + t.name + "'");
        return Type::unknown();
      }
    }
    return Type::unknown();
  }

  void finish_target(Target& t, SourceLoc loc) {
    if (t.kind == Target::Kind::Local && t.declares) declare(t, loc);
  }

  void check_assign(Target& t, const Type& value, SourceLoc loc) {
    if (t.kind == Target::Kind::None) return;
    Type tt = target_type(t, loc);
    if (!assignable(tt, value))
      error(loc, "cannot assign " + value.str() + " to '" + t.name + "' of type " + tt.str());
    finish_target(t, loc);
  }

  void check_args(const std::vector<Param>& params, std::vector<ExprPtr>& args, SourceLoc loc,
                  const std::string& what) {
    if (params.size() != args.size()) {
      error(loc, what + " expects " + std::to_string(params.size()) + " arguments, got " + std::to_string(args.size()));
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      Type t = check(args[i]);
      if (i < params.size() && !assignable(params[i].type, t))
        error(args[i]->loc, what + " argument " + std::to_string(i + 1) + ": expected " + params[i].type.str() +
                                ", found " + t.str());
    }
  }

  void check_block(Block& b, bool method_level) {
    frames_.emplace_back();
    for (std::size_t i = 0; i < b.size(); ++i) {
      auto& s = *b[i];
      if (s.kind == StmtKind::Return && !(method_level && i + 1 == b.size()))
        error(s.loc, "return must be the last statement of a method body");
      check_stmt(s);
    }
    // Keep declarations visible for session formulas via all_local_decls_.
    frames_.pop_back();
  }

  void check_stmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Skip: return;
      case StmtKind::VarDecl: {
        Type tt = target_type(s.target, s.loc);
        if (s.expr) {
          Type v = check(s.expr);
          if (!assignable(tt, v)) error(s.loc, "cannot assign " + v.str() + " to '" + s.target.name + "' of type " + tt.str());
        }
        finish_target(s.target, s.loc);
        return;
      }
      case StmtKind::Assign: {
        Type v = check(s.expr);
        check_assign(s.target, v, s.loc);
        return;
      }
      case StmtKind::AsyncCall: {
        Type recv = check(s.expr);
        Type ret = Type::unknown();
        if (recv.kind() != Type::Kind::Interface) {
          if (!recv.is_unknown()) error(s.loc, "asynchronous call on non-interface type " + recv.str());
          for (auto& a : s.args) check(a);
        } else if (const auto* i = p_.find_interface(recv.name())) {
          if (const auto* m = i->find(s.method)) {
            check_args(m->params, s.args, s.loc, recv.name() + "." + s.method);
            ret = m->return_type;
          } else {
            error(s.loc, "unknown method '" + s.method + "' of interface " + recv.name());
            for (auto& a : s.args) check(a);
          }
        }
        check_assign(s.target, ret.is_unknown() ? ret : Type::fut(ret), s.loc);
        return;
      }
      case StmtKind::Get: {
        Type f = check(s.expr);
        Type v = Type::unknown();
        if (f.kind() == Type::Kind::Fut) v = f.inner();
        else if (!f.is_unknown()) error(s.loc, "get on non-future type " + f.str());
        check_assign(s.target, v, s.loc);
        return;
      }
      case StmtKind::SyncCall: {
        const MethodDecl* m = cls_ ? cls_->find_method(s.method) : nullptr;
        Type ret = Type::unknown();
        if (!m) {
          error(s.loc, "unknown method '" + s.method + "' on this");
          for (auto& a : s.args) check(a);
        } else {
          check_args(m->sig.params, s.args, s.loc, "this." + s.method);
          ret = m->sig.return_type;
        }
        check_assign(s.target, ret, s.loc);
        return;
      }
      case StmtKind::Await: {
        Type g = check(s.expr);
        if (s.future_guard) {
          if (!g.is_unknown() && g.kind() != Type::Kind::Fut) error(s.loc, "await ...? needs a future, found " + g.str());
        } else if (!g.is_unknown() && g.kind() != Type::Kind::Bool) {
          error(s.loc, "await guard must be Bool or a future, found " + g.str());
        }
        return;
      }
      case StmtKind::If:
        expect_bool(s.expr, "if condition");
        check_block(s.then_body, false);
        check_block(s.else_body, false);
        return;
      case StmtKind::While: {
        expect_bool(s.expr, "while condition");
        if (s.invariant) {
          bool saved = cur_.spec;
          cur_.spec = true;
          expect_bool(s.invariant, "WhileInv");
          cur_.spec = saved;
        }
        check_block(s.else_body, false);
        return;
      }
      case StmtKind::Return: {
        const Type& rt = method_ ? method_->sig.return_type : Type::unknown();
        if (!s.expr) {
          if (rt.kind() != Type::Kind::Unit) error(s.loc, "missing return value of type " + rt.str());
          return;
        }
        Type v = check(s.expr);
        if (rt.kind() == Type::Kind::Unit) error(s.loc, "Unit method returns a value");
        else if (!assignable(rt, v)) error(s.loc, "returns " + v.str() + ", declared " + rt.str());
        return;
      }
      case StmtKind::New: {
        const ClassDecl* c = p_.find_class(s.class_name);
        Type t = Type::unknown();
        if (!c) {
          error(s.loc, "unknown class '" + s.class_name + "'");
          for (auto& a : s.args) check(a);
        } else {
          check_args(c->params, s.args, s.loc, "new " + c->name);
          if (c->implements.empty()) error(s.loc, "class " + c->name + " implements no interface and cannot be referenced");
          else t = Type::interface(c->implements);
        }
        check_assign(s.target, t, s.loc);
        return;
      }
      case StmtKind::ExprStmt: {
        Type t = check(s.expr);
        if (!(s.expr->kind == ExprKind::Call && s.expr->ref == NameRef::Builtin && t.kind() == Type::Kind::Unit))
          error(s.loc, "only builtin Unit calls may be used as statements");
        return;
      }
    }
  }

  // -- expressions -------------------------------------------------------------
  Type check(const ExprPtr& e) {
    if (!e) return Type::unknown();
    e->type = infer(*e);
    return e->type;
  }

  Type infer(Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Type::int_();
      case ExprKind::BoolLit: return Type::bool_();
      case ExprKind::NullLit: return Type::null();
      case ExprKind::StringLit: return Type::string();
      case ExprKind::Name: {
        if (const auto* v = lookup(e.text)) {
          e.ref = v->ref;
          return v->type;
        }
        if (auto f = field(e.text)) {
          e.kind = ExprKind::Field;
          e.ref = NameRef::Field;
          return f->type;
        }
        if (auto c = p_.find_ctor(e.text)) {
          if (!c->second->args.empty()) error(e.loc, "constructor '" + e.text + "' needs arguments");
          e.kind = ExprKind::Call;
          e.ref = NameRef::Constructor;
          return Type::data(c->first->name);
        }
        error(e.loc, "unknown name '" + e.text + "'");
        return Type::unknown();
      }
      case ExprKind::Field: {
        e.ref = NameRef::Field;
        if (auto f = field(e.text)) return f->type;
        error(e.loc, cur_.cls ? "field 'this." + e.text + "' not accessible here" : "no 'this' in this context");
        return Type::unknown();
      }
      case ExprKind::Result:
        if (!cur_.result) {
          error(e.loc, "'result' is only allowed in postconditions");
          return Type::unknown();
        }
        if (cur_.result->kind() == Type::Kind::Unit) error(e.loc, "'result' of a Unit method");
        return *cur_.result;
      case ExprKind::Unary: {
        Type t = check(e.args[0]);
        Type want = e.unop == UnOp::Not ? Type::bool_() : Type::int_();
        if (!t.is_unknown() && t != want) error(e.loc, std::string("operand of '") + to_string(e.unop) + "' must be " + want.str());
        return want;
      }
      case ExprKind::Binary: {
        Type a = check(e.args[0]);
        Type b = check(e.args[1]);
        auto need = [&](const Type& t, const Type& want, const ExprPtr& at) {
          if (!t.is_unknown() && t != want)
            error(at->loc, std::string("operand of '") + to_string(e.binop) + "' must be " + want.str() + ", found " + t.str());
        };
        if (is_arith(e.binop)) {
          need(a, Type::int_(), e.args[0]);
          need(b, Type::int_(), e.args[1]);
          return Type::int_();
        }
        if (is_rel(e.binop)) {
          need(a, Type::int_(), e.args[0]);
          need(b, Type::int_(), e.args[1]);
          return Type::bool_();
        }
        if (e.binop == BinOp::Eq || e.binop == BinOp::Ne) {
          if (!compatible(a, b)) error(e.loc, "cannot compare " + a.str() + " with " + b.str());
          return Type::bool_();
        }
        need(a, Type::bool_(), e.args[0]);
        need(b, Type::bool_(), e.args[1]);
        return Type::bool_();
      }
      case ExprKind::Call: return infer_call(e);
      case ExprKind::If: {
        expect_bool(e.args[0], "if-expression condition");
        Type a = check(e.args[1]);
        Type b = check(e.args[2]);
        if (!compatible(a, b)) error(e.loc, "if-expression branches have types " + a.str() + " and " + b.str());
        return join(a, b);
      }
      case ExprKind::Case: return infer_case(e);
      case ExprKind::Old:
      case ExprKind::Last: {
        if (!cur_.spec) error(e.loc, std::string(e.kind == ExprKind::Old ? "old" : "last") + " is only allowed in specifications");
        return check(e.args[0]);
      }
    }
    return Type::unknown();
  }

  Type infer_call(Expr& e) {
    if (e.text == "println" || e.text == "toString") {
      e.ref = NameRef::Builtin;
      if (e.args.size() != 1) error(e.loc, e.text + " takes one argument");
      for (auto& a : e.args) {
        Type t = check(a);
        if (e.text == "println" && !t.is_unknown() && t.kind() != Type::Kind::String)
          error(a->loc, "println expects a String");
      }
      return e.text == "println" ? Type::unit() : Type::string();
    }
    if (const auto* f = p_.find_function(e.text)) {
      e.ref = NameRef::Function;
      check_args(f->params, e.args, e.loc, e.text);
      Type rt = f->return_type;
      resolve_quiet(rt);
      return rt;
    }
    if (auto c = p_.find_ctor(e.text)) {
      e.ref = NameRef::Constructor;
      const auto& ctor = *c->second;
      if (ctor.args.size() != e.args.size()) error(e.loc, "constructor '" + e.text + "' arity mismatch");
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        Type t = check(e.args[i]);
        if (i < ctor.args.size() && !assignable(ctor.args[i], t))
          error(e.args[i]->loc, "constructor argument has type " + t.str() + ", expected " + ctor.args[i].str());
      }
      return Type::data(c->first->name);
    }
    error(e.loc, "unknown function '" + e.text + "'");
    for (auto& a : e.args) check(a);
    return Type::unknown();
  }

  void resolve_quiet(Type& t) {
    if (t.kind() == Type::Kind::Named) {
      if (p_.find_interface(t.name())) t = Type::interface(t.name());
      else if (p_.find_data(t.name())) t = Type::data(t.name());
    }
  }

  Type infer_case(Expr& e) {
    Type s = check(e.args[0]);
    const DataDecl* d = nullptr;
    if (s.kind() == Type::Kind::Data) d = p_.find_data(s.name());
    else if (!s.is_unknown()) error(e.loc, "case scrutinee must be a datatype, found " + s.str());
    std::optional<Type> out;
    std::set<std::string> seen;
    for (auto& b : e.branches) {
      frames_.emplace_back();
      if (b.ctor != "_") {
        auto c = p_.find_ctor(b.ctor);
        if (!c || (d && c->first != d)) {
          error(b.body->loc, "'" + b.ctor + "' is not a constructor of " + s.str());
        } else {
          if (!seen.insert(b.ctor).second) error(b.body->loc, "duplicate case branch '" + b.ctor + "'");
          if (c->second->args.size() != b.binders.size()) error(b.body->loc, "pattern '" + b.ctor + "' arity mismatch");
          for (std::size_t i = 0; i < b.binders.size() && i < c->second->args.size(); ++i)
            frames_.back()[b.binders[i]] = VarInfo{c->second->args[i], NameRef::Local};
        }
      }
      Type t = check(b.body);
      frames_.pop_back();
      if (out && !compatible(*out, t)) error(b.body->loc, "case branches have types " + out->str() + " and " + t.str());
      out = out ? join(*out, t) : t;
    }
    if (!out) error(e.loc, "case expression without branches");
    return out.value_or(Type::unknown());
  }

  Program& p_;
  std::vector<TypeError> errs_;
  std::vector<std::map<std::string, VarInfo>> frames_;
  std::vector<std::pair<std::string, VarInfo>> all_local_decls_;
  std::set<std::string> initialized_;
  Ctx cur_;
  const ClassDecl* cls_ = nullptr;
  const MethodDecl* method_ = nullptr;
};

}  // namespace

std::vector<TypeError> typecheck(Program& p) { return Checker(p).run(); }

}  // namespace bsev
