#include "bsev/frontend/nullability.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace bsev {

Nullability NullabilityFacts::at(const Expr& e) const {
  auto it = facts_.find(e.id);
  return it == facts_.end() ? Nullability::Nullable : it->second;
}

std::string NullabilityError::str() const {
  return std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": nullability error: " + message;
}

namespace {

// Access paths known to be non-null at a program point: "x" or "this.f".
using PathSet = std::set<std::string>;

PathSet intersect(const PathSet& a, const PathSet& b) {
  PathSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.begin()));
  return out;
}

std::optional<std::string> path_of(const Expr& e) {
  if (e.kind == ExprKind::Field) return "this." + e.text;
  if (e.kind == ExprKind::Name && (e.ref == NameRef::Local || e.ref == NameRef::Param)) return e.text;
  return std::nullopt;
}

class Inference {
 public:
  explicit Inference(const Program& p) : p_(p) {}

  NullabilityResult run() {
    for (const auto& c : p_.classes) {
      cls_ = &c;
      PathSet none;
      for (const auto& f : c.fields) {
        if (f.init) {
          bool nn = eval(*f.init, none);
          if (f.nullability == Nullability::NonNull && !nn)
            error(f.loc, "NonNull field '" + f.name + "' initialized with a possibly null value");
        } else if (f.nullability == Nullability::NonNull) {
          error(f.loc, "NonNull field '" + f.name + "' has no initializer");
        }
      }
      for (const auto& m : c.methods) {
        declared_.clear();
        for (const auto& p : m.sig.params)
          if (p.nullability == Nullability::NonNull) declared_.insert(p.name);
        block(m.body, PathSet{});
      }
    }
    return std::move(out_);
  }

 private:
  void error(SourceLoc loc, std::string msg) { out_.errors.push_back({loc, std::move(msg)}); }

  bool declared_non_null(const std::string& path) const {
    if (declared_.count(path)) return true;
    if (path.rfind("this.", 0) == 0) {
      std::string f = path.substr(5);
      for (const auto& p : cls_->params)
        if (p.name == f) return p.nullability == Nullability::NonNull;
      for (const auto& d : cls_->fields)
        if (d.name == f) return d.nullability == Nullability::NonNull;
    }
    return false;
  }

  // Records facts for every reference-typed occurrence in `e`; returns
  // whether `e` itself is non-null.
  bool eval(const Expr& e, const PathSet& known) {
    for (const auto& a : e.args) eval(*a, known);
    for (const auto& b : e.branches) eval(*b.body, known);
    bool nn = false;
    switch (e.kind) {
      case ExprKind::Name:
      case ExprKind::Field:
        if (auto path = path_of(e)) nn = known.count(*path) || declared_non_null(*path);
        break;
      case ExprKind::If: nn = out_.facts.non_null(*e.args[1]) && out_.facts.non_null(*e.args[2]); break;
      case ExprKind::StringLit: nn = true; break;
      default: break;
    }
    if (e.type.is_reference()) out_.facts.set(e, nn ? Nullability::NonNull : Nullability::Nullable);
    return nn;
  }

  // Paths proven non-null when `c` evaluates to `value`.
  void refine(const Expr& c, bool value, PathSet& known) {
    if (c.kind == ExprKind::Unary && c.unop == UnOp::Not) return refine(*c.args[0], !value, known);
    if (c.kind != ExprKind::Binary) return;
    if ((c.binop == BinOp::And && value) || (c.binop == BinOp::Or && !value)) {
      refine(*c.args[0], value, known);
      refine(*c.args[1], value, known);
      return;
    }
    bool ne = c.binop == BinOp::Ne;
    if (!(ne || c.binop == BinOp::Eq) || ne != value) return;
    const Expr* other = nullptr;
    if (c.args[1]->kind == ExprKind::NullLit) other = c.args[0].get();
    else if (c.args[0]->kind == ExprKind::NullLit) other = c.args[1].get();
    if (!other) return;
    if (auto path = path_of(*other)) known.insert(*path);
  }

  std::string target_path(const Target& t) const { return t.kind == Target::Kind::Field ? "this." + t.name : t.name; }

  void assign(const Target& t, bool nn, SourceLoc loc, PathSet& known) {
    if (t.kind == Target::Kind::None) return;
    std::string path = target_path(t);
    if (t.kind == Target::Kind::Local && t.declares && t.nullability == Nullability::NonNull) declared_.insert(path);
    if (!nn && declared_non_null(path)) error(loc, "possibly null value assigned to NonNull '" + t.name + "'");
    if (nn) known.insert(path);
    else known.erase(path);
  }

  void forget_fields(PathSet& known) {
    for (auto it = known.begin(); it != known.end();) {
      if (it->rfind("this.", 0) == 0) it = known.erase(it);
      else ++it;
    }
  }

  void check_args(const std::vector<Param>& params, const std::vector<ExprPtr>& args, const PathSet& known) {
    for (std::size_t i = 0; i < args.size(); ++i) {
      bool nn = eval(*args[i], known);
      if (i < params.size() && params[i].nullability == Nullability::NonNull && !nn)
        error(args[i]->loc, "possibly null argument for NonNull parameter '" + params[i].name + "'");
    }
  }

  PathSet block(const Block& b, PathSet known) {
    for (const auto& s : b) known = stmt(*s, std::move(known));
    return known;
  }

  PathSet stmt(const Stmt& s, PathSet known) {
    switch (s.kind) {
      case StmtKind::Skip: return known;
      case StmtKind::VarDecl:
      case StmtKind::Assign: {
        bool nn = s.expr ? eval(*s.expr, known) : false;
        if (!s.expr && s.target.nullability == Nullability::NonNull && s.target.decl_type.is_reference())
          error(s.loc, "NonNull variable '" + s.target.name + "' declared without a value");
        assign(s.target, nn, s.loc, known);
        return known;
      }
      case StmtKind::AsyncCall: {
        eval(*s.expr, known);
        const MethodSig* callee = nullptr;
        if (s.expr->type.kind() == Type::Kind::Interface)
          if (const auto* i = p_.find_interface(s.expr->type.name())) callee = i->find(s.method);
        check_args(callee ? callee->params : std::vector<Param>{}, s.args, known);
        assign(s.target, true, s.loc, known);
        return known;
      }
      case StmtKind::Get:
        eval(*s.expr, known);
        assign(s.target, false, s.loc, known);
        return known;
      case StmtKind::SyncCall: {
        const MethodDecl* m = cls_->find_method(s.method);
        check_args(m ? m->sig.params : std::vector<Param>{}, s.args, known);
        forget_fields(known);
        assign(s.target, false, s.loc, known);
        return known;
      }
      case StmtKind::Await:
        eval(*s.expr, known);
        forget_fields(known);
        return known;
      case StmtKind::If: {
        eval(*s.expr, known);
        PathSet t = known, e = known;
        refine(*s.expr, true, t);
        refine(*s.expr, false, e);
        return intersect(block(s.then_body, t), block(s.else_body, e));
      }
      case StmtKind::While: {
        // Greatest fixpoint: shrink the entry set until the body preserves it.
        PathSet entry = known;
        for (;;) {
          eval(*s.expr, entry);
          PathSet in = entry;
          refine(*s.expr, true, in);
          PathSet next = intersect(entry, block(s.else_body, in));
          if (next == entry) break;
          entry = std::move(next);
        }
        refine(*s.expr, false, entry);
        return entry;
      }
      case StmtKind::Return:
        if (s.expr) eval(*s.expr, known);
        return known;
      case StmtKind::New: {
        const ClassDecl* c = p_.find_class(s.class_name);
        check_args(c ? c->params : std::vector<Param>{}, s.args, known);
        assign(s.target, true, s.loc, known);
        return known;
      }
      case StmtKind::ExprStmt:
        eval(*s.expr, known);
        return known;
    }
    return known;
  }

  const Program& p_;
  const ClassDecl* cls_ = nullptr;
  std::set<std::string> declared_;
  NullabilityResult out_;
};

}  // namespace

NullabilityResult infer_nullability(const Program& p) { return Inference(p).run(); }

}  // namespace bsev
