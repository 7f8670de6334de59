#include "bsev/frontend/ast.hpp"

#include <atomic>

namespace bsev {

namespace {
std::atomic<int> g_node_ids{1};
}

int next_node_id() { return g_node_ids.fetch_add(1, std::memory_order_relaxed); }

Type Type::fut(Type inner) {
  Type t(Kind::Fut);
  t.inner_ = std::make_shared<const Type>(std::move(inner));
  return t;
}

const Type& Type::inner() const {
  static const Type unknown;
  return inner_ ? *inner_ : unknown;
}

std::string Type::str() const {
  switch (kind_) {
    case Kind::Unknown: return "?";
    case Kind::Int: return "Int";
    case Kind::Bool: return "Bool";
    case Kind::Unit: return "Unit";
    case Kind::String: return "String";
    case Kind::Null: return "Null";
    case Kind::Fut: return "Fut<" + inner().str() + ">";
    case Kind::Named:
    case Kind::Interface:
    case Kind::Data: return name_;
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind_ != b.kind_) {
    // A Named type compares equal to its resolved form.
    auto named_like = [](const Type& t) {
      return t.kind_ == Type::Kind::Named || t.kind_ == Type::Kind::Interface ||
             t.kind_ == Type::Kind::Data;
    };
    return named_like(a) && named_like(b) &&
           (a.kind_ == Type::Kind::Named || b.kind_ == Type::Kind::Named) && a.name_ == b.name_;
  }
  if (a.kind_ == Type::Kind::Fut) return a.inner() == b.inner();
  return a.name_ == b.name_;
}

const char* to_string(UnOp op) { return op == UnOp::Not ? "!" : "-"; }

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    case BinOp::Implies: return "->";
  }
  return "?";
}

const MethodSig* InterfaceDecl::find(const std::string& method) const {
  for (const auto& m : methods)
    if (m.name == method) return &m;
  return nullptr;
}

const MethodDecl* ClassDecl::find_method(const std::string& m) const {
  for (const auto& md : methods)
    if (md.sig.name == m) return &md;
  return nullptr;
}

std::vector<FieldDecl> ClassDecl::all_fields() const {
  std::vector<FieldDecl> out;
  for (const auto& p : params) out.push_back(FieldDecl{p.name, p.type, p.nullability, nullptr, p.loc});
  out.insert(out.end(), fields.begin(), fields.end());
  return out;
}

std::optional<std::string> ClassDecl::role_field(const std::string& role) const {
  for (const auto& [r, f] : roles)
    if (r == role) return f;
  return std::nullopt;
}

const InterfaceDecl* Program::find_interface(const std::string& n) const {
  for (const auto& i : interfaces)
    if (i.name == n) return &i;
  return nullptr;
}

const ClassDecl* Program::find_class(const std::string& n) const {
  for (const auto& c : classes)
    if (c.name == n) return &c;
  return nullptr;
}

const FunDecl* Program::find_function(const std::string& n) const {
  for (const auto& f : functions)
    if (f.name == n) return &f;
  return nullptr;
}

const DataDecl* Program::find_data(const std::string& n) const {
  for (const auto& d : datatypes)
    if (d.name == n) return &d;
  return nullptr;
}

std::optional<std::pair<const DataDecl*, const CtorDecl*>> Program::find_ctor(
    const std::string& ctor) const {
  for (const auto& d : datatypes)
    for (const auto& c : d.ctors)
      if (c.name == ctor) return std::make_pair(&d, &c);
  return std::nullopt;
}

ExprPtr make_int(long long v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->int_value = v;
  e->id = next_node_id();
  e->type = Type::int_();
  return e;
}

ExprPtr make_bool(bool v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->bool_value = v;
  e->id = next_node_id();
  e->type = Type::bool_();
  return e;
}

ExprPtr make_name(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Name;
  e->text = std::move(name);
  e->id = next_node_id();
  return e;
}

ExprPtr make_binary(BinOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->binop = op;
  e->args = {std::move(a), std::move(b)};
  e->id = next_node_id();
  return e;
}

ExprPtr clone(const ExprPtr& e) {
  if (!e) return nullptr;
  auto c = std::make_shared<Expr>(*e);
  c->id = next_node_id();
  for (auto& a : c->args) a = clone(a);
  for (auto& b : c->branches) b.body = clone(b.body);
  return c;
}

}  // namespace bsev
