#include "bsev/engine/translate.hpp"

#include <stdexcept>

#include "bsev/logic/update.hpp"

namespace bsev {

using namespace logic;

Sort sort_of(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Int: return Sort::int_();
    case Type::Kind::Bool: return Sort::bool_();
    case Type::Kind::String: return Sort::string();
    case Type::Kind::Fut: return Sort::fut();
    case Type::Kind::Interface:
    case Type::Kind::Null: return Sort::ref();
    case Type::Kind::Data: return Sort::data(t.name());
    default: throw SortError("no logic sort for type " + t.str());
  }
}

TermPtr result_var(const Type& t) { return var("result", sort_of(t)); }
TermPtr param_var(const Param& p) { return var(p.name, sort_of(p.type)); }

TermPtr Translator::field_symbol(const std::string& name) const {
  if (!cls_) throw SortError("field access outside a class: " + name);
  for (const auto& f : cls_->all_fields())
    if (f.name == name) return field(cls_->name, name, sort_of(f.type));
  throw SortError("unknown field " + name);
}

TermPtr Translator::heap_select(const std::string& f) const { return select(heap_var("heap"), field_symbol(f)); }

namespace {

Op binop(BinOp op) {
  switch (op) {
    case BinOp::Add: return Op::Add;
    case BinOp::Sub: return Op::Sub;
    case BinOp::Mul: return Op::Mul;
    case BinOp::Div: return Op::Div;
    case BinOp::Mod: return Op::Mod;
    case BinOp::Lt: return Op::Lt;
    case BinOp::Le: return Op::Le;
    case BinOp::Gt: return Op::Gt;
    case BinOp::Ge: return Op::Ge;
    default: return Op::Eq;
  }
}

}  // namespace

TermPtr Translator::go(const ExprPtr& e, const std::string& heap) const {
  switch (e->kind) {
    case ExprKind::IntLit: return int_lit(e->int_value);
    case ExprKind::BoolLit: return bool_lit(e->bool_value);
    case ExprKind::NullLit: return null_lit();
    case ExprKind::StringLit: throw SortError("string literals have no logic counterpart");
    case ExprKind::Name: return var(e->text, sort_of(e->type));
    case ExprKind::Field: return select(heap_var(heap), field_symbol(e->text));
    case ExprKind::Result: return var("result", sort_of(e->type));
    case ExprKind::Unary:
      return e->unop == UnOp::Not ? not_(go(e->args[0], heap)) : neg(go(e->args[0], heap));
    case ExprKind::Binary: {
      TermPtr a = go(e->args[0], heap);
      TermPtr b = go(e->args[1], heap);
      switch (e->binop) {
        case BinOp::And: return and_(a, b);
        case BinOp::Or: return or_(a, b);
        case BinOp::Implies: return implies(a, b);
        case BinOp::Eq: return eq(a, b);
        case BinOp::Ne: return ne(a, b);
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return cmp(binop(e->binop), a, b);
        default: return arith(binop(e->binop), a, b);
      }
    }
    case ExprKind::Call: {
      std::vector<TermPtr> args;
      for (const auto& a : e->args) args.push_back(go(a, heap));
      if (e->ref == NameRef::Constructor) return ctor(e->text, std::move(args), sort_of(e->type));
      return fun(e->text, std::move(args), sort_of(e->type));
    }
    case ExprKind::If: return ite(go(e->args[0], heap), go(e->args[1], heap), go(e->args[2], heap));
    case ExprKind::Case: {
      TermPtr scrutinee = go(e->args[0], heap);
      std::vector<CaseArm> arms;
      for (const auto& b : e->branches) {
        CaseArm arm;
        arm.ctor = b.ctor;
        Update rename;
        if (b.ctor != "_") {
          auto c = p_.find_ctor(b.ctor);
          for (std::size_t i = 0; i < b.binders.size(); ++i) {
            Sort s = sort_of(c->second->args[i]);
            // Binder names are made unique per case expression so that
            // repeated translation yields identical terms.
            std::string unique = b.binders[i] + "_" + std::to_string(e->id);
            arm.binders.push_back({unique, s});
            rename.set(var(b.binders[i], s), var(unique, s, VarKind::Bound));
          }
        }
        arm.body = apply_update(rename, go(b.body, heap));
        arms.push_back(std::move(arm));
      }
      return case_(scrutinee, std::move(arms), sort_of(e->type));
    }
    case ExprKind::Old: return go(e->args[0], "oldHeap");
    case ExprKind::Last: return go(e->args[0], "lastHeap");
  }
  throw SortError("untranslatable expression");
}

Contract interface_contract(const Program& p, const MethodSig& sig) {
  Translator t(p, nullptr);
  return {t.formula(sig.pre), t.formula(sig.post)};
}

Contract method_contract(const Program& p, const ClassDecl& c, const MethodDecl& m) {
  Translator t(p, &c);
  Contract own{t.formula(m.sig.pre), t.formula(m.sig.post)};
  const InterfaceDecl* iface = c.implements.empty() ? nullptr : p.find_interface(c.implements);
  const MethodSig* isig = iface ? iface->find(m.sig.name) : nullptr;
  if (!isig) return own;
  Contract ic = interface_contract(p, *isig);
  Update rename;
  for (std::size_t i = 0; i < isig->params.size() && i < m.sig.params.size(); ++i)
    if (isig->params[i].name != m.sig.params[i].name) rename.set(param_var(isig->params[i]), param_var(m.sig.params[i]));
  return {and_(apply_update(rename, ic.pre), own.pre), and_(apply_update(rename, ic.post), own.post)};
}

TermPtr object_invariant(const Program& p, const ClassDecl& c) { return Translator(p, &c).formula(c.obj_invariant); }
TermPtr creation_condition(const Program& p, const ClassDecl& c) { return Translator(p, &c).formula(c.creation_cond); }

TermPtr function_axiom(const Program& p, const FunDecl& f) {
  if (!f.post) return nullptr;
  Translator t(p, nullptr);
  std::vector<BoundVar> bound;
  std::vector<TermPtr> call_args;
  Update to_bound;
  for (std::size_t i = 0; i < f.params.size(); ++i) {
    Sort s = sort_of(f.params[i].type);
    std::string name = "x_" + std::to_string(i + 1);
    bound.push_back({name, s});
    auto bv = var(name, s, VarKind::Bound);
    call_args.push_back(bv);
    to_bound.set(param_var(f.params[i]), bv);
  }
  Sort rs = sort_of(f.return_type);
  to_bound.set(var("result", rs), fun(f.name, call_args, rs));
  TermPtr body = implies(t.formula(f.pre), t.formula(f.post));
  return forall(bound, apply_update(to_bound, body));
}

}  // namespace bsev
