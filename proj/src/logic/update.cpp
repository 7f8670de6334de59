#include "bsev/logic/update.hpp"

#include <map>

namespace bsev::logic {

namespace {

std::string key(const Term& loc) {
  if (loc.op == Op::Var) return "v:" + loc.name;
  if (loc.op == Op::HeapVar) return "h:" + loc.name;
  throw SortError("update location must be a variable or heap variable");
}

TermPtr subst(const TermPtr& t, const std::map<std::string, TermPtr>& m) {
  if (t->op == Op::Var && t->var_kind != VarKind::Bound) {
    auto it = m.find("v:" + t->name);
    return it == m.end() ? t : it->second;
  }
  if (t->op == Op::HeapVar) {
    auto it = m.find("h:" + t->name);
    return it == m.end() ? t : it->second;
  }
  if (t->args.empty() && t->arms.empty()) return t;
  bool changed = false;
  auto copy = std::make_shared<Term>(*t);
  for (auto& a : copy->args) {
    auto n = subst(a, m);
    changed |= n != a;
    a = n;
  }
  for (auto& arm : copy->arms) {
    auto n = subst(arm.body, m);
    changed |= n != arm.body;
    arm.body = n;
  }
  return changed ? TermPtr(copy) : t;
}

}  // namespace

Update& Update::set(const TermPtr& loc, TermPtr value) {
  bool ok = value->sort == loc->sort || (value->op == Op::Null && loc->sort.kind != Sort::Kind::Int &&
                                         loc->sort.kind != Sort::Kind::Bool && loc->sort.kind != Sort::Kind::Data);
  if (!ok) throw SortError("update " + to_string(loc) + " := " + to_string(value) + " changes sort");
  std::string k = key(*loc);
  for (auto& [l, v] : elems_) {
    if (key(*l) == k) {
      v = std::move(value);
      return *this;
    }
  }
  elems_.emplace_back(loc, std::move(value));
  return *this;
}

TermPtr Update::lookup(const TermPtr& loc) const {
  std::string k = key(*loc);
  for (const auto& [l, v] : elems_)
    if (key(*l) == k) return v;
  return nullptr;
}

Update Update::then(const Update& next) const {
  Update out = *this;
  for (const auto& [l, v] : next.elems_) out.set(l, apply_update(*this, v));
  return out;
}

Update Update::assign(const TermPtr& loc, const TermPtr& value) const {
  Update out = *this;
  out.set(loc, apply_update(*this, value));
  return out;
}

TermPtr apply_update(const Update& u, const TermPtr& t) {
  if (u.empty()) return t;
  std::map<std::string, TermPtr> m;
  for (const auto& [l, v] : u.elements()) m[key(*l)] = v;
  return simplify_select_store(subst(t, m));
}

std::string to_string(const Update& u) {
  if (u.empty()) return "{}";
  std::string s = "{";
  for (std::size_t i = 0; i < u.elements().size(); ++i) {
    const auto& [l, v] = u.elements()[i];
    s += (i ? " || " : "") + to_string(l) + " := " + to_string(v);
  }
  return s + "}";
}

}  // namespace bsev::logic
