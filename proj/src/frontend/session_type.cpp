#include "bsev/frontend/session_type.hpp"

#include "bsev/frontend/printer.hpp"

namespace bsev::session_type {

namespace {

SessionTypePtr make(SessionType::Kind k, std::string role = {}, std::string method = {},
                    ExprPtr f = nullptr, std::vector<SessionTypePtr> parts = {}) {
  auto t = std::make_shared<SessionType>();
  t->kind = k;
  t->role = std::move(role);
  t->method = std::move(method);
  t->formula = std::move(f);
  t->parts = std::move(parts);
  return t;
}

std::string formula_text(const ExprPtr& f) { return f ? to_source(f) : "true"; }

}  // namespace

SessionTypePtr call(std::string role, std::string method, ExprPtr formula) {
  return make(SessionType::Kind::Call, std::move(role), std::move(method), std::move(formula));
}
SessionTypePtr susp(ExprPtr formula) { return make(SessionType::Kind::Susp, {}, {}, std::move(formula)); }
SessionTypePtr get(ExprPtr target) { return make(SessionType::Kind::Get, {}, {}, std::move(target)); }
SessionTypePtr put(ExprPtr formula) { return make(SessionType::Kind::Put, {}, {}, std::move(formula)); }
SessionTypePtr alt(SessionTypePtr l, SessionTypePtr r) {
  return make(SessionType::Kind::Alt, {}, {}, nullptr, {std::move(l), std::move(r)});
}
SessionTypePtr star(SessionTypePtr body) {
  return make(SessionType::Kind::Star, {}, {}, nullptr, {std::move(body)});
}
SessionTypePtr end() {
  static const SessionTypePtr e = make(SessionType::Kind::End);
  return e;
}

bool is_end(const SessionTypePtr& t) { return !t || t->kind == SessionType::Kind::End; }

SessionTypePtr seq(SessionTypePtr a, SessionTypePtr b) {
  if (is_end(a)) return is_end(b) ? end() : b;
  if (is_end(b)) return a;
  if (a->kind == SessionType::Kind::Seq) return seq(a->parts[0], seq(a->parts[1], b));
  return make(SessionType::Kind::Seq, {}, {}, nullptr, {std::move(a), std::move(b)});
}

std::pair<SessionTypePtr, SessionTypePtr> split_head(const SessionTypePtr& t) {
  if (is_end(t)) return {end(), end()};
  if (t->kind == SessionType::Kind::Seq) return {t->parts[0], t->parts[1]};
  return {t, end()};
}

std::string to_string(const SessionTypePtr& t) {
  if (!t) return "End";
  using K = SessionType::Kind;
  switch (t->kind) {
    case K::Call:
      return t->role + "!" + t->method + (t->formula ? "(" + to_source(t->formula) + ")" : "");
    case K::Susp: return "Susp(" + formula_text(t->formula) + ")";
    case K::Get: return "Get(" + formula_text(t->formula) + ")";
    case K::Put: return t->formula ? "Put(" + to_source(t->formula) + ")" : "Put";
    case K::Seq: {
      auto part = [](const SessionTypePtr& p) {
        return p->kind == K::Alt ? "(" + to_string(p) + ")" : to_string(p);
      };
      return part(t->parts[0]) + "." + part(t->parts[1]);
    }
    case K::Alt: return to_string(t->parts[0]) + " + " + to_string(t->parts[1]);
    case K::Star: {
      const auto& b = t->parts[0];
      bool atomic = b->kind == K::Call || b->kind == K::Susp || b->kind == K::Get || b->kind == K::Put;
      return (atomic ? to_string(b) : "(" + to_string(b) + ")") + "*";
    }
    case K::End: return "End";
  }
  return "?";
}

std::string structure(const SessionTypePtr& t) {
  if (!t) return "End";
  using K = SessionType::Kind;
  switch (t->kind) {
    case K::Call: return "Call(" + t->role + "," + t->method + "," + formula_text(t->formula) + ")";
    case K::Susp: return "Susp(" + formula_text(t->formula) + ")";
    case K::Get: return "Get(" + formula_text(t->formula) + ")";
    case K::Put: return "Put(" + formula_text(t->formula) + ")";
    case K::Seq: return "Seq(" + structure(t->parts[0]) + ", " + structure(t->parts[1]) + ")";
    case K::Alt: return "Alt(" + structure(t->parts[0]) + ", " + structure(t->parts[1]) + ")";
    case K::Star: return "Star(" + structure(t->parts[0]) + ")";
    case K::End: return "End";
  }
  return "?";
}

}  // namespace bsev::session_type
