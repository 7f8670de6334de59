#include "bsev/engine/pattern.hpp"

#include "bsev/frontend/session_type.hpp"

namespace bsev {

namespace {

struct KindInfo {
  Kind kind;
  const char* name;
  std::optional<Kind> parent;
};

const KindInfo kKinds[] = {
    {Kind::Any, "Any", std::nullopt},
    {Kind::State, "State", Kind::Any},
    {Kind::Prog, "Prog", Kind::Any},
    {Kind::ProgSeq, "ProgSeq", Kind::Prog},
    {Kind::ProgNil, "ProgNil", Kind::Prog},
    {Kind::Stmt, "Stmt", Kind::Any},
    {Kind::SilentStmt, "SilentStmt", Kind::Stmt},
    {Kind::Skip, "Skip", Kind::SilentStmt},
    {Kind::VarDecl, "VarDecl", Kind::SilentStmt},
    {Kind::AssignLocal, "AssignLocal", Kind::SilentStmt},
    {Kind::AssignField, "AssignField", Kind::SilentStmt},
    {Kind::If, "If", Kind::SilentStmt},
    {Kind::ExprStmt, "ExprStmt", Kind::SilentStmt},
    {Kind::New, "New", Kind::SilentStmt},
    {Kind::ActionStmt, "ActionStmt", Kind::Stmt},
    {Kind::AsyncCall, "AsyncCall", Kind::ActionStmt},
    {Kind::Get, "Get", Kind::ActionStmt},
    {Kind::SyncCall, "SyncCall", Kind::ActionStmt},
    {Kind::Await, "Await", Kind::ActionStmt},
    {Kind::Return, "Return", Kind::ActionStmt},
    {Kind::While, "While", Kind::ActionStmt},
    {Kind::Expr, "Expr", Kind::Any},
    {Kind::Spec, "Spec", Kind::Any},
    {Kind::SpecPost, "SpecPost", Kind::Spec},
    {Kind::SpecSession, "SpecSession", Kind::Spec},
    {Kind::Session, "Session", Kind::Any},
    {Kind::SCall, "SCall", Kind::Session},
    {Kind::SSusp, "SSusp", Kind::Session},
    {Kind::SGet, "SGet", Kind::Session},
    {Kind::SPut, "SPut", Kind::Session},
    {Kind::SAlt, "SAlt", Kind::Session},
    {Kind::SStar, "SStar", Kind::Session},
    {Kind::SEnd, "SEnd", Kind::Session},
};

const KindInfo& info(Kind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i;
  throw std::logic_error("unregistered kind");
}

Kind stmt_kind(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::Skip: return Kind::Skip;
    case StmtKind::VarDecl: return Kind::VarDecl;
    case StmtKind::Assign: return s.target.kind == Target::Kind::Field ? Kind::AssignField : Kind::AssignLocal;
    case StmtKind::AsyncCall: return Kind::AsyncCall;
    case StmtKind::Get: return Kind::Get;
    case StmtKind::SyncCall: return Kind::SyncCall;
    case StmtKind::Await: return Kind::Await;
    case StmtKind::If: return Kind::If;
    case StmtKind::While: return Kind::While;
    case StmtKind::Return: return Kind::Return;
    case StmtKind::New: return Kind::New;
    case StmtKind::ExprStmt: return Kind::ExprStmt;
  }
  return Kind::Stmt;
}

Kind session_kind(const SessionType& t) {
  switch (t.kind) {
    case SessionType::Kind::Call: return Kind::SCall;
    case SessionType::Kind::Susp: return Kind::SSusp;
    case SessionType::Kind::Get: return Kind::SGet;
    case SessionType::Kind::Put: return Kind::SPut;
    case SessionType::Kind::Alt: return Kind::SAlt;
    case SessionType::Kind::Star: return Kind::SStar;
    case SessionType::Kind::End: return Kind::SEnd;
    case SessionType::Kind::Seq: break;
  }
  return Kind::Session;  // a Seq never heads a remaining type
}

}  // namespace

const char* to_string(Kind k) { return info(k).name; }
std::optional<Kind> parent(Kind k) { return info(k).parent; }

bool is_subkind(Kind k, Kind of) {
  for (std::optional<Kind> c = k; c; c = parent(*c))
    if (*c == of) return true;
  return false;
}

Matchable Matchable::of(const SymbolicState& s) {
  Matchable m;
  m.kind_ = Kind::State;
  m.state_ = &s;
  return m;
}

Matchable Matchable::of(const Prog& p) {
  Matchable m;
  m.kind_ = p ? Kind::ProgSeq : Kind::ProgNil;
  m.prog_ = p;
  return m;
}

Matchable Matchable::of(const StmtPtr& s) {
  Matchable m;
  m.kind_ = stmt_kind(*s);
  m.stmt_ = s;
  return m;
}

Matchable Matchable::of(const SessionTypePtr& t) {
  Matchable m;
  m.kind_ = session_kind(*t);
  m.session_ = t;
  return m;
}

Matchable Matchable::of_expr(const ExprPtr& e) {
  Matchable m;
  m.kind_ = Kind::Expr;
  m.expr_ = e;
  return m;
}

Matchable Matchable::of_spec(const BehavioralSpec& s) {
  Matchable m;
  m.spec_ = std::make_shared<BehavioralSpec>(s);
  if (s.kind == BehavioralSpec::Kind::Post) {
    m.kind_ = Kind::SpecPost;
  } else {
    m.kind_ = Kind::SpecSession;
    auto [head, rest] = session_type::split_head(s.session);
    m.session_ = head;
    m.rest_ = rest;
  }
  return m;
}

Matchable Matchable::abstract_node(Kind k) {
  Matchable m;
  m.kind_ = k;
  m.abstract_ = true;
  return m;
}

std::vector<Matchable> Matchable::children() const {
  if (abstract_) return {};
  switch (kind_) {
    case Kind::State: return {of(state_->prog), of_spec(state_->spec)};
    case Kind::ProgSeq: return {of(prog_->head), of(prog_->tail)};
    case Kind::If:
      return {of_expr(stmt_->expr), of(prepend(stmt_->then_body, nullptr)), of(prepend(stmt_->else_body, nullptr))};
    case Kind::While: return {of_expr(stmt_->expr), of(prepend(stmt_->else_body, nullptr))};
    case Kind::SpecPost: return {};
    case Kind::SpecSession: return {of(session_), of(rest_)};
    case Kind::SAlt: return {of(session_->parts[0]), of(session_->parts[1])};
    case Kind::SStar: return {of(session_->parts[0])};
    default: return {};
  }
}

std::string Pattern::str() const {
  if (is_var) return name + ":" + to_string(kind);
  std::string s = to_string(kind);
  if (children.empty()) return s;
  s += "(";
  for (std::size_t i = 0; i < children.size(); ++i) s += (i ? ", " : "") + children[i].str();
  return s + ")";
}

Pattern state_pattern(Pattern prog, Pattern spec) { return Pattern::node(Kind::State, {std::move(prog), std::move(spec)}); }

namespace {

bool match_into(const Pattern& p, const Matchable& m, Bindings& out) {
  if (p.is_var) {
    if (m.is_abstract() || !is_subkind(m.kind(), p.kind)) return false;
    auto [it, fresh] = out.emplace(p.name, m);
    return fresh;  // a variable occurs at most once per pattern
  }
  if (m.kind() != p.kind) return false;
  if (p.children.empty()) return true;
  auto cs = m.children();
  if (cs.size() != p.children.size()) return false;
  for (std::size_t i = 0; i < cs.size(); ++i)
    if (!match_into(p.children[i], cs[i], out)) return false;
  return true;
}

}  // namespace

std::optional<Bindings> match(const Pattern& p, const Matchable& m) {
  Bindings b;
  if (!match_into(p, m, b)) return std::nullopt;
  return b;
}

RuleSet::RuleSet(std::string name, std::vector<Rule> rules, StuckReason stuck)
    : name_(std::move(name)), rules_(std::move(rules)), stuck_(std::move(stuck)) {
  for (const auto& s : sample_corpus()) {
    std::vector<std::string> hits;
    for (const auto& r : rules_)
      if (match(r.pattern, Matchable::of(s))) hits.push_back(r.name);
    if (hits.size() > 1) {
      std::string msg = "calculus " + name_ + " is not deterministic: rules";
      for (const auto& h : hits) msg += " " + h;
      throw RuleConflict(msg + " overlap on " + modality_text(s));
    }
  }
}

const Rule* RuleSet::find(const SymbolicState& s, Bindings& out) const {
  for (const auto& r : rules_) {
    if (auto b = match(r.pattern, Matchable::of(s))) {
      out = std::move(*b);
      return &r;
    }
  }
  return nullptr;
}

std::vector<SymbolicState> RuleSet::sample_corpus() {
  namespace st = session_type;
  auto stmt = [](StmtKind k, Target::Kind t = Target::Kind::None) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    s->target.kind = t;
    s->target.name = "x";
    s->expr = make_bool(true);
    s->method = "m";
    return s;
  };
  std::vector<Prog> progs = {nullptr};
  for (auto k : {StmtKind::Skip, StmtKind::VarDecl, StmtKind::AsyncCall, StmtKind::Get, StmtKind::SyncCall,
                 StmtKind::Await, StmtKind::If, StmtKind::While, StmtKind::Return, StmtKind::New, StmtKind::ExprStmt})
    progs.push_back(cons(stmt(k), nullptr));
  progs.push_back(cons(stmt(StmtKind::Assign, Target::Kind::Local), nullptr));
  progs.push_back(cons(stmt(StmtKind::Assign, Target::Kind::Field), nullptr));

  auto call = st::call("r", "m");
  std::vector<BehavioralSpec> specs = {
      BehavioralSpec::post_spec(logic::true_()),
      BehavioralSpec::session_spec(st::seq(call, st::put())),
      BehavioralSpec::session_spec(st::seq(st::susp(nullptr), st::put())),
      BehavioralSpec::session_spec(st::seq(st::get(make_bool(true)), st::put())),
      BehavioralSpec::session_spec(st::put()),
      BehavioralSpec::session_spec(st::seq(st::alt(call, st::call("r", "n")), st::put())),
      BehavioralSpec::session_spec(st::seq(st::star(call), st::put())),
      BehavioralSpec::session_spec(st::end()),
  };
  std::vector<SymbolicState> out;
  for (const auto& p : progs) {
    for (const auto& sp : specs) {
      SymbolicState s;
      s.prog = p;
      s.spec = sp;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace bsev
