#include "bsev/frontend/parser.hpp"

#include <set>

#include "bsev/frontend/session_type.hpp"

namespace bsev {

namespace {

struct Annotation {
  std::string kind;  // Requires, Ensures, ObjInv, WhileInv, Succeeds, Overlaps, Local, Role, NonNull, Nullable
  ExprPtr expr;
  std::vector<std::string> names;
  std::string text;
  std::string field;
  SourceLoc loc;
};

const std::set<std::string> kBuiltinTypes = {"Int", "Bool", "Unit", "String", "Fut"};
const std::set<std::string> kKeywords = {"class", "interface", "def", "data", "if", "then", "else",
                                         "while", "return", "await", "skip", "new", "this", "case",
                                         "True", "False", "null", "old", "last", "implements", "get"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    while (!at(Tok::End)) {
      auto annos = annotations();
      if (is_kw("class")) {
        p.classes.push_back(class_decl(annos));
      } else if (is_kw("interface")) {
        p.interfaces.push_back(interface_decl(annos));
      } else if (is_kw("def")) {
        p.functions.push_back(fun_decl(annos));
      } else if (is_kw("data")) {
        p.datatypes.push_back(data_decl());
      } else {
        fail({"class", "interface", "def", "data"});
      }
    }
    return p;
  }

  ExprPtr expression_only() {
    auto e = expr();
    expect(Tok::End);
    return e;
  }

  SessionTypePtr session_only() {
    if (at(Tok::End)) fail({"session type"});
    auto t = st_alt();
    expect(Tok::End);
    return t;
  }

 private:
  // -- token helpers --------------------------------------------------------
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok t, std::size_t k = 0) const { return peek(k).kind == t; }
  bool is_kw(const char* kw, std::size_t k = 0) const {
    return at(Tok::Ident, k) && peek(k).text == kw;
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    take();
    return true;
  }
  bool accept_kw(const char* kw) {
    if (!is_kw(kw)) return false;
    take();
    return true;
  }
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const auto& t = peek();
    throw ParseError(t.loc, std::move(expected), t.kind == Tok::End ? "end of input" : t.text);
  }
  Token expect(Tok t) {
    if (!at(t)) fail({to_string(t)});
    return take();
  }
  void expect_kw(const char* kw) {
    if (!is_kw(kw)) fail({kw});
    take();
  }
  std::string ident() {
    if (!at(Tok::Ident) || kKeywords.count(peek().text)) fail({"identifier"});
    return take().text;
  }

  // -- annotations ----------------------------------------------------------
  std::vector<Annotation> annotations() {
    std::vector<Annotation> out;
    while (at(Tok::LBracket)) {
      Annotation a;
      a.loc = take().loc;
      if (is_kw("NonNull") || is_kw("Nullable")) {
        a.kind = take().text;
        expect(Tok::RBracket);
        out.push_back(std::move(a));
        continue;
      }
      expect_kw("Spec");
      expect(Tok::Colon);
      if (!at(Tok::Ident)) fail({"Requires", "Ensures", "ObjInv", "WhileInv", "Succeeds", "Overlaps", "Local", "Role"});
      a.kind = take().text;
      expect(Tok::LParen);
      if (a.kind == "Requires" || a.kind == "Ensures" || a.kind == "ObjInv" || a.kind == "WhileInv") {
        a.expr = expr();
      } else if (a.kind == "Succeeds" || a.kind == "Overlaps") {
        if (!at(Tok::RParen)) {
          a.names.push_back(ident());
          while (accept(Tok::Comma)) a.names.push_back(ident());
        }
      } else if (a.kind == "Local") {
        auto s = expect(Tok::String);
        a.text = s.text;
      } else if (a.kind == "Role") {
        a.text = expect(Tok::String).text;
        expect(Tok::Comma);
        expect_kw("this");
        expect(Tok::Dot);
        a.field = ident();
      } else {
        throw ParseError(a.loc, {"Requires", "Ensures", "ObjInv", "WhileInv", "Succeeds", "Overlaps", "Local", "Role"}, a.kind);
      }
      expect(Tok::RParen);
      expect(Tok::RBracket);
      out.push_back(std::move(a));
    }
    return out;
  }

  static Nullability nullability_of(const std::vector<Annotation>& annos) {
    for (const auto& a : annos)
      if (a.kind == "NonNull") return Nullability::NonNull;
    return Nullability::Nullable;
  }

  [[noreturn]] static void misplaced(const Annotation& a, const char* where) {
    throw ParseError(a.loc, {std::string("annotation allowed on ") + where}, a.kind);
  }

  // -- types and declarations ----------------------------------------------
  Type type() {
    if (!at(Tok::Ident)) fail({"type"});
    std::string n = take().text;
    if (n == "Int") return Type::int_();
    if (n == "Bool") return Type::bool_();
    if (n == "Unit") return Type::unit();
    if (n == "String") return Type::string();
    if (n == "Fut") {
      expect(Tok::Lt);
      Type inner = type();
      expect(Tok::Gt);
      return Type::fut(inner);
    }
    if (kKeywords.count(n)) throw ParseError(peek().loc, {"type"}, n);
    return Type::named(n);
  }

  bool starts_decl() const {
    if (!at(Tok::Ident)) return false;
    if (kBuiltinTypes.count(peek().text)) return true;
    return !kKeywords.count(peek().text) && at(Tok::Ident, 1) && !kKeywords.count(peek(1).text);
  }

  std::vector<Param> params() {
    std::vector<Param> out;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      do {
        auto annos = annotations();
        Param p;
        p.loc = peek().loc;
        p.type = type();
        p.name = ident();
        p.nullability = nullability_of(annos);
        out.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen);
    return out;
  }

  MethodSig signature(const std::vector<Annotation>& annos) {
    MethodSig s;
    s.loc = peek().loc;
    s.return_type = type();
    s.name = ident();
    s.params = params();
    for (const auto& a : annos) {
      if (a.kind == "Requires") s.pre = a.expr;
      else if (a.kind == "Ensures") s.post = a.expr;
    }
    return s;
  }

  InterfaceDecl interface_decl(const std::vector<Annotation>& annos) {
    if (!annos.empty()) misplaced(annos.front(), "interface methods, not interfaces");
    InterfaceDecl d;
    d.loc = peek().loc;
    expect_kw("interface");
    d.name = ident();
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      auto ma = annotations();
      for (const auto& a : ma)
        if (a.kind != "Requires" && a.kind != "Ensures") misplaced(a, "interface methods only as Requires/Ensures");
      d.methods.push_back(signature(ma));
      expect(Tok::Semi);
    }
    expect(Tok::RBrace);
    return d;
  }

  FunDecl fun_decl(const std::vector<Annotation>& annos) {
    FunDecl f;
    f.loc = peek().loc;
    expect_kw("def");
    f.return_type = type();
    f.name = ident();
    f.params = params();
    expect(Tok::Assign);
    f.body = expr();
    expect(Tok::Semi);
    for (const auto& a : annos) {
      if (a.kind == "Requires") f.pre = a.expr;
      else if (a.kind == "Ensures") f.post = a.expr;
      else misplaced(a, "functions only as Requires/Ensures");
    }
    return f;
  }

  DataDecl data_decl() {
    DataDecl d;
    d.loc = peek().loc;
    expect_kw("data");
    d.name = ident();
    expect(Tok::Assign);
    do {
      CtorDecl c;
      c.name = ident();
      if (accept(Tok::LParen)) {
        if (!at(Tok::RParen)) {
          c.args.push_back(type());
          while (accept(Tok::Comma)) c.args.push_back(type());
        }
        expect(Tok::RParen);
      }
      d.ctors.push_back(std::move(c));
    } while (accept(Tok::Pipe));
    expect(Tok::Semi);
    return d;
  }

  ClassDecl class_decl(const std::vector<Annotation>& annos) {
    ClassDecl c;
    c.loc = peek().loc;
    expect_kw("class");
    c.name = ident();
    if (at(Tok::LParen)) c.params = params();
    if (accept_kw("implements")) c.implements = ident();
    for (const auto& a : annos) {
      if (a.kind == "Requires") c.creation_cond = a.expr;
      else if (a.kind == "ObjInv") c.obj_invariant = a.expr;
      else if (a.kind == "Role") c.roles.emplace_back(a.text, a.field);
      else misplaced(a, "classes only as Requires/ObjInv/Role");
    }
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail({"}"});
      auto ma = annotations();
      // Method if `Type name (`; otherwise a field. Fut<..> spans several tokens.
      std::size_t save = pos_;
      type();
      bool is_method = at(Tok::Ident) && at(Tok::LParen, 1);
      pos_ = save;
      if (is_method) {
        MethodDecl m;
        m.sig = signature(ma);
        for (const auto& a : ma) {
          if (a.kind == "Succeeds") m.succeeds = a.names;
          else if (a.kind == "Overlaps") m.overlaps = a.names;
          else if (a.kind == "Local") {
            m.local_type_text = a.text;
            try {
              m.local_type = parse_session_type(a.text);
            } catch (const ParseError& e) {
              // Report the position of the annotation itself.
              throw ParseError(a.loc, e.expected(), e.found());
            }
          } else if (a.kind != "Requires" && a.kind != "Ensures") {
            misplaced(a, "methods only as Requires/Ensures/Succeeds/Overlaps/Local");
          }
        }
        m.body = block();
        c.methods.push_back(std::move(m));
      } else {
        FieldDecl f;
        f.loc = peek().loc;
        f.type = type();
        f.name = ident();
        f.nullability = nullability_of(ma);
        for (const auto& a : ma)
          if (a.kind != "NonNull" && a.kind != "Nullable") misplaced(a, "fields only as NonNull/Nullable");
        if (accept(Tok::Assign)) f.init = expr();
        expect(Tok::Semi);
        c.fields.push_back(std::move(f));
      }
    }
    expect(Tok::RBrace);
    return c;
  }

  // -- statements -----------------------------------------------------------
  Block block() {
    Block b;
    expect(Tok::LBrace);
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail({"}"});
      b.push_back(statement());
    }
    expect(Tok::RBrace);
    return b;
  }

  Block body_or_stmt() {
    if (at(Tok::LBrace)) return block();
    return Block{statement()};
  }

  StmtPtr mk(StmtKind k, SourceLoc loc) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    s->loc = loc;
    s->id = next_node_id();
    return s;
  }

  std::vector<ExprPtr> args() {
    std::vector<ExprPtr> out;
    expect(Tok::LParen);
    if (!at(Tok::RParen)) {
      out.push_back(expr());
      while (accept(Tok::Comma)) out.push_back(expr());
    }
    expect(Tok::RParen);
    return out;
  }

  bool at_sync_call() const {
    return is_kw("this") && at(Tok::Dot, 1) && at(Tok::Ident, 2) && at(Tok::LParen, 3);
  }

  // Parses the right-hand side of an assignment or declaration, or a
  // call statement without target; `target` is attached by the caller.
  StmtPtr rhs(SourceLoc loc) {
    if (is_kw("new")) {
      take();
      auto s = mk(StmtKind::New, loc);
      s->class_name = ident();
      s->args = args();
      return s;
    }
    if (at_sync_call()) {
      take();
      take();
      auto s = mk(StmtKind::SyncCall, loc);
      s->method = take().text;
      s->args = args();
      return s;
    }
    auto e = expr();
    if (accept(Tok::Bang)) {
      auto s = mk(StmtKind::AsyncCall, loc);
      s->expr = e;
      s->method = ident();
      s->args = args();
      return s;
    }
    if (at(Tok::Dot) && is_kw("get", 1)) {
      take();
      take();
      auto s = mk(StmtKind::Get, loc);
      s->expr = e;
      return s;
    }
    auto s = mk(StmtKind::Assign, loc);
    s->expr = e;
    return s;
  }

  StmtPtr statement() {
    auto annos = annotations();
    SourceLoc loc = peek().loc;
    ExprPtr while_inv;
    Nullability nullability = nullability_of(annos);
    for (const auto& a : annos) {
      if (a.kind == "WhileInv") while_inv = a.expr;
      else if (a.kind != "NonNull" && a.kind != "Nullable") misplaced(a, "statements only as WhileInv/NonNull/Nullable");
    }
    if (while_inv && !is_kw("while")) fail({"while"});

    if (accept_kw("skip")) {
      expect(Tok::Semi);
      return mk(StmtKind::Skip, loc);
    }
    if (accept_kw("if")) {
      auto s = mk(StmtKind::If, loc);
      expect(Tok::LParen);
      s->expr = expr();
      expect(Tok::RParen);
      s->then_body = body_or_stmt();
      if (accept_kw("else")) s->else_body = body_or_stmt();
      return s;
    }
    if (accept_kw("while")) {
      auto s = mk(StmtKind::While, loc);
      expect(Tok::LParen);
      s->expr = expr();
      expect(Tok::RParen);
      s->else_body = body_or_stmt();
      s->invariant = while_inv;
      return s;
    }
    if (accept_kw("return")) {
      auto s = mk(StmtKind::Return, loc);
      if (!at(Tok::Semi)) s->expr = expr();
      expect(Tok::Semi);
      return s;
    }
    if (accept_kw("await")) {
      auto s = mk(StmtKind::Await, loc);
      s->expr = expr();
      s->future_guard = accept(Tok::Question);
      expect(Tok::Semi);
      return s;
    }
    if (starts_decl()) {
      Target t;
      t.kind = Target::Kind::Local;
      t.declares = true;
      t.decl_type = type();
      t.name = ident();
      t.nullability = nullability;
      StmtPtr s;
      if (accept(Tok::Assign)) {
        s = rhs(loc);
      } else {
        s = mk(StmtKind::VarDecl, loc);
      }
      if (s->kind == StmtKind::Assign) s->kind = StmtKind::VarDecl;
      s->target = std::move(t);
      expect(Tok::Semi);
      return s;
    }
    // Assignment, call without target, or builtin expression statement.
    std::size_t save = pos_;
    if (!at_sync_call()) {
      auto lhs = postfix();
      if (at(Tok::Assign) && (lhs->kind == ExprKind::Name || lhs->kind == ExprKind::Field)) {
        take();
        auto s = rhs(loc);
        s->target.kind = lhs->kind == ExprKind::Name ? Target::Kind::Local : Target::Kind::Field;
        s->target.name = lhs->text;
        expect(Tok::Semi);
        return s;
      }
      pos_ = save;
    }
    auto s = rhs(loc);
    if (s->kind == StmtKind::Assign) {
      if (s->expr->kind != ExprKind::Call) throw ParseError(loc, {"statement"}, "expression");
      s->kind = StmtKind::ExprStmt;
    }
    expect(Tok::Semi);
    return s;
  }

  // -- expressions ----------------------------------------------------------
  ExprPtr mk_expr(ExprKind k, SourceLoc loc) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->loc = loc;
    e->id = next_node_id();
    return e;
  }

  ExprPtr bin(BinOp op, ExprPtr a, ExprPtr b, SourceLoc loc) {
    auto e = mk_expr(ExprKind::Binary, loc);
    e->binop = op;
    e->args = {std::move(a), std::move(b)};
    return e;
  }

 public:
  ExprPtr expr() {
    SourceLoc loc = peek().loc;
    auto lhs = disjunction();
    if (accept(Tok::Arrow)) return bin(BinOp::Implies, lhs, expr(), loc);
    return lhs;
  }

 private:
  ExprPtr disjunction() {
    auto e = conjunction();
    while (at(Tok::OrOr)) {
      auto loc = take().loc;
      e = bin(BinOp::Or, e, conjunction(), loc);
    }
    return e;
  }
  ExprPtr conjunction() {
    auto e = equality();
    while (at(Tok::AndAnd)) {
      auto loc = take().loc;
      e = bin(BinOp::And, e, equality(), loc);
    }
    return e;
  }
  ExprPtr equality() {
    auto e = relational();
    while (at(Tok::EqEq) || at(Tok::Ne)) {
      auto t = take();
      e = bin(t.kind == Tok::EqEq ? BinOp::Eq : BinOp::Ne, e, relational(), t.loc);
    }
    return e;
  }
  ExprPtr relational() {
    auto e = additive();
    while (at(Tok::Lt) || at(Tok::Le) || at(Tok::Gt) || at(Tok::Ge)) {
      auto t = take();
      BinOp op = t.kind == Tok::Lt ? BinOp::Lt : t.kind == Tok::Le ? BinOp::Le : t.kind == Tok::Gt ? BinOp::Gt : BinOp::Ge;
      e = bin(op, e, additive(), t.loc);
    }
    return e;
  }
  ExprPtr additive() {
    auto e = multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      auto t = take();
      e = bin(t.kind == Tok::Plus ? BinOp::Add : BinOp::Sub, e, multiplicative(), t.loc);
    }
    return e;
  }
  ExprPtr multiplicative() {
    auto e = unary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      auto t = take();
      BinOp op = t.kind == Tok::Star ? BinOp::Mul : t.kind == Tok::Slash ? BinOp::Div : BinOp::Mod;
      e = bin(op, e, unary(), t.loc);
    }
    return e;
  }
  ExprPtr unary() {
    if (at(Tok::Bang) || at(Tok::Minus)) {
      auto t = take();
      auto operand = unary();
      if (t.kind == Tok::Minus && operand->kind == ExprKind::IntLit && operand->int_value >= 0 &&
          operand->loc.line == t.loc.line && operand->loc.col == t.loc.col + 1) {
        operand->int_value = -operand->int_value;
        operand->loc = t.loc;
        return operand;
      }
      auto e = mk_expr(ExprKind::Unary, t.loc);
      e->unop = t.kind == Tok::Bang ? UnOp::Not : UnOp::Neg;
      e->args = {operand};
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() { return primary(); }

  ExprPtr primary() {
    SourceLoc loc = peek().loc;
    if (at(Tok::Int)) {
      auto e = mk_expr(ExprKind::IntLit, loc);
      e->int_value = take().value;
      return e;
    }
    if (at(Tok::String)) {
      auto e = mk_expr(ExprKind::StringLit, loc);
      e->text = take().text;
      return e;
    }
    if (accept(Tok::LParen)) {
      auto e = expr();
      expect(Tok::RParen);
      return e;
    }
    if (!at(Tok::Ident)) fail({"expression"});
    const std::string& w = peek().text;
    if (w == "True" || w == "False" || w == "true" || w == "false") {
      auto e = mk_expr(ExprKind::BoolLit, loc);
      std::string t = take().text;
      e->bool_value = t == "True" || t == "true";
      return e;
    }
    if (w == "null") {
      take();
      return mk_expr(ExprKind::NullLit, loc);
    }
    if (w == "result") {
      take();
      return mk_expr(ExprKind::Result, loc);
    }
    if (w == "this") {
      take();
      expect(Tok::Dot);
      auto e = mk_expr(ExprKind::Field, loc);
      e->text = ident();
      return e;
    }
    if (w == "old" || w == "last") {
      bool old = take().text == "old";
      expect(Tok::LParen);
      auto e = mk_expr(old ? ExprKind::Old : ExprKind::Last, loc);
      e->args = {expr()};
      expect(Tok::RParen);
      return e;
    }
    if (w == "if") {
      take();
      auto e = mk_expr(ExprKind::If, loc);
      auto c = expr();
      expect_kw("then");
      auto a = expr();
      expect_kw("else");
      auto b = expr();
      e->args = {c, a, b};
      return e;
    }
    if (w == "case") {
      take();
      auto e = mk_expr(ExprKind::Case, loc);
      e->args = {expr()};
      expect(Tok::LBrace);
      while (!at(Tok::RBrace)) {
        CaseBranch br;
        if (at(Tok::Ident) && peek().text == "_") {
          take();
          br.ctor = "_";
        } else {
          br.ctor = ident();
          if (accept(Tok::LParen)) {
            if (!at(Tok::RParen)) {
              br.binders.push_back(ident());
              while (accept(Tok::Comma)) br.binders.push_back(ident());
            }
            expect(Tok::RParen);
          }
        }
        expect(Tok::FatArrow);
        br.body = expr();
        expect(Tok::Semi);
        e->branches.push_back(std::move(br));
      }
      expect(Tok::RBrace);
      return e;
    }
    std::string name = ident();
    if (at(Tok::LParen)) {
      auto e = mk_expr(ExprKind::Call, loc);
      e->text = name;
      e->args = args();
      return e;
    }
    auto e = mk_expr(ExprKind::Name, loc);
    e->text = name;
    return e;
  }

  // -- session types ----------------------------------------------------------
  SessionTypePtr st_alt() {
    auto t = st_seq();
    while (accept(Tok::Plus)) t = session_type::alt(t, st_seq());
    return t;
  }
  SessionTypePtr st_seq() {
    auto t = st_postfix();
    while (accept(Tok::Dot)) t = session_type::seq(t, st_postfix());
    return t;
  }
  SessionTypePtr st_postfix() {
    auto t = st_primary();
    while (accept(Tok::Star)) t = session_type::star(t);
    return t;
  }
  ExprPtr st_formula() {
    if (!accept(Tok::LParen)) return nullptr;
    auto e = expr();
    expect(Tok::RParen);
    return e;
  }
  SessionTypePtr st_primary() {
    if (accept(Tok::LParen)) {
      auto t = st_alt();
      expect(Tok::RParen);
      return t;
    }
    if (!at(Tok::Ident)) fail({"(", "role", "Susp", "Get", "Put"});
    std::string w = take().text;
    if (w == "Susp") {
      auto f = st_formula();
      return session_type::susp(f);
    }
    if (w == "Get") {
      expect(Tok::LParen);
      auto e = expr();
      expect(Tok::RParen);
      return session_type::get(e);
    }
    if (w == "Put") return session_type::put(st_formula());
    expect(Tok::Bang);
    std::string m = ident();
    return session_type::call(w, m, st_formula());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view source) { return Parser(lex(source)).program(); }

ExprPtr parse_expression(std::string_view source) { return Parser(lex(source)).expression_only(); }

SessionTypePtr parse_session_type(std::string_view source) {
  return Parser(lex(source)).session_only();
}

}  // namespace bsev
