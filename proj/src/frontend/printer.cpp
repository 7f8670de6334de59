#include "bsev/frontend/printer.hpp"

#include <sstream>

#include "bsev/frontend/session_type.hpp"

namespace bsev {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      switch (e.binop) {
        case BinOp::Implies: return 1;
        case BinOp::Or: return 2;
        case BinOp::And: return 3;
        case BinOp::Eq:
        case BinOp::Ne: return 4;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 7;
      }
      return 0;
    case ExprKind::Unary: return 8;
    case ExprKind::IntLit: return e.int_value < 0 ? 8 : 9;
    case ExprKind::If:
    case ExprKind::Case: return 0;
    default: return 9;
  }
}

std::string wrap(const ExprPtr& e, int min_prec) {
  std::string s = to_source(e);
  return precedence(*e) < min_prec ? "(" + s + ")" : s;
}

std::string join_args(const std::vector<ExprPtr>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += to_source(args[i]);
  }
  return s;
}

std::string pad(int indent) { return std::string(static_cast<std::size_t>(indent) * 2, ' '); }

std::string nullability_prefix(Nullability n) { return n == Nullability::NonNull ? "[NonNull] " : ""; }

std::string target_prefix(const Target& t) {
  switch (t.kind) {
    case Target::Kind::None: return "";
    case Target::Kind::Local:
      return t.declares ? nullability_prefix(t.nullability) + t.decl_type.str() + " " + t.name + " = "
                        : t.name + " = ";
    case Target::Kind::Field: return "this." + t.name + " = ";
  }
  return "";
}

std::string spec_anno(const char* kind, const ExprPtr& e) {
  return e ? std::string("[Spec:") + kind + "(" + to_source(e) + ")]" : "";
}

std::string params_src(const std::vector<Param>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) s += ", ";
    s += nullability_prefix(ps[i].nullability) + ps[i].type.str() + " " + ps[i].name;
  }
  return s;
}

std::string names_list(const std::vector<std::string>& ns) {
  std::string s;
  for (std::size_t i = 0; i < ns.size(); ++i) s += (i ? ", " : "") + ns[i];
  return s;
}

}  // namespace

std::string to_source(const ExprPtr& e) {
  if (!e) return "";
  switch (e->kind) {
    case ExprKind::IntLit: return std::to_string(e->int_value);
    case ExprKind::BoolLit: return e->bool_value ? "True" : "False";
    case ExprKind::NullLit: return "null";
    case ExprKind::StringLit: {
      std::string s = "\"";
      for (char c : e->text) {
        if (c == '"' || c == '\\') s += '\\';
        if (c == '\n') {
          s += "\\n";
          continue;
        }
        s += c;
      }
      return s + "\"";
    }
    case ExprKind::Name: return e->text;
    case ExprKind::Field: return "this." + e->text;
    case ExprKind::Result: return "result";
    case ExprKind::Unary: return std::string(to_string(e->unop)) + wrap(e->args[0], 8);
    case ExprKind::Binary: {
      int p = precedence(*e);
      bool right_assoc = e->binop == BinOp::Implies;
      return wrap(e->args[0], right_assoc ? p + 1 : p) + " " + to_string(e->binop) + " " +
             wrap(e->args[1], right_assoc ? p : p + 1);
    }
    case ExprKind::Call: return e->text + "(" + join_args(e->args) + ")";
    case ExprKind::If:
      return "if " + to_source(e->args[0]) + " then " + to_source(e->args[1]) + " else " + to_source(e->args[2]);
    case ExprKind::Case: {
      std::string s = "case " + to_source(e->args[0]) + " { ";
      for (const auto& b : e->branches) {
        s += b.ctor;
        if (!b.binders.empty()) s += "(" + names_list(b.binders) + ")";
        s += " => " + to_source(b.body) + "; ";
      }
      return s + "}";
    }
    case ExprKind::Old: return "old(" + to_source(e->args[0]) + ")";
    case ExprKind::Last: return "last(" + to_source(e->args[0]) + ")";
  }
  return "?";
}

std::string statement_head(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::Skip: return "skip;";
    case StmtKind::VarDecl:
      if (!s.expr)
        return nullability_prefix(s.target.nullability) + s.target.decl_type.str() + " " + s.target.name + ";";
      return target_prefix(s.target) + to_source(s.expr) + ";";
    case StmtKind::Assign: return target_prefix(s.target) + to_source(s.expr) + ";";
    case StmtKind::AsyncCall:
      return target_prefix(s.target) + wrap(s.expr, 9) + "!" + s.method + "(" + join_args(s.args) + ");";
    case StmtKind::Get: return target_prefix(s.target) + wrap(s.expr, 9) + ".get;";
    case StmtKind::SyncCall: return target_prefix(s.target) + "this." + s.method + "(" + join_args(s.args) + ");";
    case StmtKind::Await: return "await " + to_source(s.expr) + (s.future_guard ? "?;" : ";");
    case StmtKind::If: return "if (" + to_source(s.expr) + ")";
    case StmtKind::While: return "while (" + to_source(s.expr) + ")";
    case StmtKind::Return: return s.expr ? "return " + to_source(s.expr) + ";" : "return;";
    case StmtKind::New: return target_prefix(s.target) + "new " + s.class_name + "(" + join_args(s.args) + ");";
    case StmtKind::ExprStmt: return to_source(s.expr) + ";";
  }
  return "?";
}

std::string to_source(const Block& b, int indent) {
  std::string out;
  for (const auto& s : b) out += to_source(*s, indent);
  return out;
}

std::string to_source(const Stmt& s, int indent) {
  std::string out = pad(indent);
  if (s.kind == StmtKind::If) {
    out += statement_head(s) + " {\n" + to_source(s.then_body, indent + 1) + pad(indent) + "}";
    if (!s.else_body.empty()) out += " else {\n" + to_source(s.else_body, indent + 1) + pad(indent) + "}";
    return out + "\n";
  }
  if (s.kind == StmtKind::While) {
    if (s.invariant) out += spec_anno("WhileInv", s.invariant) + "\n" + pad(indent);
    return out + statement_head(s) + " {\n" + to_source(s.else_body, indent + 1) + pad(indent) + "}\n";
  }
  return out + statement_head(s) + "\n";
}

std::string to_source(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.datatypes) {
    os << "data " << d.name << " = ";
    for (std::size_t i = 0; i < d.ctors.size(); ++i) {
      if (i) os << " | ";
      os << d.ctors[i].name;
      if (!d.ctors[i].args.empty()) {
        os << "(";
        for (std::size_t k = 0; k < d.ctors[i].args.size(); ++k) os << (k ? ", " : "") << d.ctors[i].args[k].str();
        os << ")";
      }
    }
    os << ";\n\n";
  }
  for (const auto& i : p.interfaces) {
    os << "interface " << i.name << " {\n";
    for (const auto& m : i.methods) {
      std::string annos = spec_anno("Requires", m.pre) + spec_anno("Ensures", m.post);
      if (!annos.empty()) os << "  " << annos << "\n";
      os << "  " << m.return_type.str() << " " << m.name << "(" << params_src(m.params) << ");\n";
    }
    os << "}\n\n";
  }
  for (const auto& f : p.functions) {
    std::string annos = spec_anno("Requires", f.pre) + spec_anno("Ensures", f.post);
    if (!annos.empty()) os << annos << "\n";
    os << "def " << f.return_type.str() << " " << f.name << "(" << params_src(f.params) << ") = "
       << to_source(f.body) << ";\n\n";
  }
  for (const auto& c : p.classes) {
    std::string annos = spec_anno("Requires", c.creation_cond) + spec_anno("ObjInv", c.obj_invariant);
    for (const auto& [r, f] : c.roles) annos += "[Spec:Role(\"" + r + "\", this." + f + ")]";
    if (!annos.empty()) os << annos << "\n";
    os << "class " << c.name;
    if (!c.params.empty()) os << "(" << params_src(c.params) << ")";
    if (!c.implements.empty()) os << " implements " << c.implements;
    os << " {\n";
    for (const auto& f : c.fields) {
      os << "  " << nullability_prefix(f.nullability) << f.type.str() << " " << f.name;
      if (f.init) os << " = " << to_source(f.init);
      os << ";\n";
    }
    for (const auto& m : c.methods) {
      std::string ma = spec_anno("Requires", m.sig.pre) + spec_anno("Ensures", m.sig.post);
      if (!m.succeeds.empty()) ma += "[Spec:Succeeds(" + names_list(m.succeeds) + ")]";
      if (!m.overlaps.empty()) ma += "[Spec:Overlaps(" + names_list(m.overlaps) + ")]";
      if (m.local_type) ma += "[Spec:Local(\"" + session_type::to_string(m.local_type) + "\")]";
      if (!ma.empty()) os << "  " << ma << "\n";
      os << "  " << m.sig.return_type.str() << " " << m.sig.name << "(" << params_src(m.sig.params) << ") {\n"
         << to_source(m.body, 2) << "  }\n";
    }
    os << "}\n\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Typed dump

namespace {

std::string typed(const ExprPtr& e);

std::string typed_args(const std::vector<ExprPtr>& args) {
  std::string s;
  for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + typed(args[i]);
  return s;
}

std::string typed(const ExprPtr& e) {
  if (!e) return "-";
  std::string body;
  switch (e->kind) {
    case ExprKind::Unary: body = std::string("(") + to_string(e->unop) + typed(e->args[0]) + ")"; break;
    case ExprKind::Binary:
      body = "(" + typed(e->args[0]) + " " + to_string(e->binop) + " " + typed(e->args[1]) + ")";
      break;
    case ExprKind::Call: body = e->text + "(" + typed_args(e->args) + ")"; break;
    case ExprKind::If:
      body = "(if " + typed(e->args[0]) + " then " + typed(e->args[1]) + " else " + typed(e->args[2]) + ")";
      break;
    case ExprKind::Case: {
      body = "(case " + typed(e->args[0]) + " {";
      for (const auto& b : e->branches) {
        body += " " + b.ctor;
        if (!b.binders.empty()) body += "(" + names_list(b.binders) + ")";
        body += " => " + typed(b.body) + ";";
      }
      body += " })";
      break;
    }
    case ExprKind::Old: body = "old(" + typed(e->args[0]) + ")"; break;
    case ExprKind::Last: body = "last(" + typed(e->args[0]) + ")"; break;
    case ExprKind::Name:
      body = (e->ref == NameRef::Field ? "this." : "") + e->text;
      break;
    default: body = to_source(e);
  }
  return body + ":" + e->type.str();
}

void dump_block(std::ostringstream& os, const Block& b, int indent) {
  for (const auto& s : b) {
    os << pad(indent);
    switch (s->kind) {
      case StmtKind::If:
        os << "if " << typed(s->expr) << "\n";
        dump_block(os, s->then_body, indent + 1);
        os << pad(indent) << "else\n";
        dump_block(os, s->else_body, indent + 1);
        continue;
      case StmtKind::While:
        os << "while " << typed(s->expr) << " inv " << typed(s->invariant) << "\n";
        dump_block(os, s->else_body, indent + 1);
        continue;
      default: break;
    }
    static const char* names[] = {"skip", "decl", "assign", "async", "get", "sync",
                                  "await", "if", "while", "return", "new", "expr"};
    os << names[static_cast<int>(s->kind)];
    if (s->target.kind != Target::Kind::None)
      os << " " << (s->target.kind == Target::Kind::Field ? "this." : "") << s->target.name
         << (s->target.declares ? ":" + s->target.decl_type.str() : "");
    if (s->expr) os << " " << typed(s->expr);
    if (!s->method.empty()) os << " !" << s->method;
    if (!s->class_name.empty()) os << " " << s->class_name;
    if (!s->args.empty()) os << " (" << typed_args(s->args) << ")";
    if (s->future_guard) os << " ?";
    os << "\n";
  }
}

void dump_sig(std::ostringstream& os, const MethodSig& m, int indent) {
  os << pad(indent) << "method " << m.name << "(" << params_src(m.params) << ") : " << m.return_type.str() << "\n";
  os << pad(indent + 1) << "requires " << typed(m.pre) << "\n";
  os << pad(indent + 1) << "ensures " << typed(m.post) << "\n";
}

}  // namespace

std::string dump_typed(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.datatypes) {
    os << "data " << d.name;
    for (const auto& c : d.ctors) os << " " << c.name << "/" << c.args.size();
    os << "\n";
  }
  for (const auto& i : p.interfaces) {
    os << "interface " << i.name << "\n";
    for (const auto& m : i.methods) dump_sig(os, m, 1);
  }
  for (const auto& f : p.functions) {
    os << "function " << f.name << "(" << params_src(f.params) << ") : " << f.return_type.str() << "\n";
    os << "  requires " << typed(f.pre) << "\n  ensures " << typed(f.post) << "\n  body " << typed(f.body) << "\n";
  }
  for (const auto& c : p.classes) {
    os << "class " << c.name << (c.implements.empty() ? "" : " implements " + c.implements) << "\n";
    os << "  creation " << typed(c.creation_cond) << "\n  invariant " << typed(c.obj_invariant) << "\n";
    for (const auto& f : c.all_fields())
      os << "  field " << f.name << " : " << f.type.str()
         << (f.nullability == Nullability::NonNull ? " nonnull" : "") << " init " << typed(f.init) << "\n";
    for (const auto& [r, f] : c.roles) os << "  role " << r << " -> " << f << "\n";
    for (const auto& m : c.methods) {
      dump_sig(os, m.sig, 1);
      if (!m.succeeds.empty()) os << "    succeeds " << names_list(m.succeeds) << "\n";
      if (!m.overlaps.empty()) os << "    overlaps " << names_list(m.overlaps) << "\n";
      if (m.local_type) os << "    local " << session_type::structure(m.local_type) << "\n";
      dump_block(os, m.body, 2);
    }
  }
  return os.str();
}

}  // namespace bsev
