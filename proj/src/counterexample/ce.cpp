#include "bsev/counterexample/ce.hpp"

#include <map>
#include <sstream>

#include "bsev/engine/translate.hpp"
#include "bsev/frontend/printer.hpp"
#include "bsev/logic/update.hpp"

namespace bsev {

using logic::EvalEnv;
using logic::TermPtr;
using logic::Value;

namespace {

Type frame_type(const Type& t) {
  if (t.kind() == Type::Kind::Interface || t.kind() == Type::Kind::Fut || t.kind() == Type::Kind::Null)
    return Type::string();
  return t;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string placeholder(const Program& p, const Type& t) {
  std::string v;
  switch (t.kind()) {
    case Type::Kind::Int: v = "0"; break;
    case Type::Kind::Bool: v = "False"; break;
    case Type::Kind::Data: {
      const DataDecl* d = p.find_data(t.name());
      const CtorDecl& c = d->ctors.front();
      v = c.name;
      if (!c.args.empty()) {
        v += "(";
        for (std::size_t i = 0; i < c.args.size(); ++i) v += (i ? ", " : "") + placeholder(p, c.args[i]);
        v += ")";
      }
      return v;
    }
    case Type::Kind::String: v = "\"\""; break;
    default: v = "null"; break;
  }
  return v;
}

// Statement -> enclosing (if, then-side) frames, outermost first. Loop
// bodies start a fresh chain since they are replayed unwrapped.
using Frames = std::vector<std::pair<const Stmt*, bool>>;

void index_block(const Block& b, const Frames& outer, std::map<const Stmt*, Frames>& out) {
  for (const auto& s : b) {
    out[s.get()] = outer;
    if (s->kind == StmtKind::If) {
      Frames t = outer, e = outer;
      t.push_back({s.get(), true});
      e.push_back({s.get(), false});
      index_block(s->then_body, t, out);
      index_block(s->else_body, e, out);
    }
    if (s->kind == StmtKind::While) index_block(s->else_body, {}, out);
  }
}

class Writer {
 public:
  Writer(const Program& p, const ProofObligation& po, const EvalEnv* model) : p_(p), po_(po), model_(model) {
    if (po.method) index_block(po.method->body, {}, frames_);
  }

  std::string value(const TermPtr& t, const Type& type) {
    if (model_ && t) {
      try {
        return render_value(p_, logic::evaluate(t, *model_), type);
      } catch (const logic::EvalError&) {
      }
    }
    // A future nobody constrains is still the literal created by its call.
    if (t && t->op == logic::Op::FutLit) return quote(t->name);
    return "/* unconstrained */ " + placeholder(p_, frame_type(type));
  }

  std::optional<Value> eval(const TermPtr& t) {
    if (!model_ || !t) return std::nullopt;
    try {
      return logic::evaluate(t, *model_);
    } catch (const logic::EvalError&) {
      return std::nullopt;
    }
  }

  void line(const std::string& s) { body_.push_back(std::string(2 * (2 + open_.size()), ' ') + s); }

  // Closes frames that do not enclose `s`; unknown statements are top level.
  void align(const Stmt* s) {
    Frames want;
    if (s) {
      auto it = frames_.find(s);
      if (it != frames_.end()) want = it->second;
    }
    std::size_t keep = 0;
    while (keep < open_.size() && keep < want.size() && open_[keep] == want[keep]) ++keep;
    while (open_.size() > keep) {
      bool then = open_.back().second;
      open_.pop_back();
      line(then ? "} else {}" : "}");
    }
  }

  void assigns(const CeHint& h, std::string first_comment, bool only_known) {
    bool first = true;
    for (const auto& a : h.assigns) {
      std::optional<Value> v = eval(a.value);
      if (only_known && !v) continue;
      std::string lhs = a.declares ? frame_type(a.type).str() + " " + a.lhs : a.lhs;
      std::string text = lhs + " = " + value(a.value, a.type) + ";";
      if (first && !first_comment.empty()) text += "  // " + first_comment;
      first = false;
      line(text);
    }
    if (first && !first_comment.empty()) line("// " + first_comment);
  }

  void keep(const Stmt& s) {
    if (s.target.kind == Target::Kind::Local && s.target.name == "result" && po_.kind == ProofObligation::Kind::Function) {
      std::optional<Value> v = eval(Translator(p_, nullptr).expr(s.expr));
      line("println(toString(" + to_source(s.expr) + "));  // Function body, evaluates to: " +
           (v ? render_value(p_, *v, po_.function->return_type) : std::string("unknown")));
      return;
    }
    Stmt copy = s;
    if (copy.target.declares) copy.target.decl_type = frame_type(copy.target.decl_type);
    line(statement_head(copy));
  }

  void hint(const CeHint& h) {
    switch (h.kind) {
      case CeHint::Kind::None: return;
      case CeHint::Kind::Keep:
        align(h.stmt);
        keep(*h.stmt);
        return;
      case CeHint::Kind::Branch:
        align(h.stmt);
        line(h.then_branch ? statement_head(*h.stmt) + " {" : statement_head(*h.stmt) + " {} else {");
        open_.push_back({h.stmt, h.then_branch});
        return;
      case CeHint::Kind::External: {
        align(h.stmt);
        std::string orig = statement_head(*h.stmt);
        if (h.note.empty()) {
          assigns(h, orig, false);
        } else {
          line("// " + orig + " " + h.note);
          assigns(h, "", true);
        }
        return;
      }
      case CeHint::Kind::Loop: {
        align(h.stmt);
        if (h.inside) line("// Inside " + statement_head(*h.stmt) + ", at the start of an arbitrary iteration:");
        else line("// " + statement_head(*h.stmt) + " { ... } skipped, state after the loop:");
        assigns(h, "", true);
        return;
      }
      case CeHint::Kind::Leaf: return;
    }
  }

  void leaf(const SENode& n, const std::vector<std::string>& residual) {
    const CeHint& h = n.hint;
    if (n.kind == SENode::Kind::Stuck) {
      align(nullptr);
      line("// " + n.label);
      return;
    }
    const Stmt* at = h.stmt;
    bool is_return = at && at->kind == StmtKind::Return;
    align(is_return ? nullptr : at);
    if (is_return && at->expr) {
      std::optional<Value> v = eval(h.returned);
      line("println(toString(" + to_source(at->expr) + "));  // Return stmt, evaluates to: " +
           (v ? render_value(p_, *v, at->expr->type) : std::string("unknown")));
    } else if (at && !is_return) {
      line("// Failed " + n.label + " at: " + statement_head(*at));
    }
    if (!h.failed_post.empty()) line("// Failed postcondition: " + h.failed_post);
    else line("// Failed " + n.label + ": " + display_obligation(n.sequent.goal, n.sequent.gamma));
    if (!residual.empty()) {
      line("// Failed to show the following sub-obligations:");
      for (const auto& r : residual) line("// " + r);
    }
  }

  std::vector<std::string> body_;

 private:
  const Program& p_;
  const ProofObligation& po_;
  const EvalEnv* model_;
  std::map<const Stmt*, Frames> frames_;
  Frames open_;
};

// Interfaces, datatypes, and functions of `p`; classes are dropped.
std::string declarations(const Program& p) {
  Program d;
  d.interfaces = p.interfaces;
  d.datatypes = p.datatypes;
  d.functions = p.functions;
  return to_source(d);
}

}  // namespace

std::string render_value(const Program& p, const Value& v, const Type& t) {
  using K = logic::Sort::Kind;
  switch (v.sort.kind) {
    case K::Int: return std::to_string(v.i);
    case K::Bool: return v.i ? "True" : "False";
    case K::Ref:
    case K::Fut: return v.i == 0 ? "null" : quote(v.str());
    case K::String: return quote(v.s);
    case K::Data: {
      if (v.args.empty()) return v.s;
      auto c = p.find_ctor(v.s);
      std::string out = v.s + "(";
      for (std::size_t i = 0; i < v.args.size(); ++i)
        out += (i ? ", " : "") + render_value(p, v.args[i], c ? c->second->args[i] : Type::unknown());
      return out + ")";
    }
    case K::Heap: break;
  }
  (void)t;
  return v.str();
}

std::string display_obligation(const TermPtr& t, const std::vector<TermPtr>& gamma) {
  auto same_heaps = logic::eq(logic::heap_var("oldHeap"), logic::heap_var("heap"));
  for (const auto& g : gamma)
    if (logic::equal(g, same_heaps)) {
      logic::Update u;
      u.set(logic::heap_var("oldHeap"), logic::heap_var("heap"));
      return logic::to_string(logic::apply_update(u, t));
    }
  return logic::to_string(t);
}

Counterexample generate_ce(const Program& p, const ProofObligation& po, const SENode& leaf, const EvalEnv* model,
                           const CeOptions& opt) {
  Writer w(p, po, model);

  // Prestate: parameters as locals, fields of the class as frame fields.
  std::vector<std::string> fields;
  if (po.cls) {
    const Value* heap = nullptr;
    if (model) {
      auto it = model->heaps.find("heap");
      if (it != model->heaps.end()) heap = &it->second;
    }
    for (const auto& f : po.cls->all_fields()) {
      std::string v = "/* unconstrained */ " + placeholder(p, frame_type(f.type));
      if (heap) {
        auto hv = heap->heap->find(f.name);
        if (hv != heap->heap->end()) v = render_value(p, hv->second, f.type);
      }
      fields.push_back(frame_type(f.type).str() + " " + f.name + " = " + v + ";");
    }
  }
  const std::vector<Param>* params = po.method ? &po.method->sig.params : po.function ? &po.function->params : nullptr;
  if (params)
    for (const auto& prm : *params)
      w.line(frame_type(prm.type).str() + " " + prm.name + " = " +
             w.value(param_var(prm), prm.type) + ";  // parameter");

  std::vector<const SENode*> path;
  for (const SENode* n = &leaf; n; n = n->parent) path.push_back(n);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    if (*it == &leaf) break;
    const SENode* child = *(it + 1);
    if (child != &leaf || child->hint.kind != CeHint::Kind::Leaf) w.hint(child->hint);
  }
  w.leaf(leaf, opt.residual);
  w.align(nullptr);

  std::string snippet = po.method ? po.method->sig.name : po.function ? po.function->name : "initialization";
  std::ostringstream out;
  std::string decls = declarations(p);
  if (!decls.empty()) out << decls;
  out << "class CeFrame {\n";
  for (const auto& f : fields) out << "  " << f << "\n";
  if (!fields.empty()) out << "\n";
  out << "  Unit ce() {  // Snippet from: " << snippet << "\n";
  for (const auto& l : w.body_) out << l << "\n";
  out << "  }\n}\n";

  Counterexample ce;
  ce.text = out.str();
  ce.file_stem = po.cls ? po.cls->name + "_" + (po.method ? po.method->sig.name : std::string("init")) : snippet;
  return ce;
}

}  // namespace bsev
