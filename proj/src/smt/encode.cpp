#include "bsev/smt/encode.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bsev/engine/translate.hpp"

namespace bsev::smt {

using namespace logic;

namespace {

const std::set<std::string>& reserved() {
  static const std::set<std::string> r = {
      "and", "or", "not", "xor", "ite", "=>", "=", "distinct", "true", "false", "let", "forall", "exists",
      "select", "store", "const", "as", "par", "_", "!", "div", "mod", "abs", "to_real", "to_int", "is_int",
      "Int", "Bool", "Real", "Array", "String", "Seq", "RegLan", "implies", "iff", "if", "assert", "check-sat",
      "declare-fun", "declare-const", "define-fun", "push", "pop", "model", "lambda", "match", "rem", "power",
      "Ref", "Fut", "bv", "re", "str", "seq", "int", "real", "is", "sat", "unsat", "unknown", "error"};
  return r;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out = "v_" + out;
  if (reserved().count(out)) out += "_";
  return out;
}

std::string sort_name(const Sort& s) {
  switch (s.kind) {
    case Sort::Kind::Int: return "Int";
    case Sort::Kind::Bool: return "Bool";
    case Sort::Kind::Ref: return "Ref";
    case Sort::Kind::Fut: return "Fut";
    case Sort::Kind::String: return "String";
    case Sort::Kind::Data: return sanitize(s.name);
    case Sort::Kind::Heap: break;
  }
  throw SortError("heap sort has no direct SMT counterpart");
}

bool nullable(const Sort& s) {
  return s.kind == Sort::Kind::Ref || s.kind == Sort::Kind::Fut || s.kind == Sort::Kind::String;
}

std::string int_text(long long v) { return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v); }

class Encoder {
 public:
  explicit Encoder(const Program& p) : p_(p) {
    for (const auto& d : p.datatypes)
      for (const auto& c : d.ctors) {
        taken_.insert(c.name);
        for (std::size_t i = 0; i < c.args.size(); ++i) taken_.insert(c.name + "_" + std::to_string(i));
      }
  }

  SmtGoal run(const std::vector<TermPtr>& gamma, const TermPtr& goal, const EncodeOptions& opt) {
    collect_fields(gamma, goal);

    std::vector<std::string> asserts;
    for (const auto& g : gamma) asserts.push_back(enc(g, Sort::bool_()));
    std::string negated = "(not " + enc(goal, Sort::bool_()) + ")";

    // Contracts of every mentioned function, closed under the functions
    // they mention in turn.
    std::vector<std::string> axioms;
    std::set<std::string> done;
    while (true) {
      auto it = std::find_if(fun_order_.begin(), fun_order_.end(), [&](const std::string& f) { return !done.count(f); });
      if (it == fun_order_.end()) break;
      std::string f = *it;
      done.insert(f);
      const FunDecl* fd = p_.find_function(f);
      if (!fd) continue;
      TermPtr ax = function_axiom(p_, *fd);
      if (!ax) continue;
      bool in_gamma = std::any_of(gamma.begin(), gamma.end(), [&](const TermPtr& g) { return equal(g, ax); });
      if (in_gamma) continue;
      collect_fields({ax}, nullptr);
      axioms.push_back(enc(ax, Sort::bool_()));
    }

    std::ostringstream out;
    out << "(set-logic ALL)\n";
    if (opt.produce_model) out << "(set-option :produce-models true)\n";
    header(out);
    for (const auto& a : axioms) out << "(assert " << a << ")\n";
    for (const auto& a : asserts) out << "(assert " << a << ")\n";
    out << "(assert " << negated << ")\n(check-sat)\n";
    if (opt.produce_model) out << "(get-model)\n";

    SmtGoal g;
    g.text = out.str();
    g.symbols = std::move(table_);
    g.heap_sorts.assign(used_sorts_.begin(), used_sorts_.end());
    return g;
  }

 private:
  // ---- names ----------------------------------------------------------

  std::string claim(const std::string& want) {
    std::string n = sanitize(want);
    std::string base = n;
    for (int k = 2; taken_.count(n); ++k) n = base + "_" + std::to_string(k);
    taken_.insert(n);
    return n;
  }

  void use_sort(const Sort& s) {
    if (s.kind == Sort::Kind::Ref) need_ref_ = true;
    if (s.kind == Sort::Kind::Fut) need_fut_ = true;
    if (s.kind == Sort::Kind::Data) use_data(s.name);
  }

  void use_data(const std::string& name) {
    if (data_used_.count(name)) return;
    data_used_.insert(name);
    const DataDecl* d = p_.find_data(name);
    if (!d) throw SortError("unknown datatype " + name);
    for (const auto& c : d->ctors)
      for (const auto& a : c.args) use_sort(sort_of(a));
  }

  // Field symbols come first so that heap selects get short names.
  void collect_fields(const std::vector<TermPtr>& gamma, const TermPtr& goal) {
    auto visit = [&](const TermPtr& t, auto&& self) -> void {
      if (!t) return;
      if (t->op == Op::Field) field_name(*t);
      for (const auto& a : t->args) self(a, self);
      for (const auto& arm : t->arms) self(arm.body, self);
    };
    for (const auto& g : gamma) visit(g, visit);
    visit(goal, visit);
  }

  std::string field_name(const Term& f) {
    auto key = std::make_pair(f.owner, f.name);
    auto it = fields_.find(key);
    if (it != fields_.end()) return it->second;
    bool clash = std::any_of(fields_.begin(), fields_.end(), [&](const auto& e) { return e.first.second == f.name; });
    std::string n = claim(clash || taken_.count(sanitize(f.name)) ? f.owner + "_" + f.name : f.name);
    fields_[key] = n;
    field_order_.push_back({n, f.sort});
    table_.fields[n] = {f.name, f.sort};
    if (!used_sorts_.count(f.sort)) used_sorts_.insert(f.sort);
    use_sort(f.sort);
    return n;
  }

  std::string var_name(const Term& t, const Sort& s) {
    auto it = vars_.find(t.name);
    if (it != vars_.end()) return it->second;
    std::string n = claim(t.name);
    vars_[t.name] = n;
    decls_.push_back({n, sort_name(s)});
    table_.vars[n] = {t.name, s};
    use_sort(s);
    return n;
  }

  std::string null_name(const Sort& s) {
    auto it = nulls_.find(s);
    if (it != nulls_.end()) return it->second;
    std::string n = claim("null_" + sort_name(s));
    nulls_[s] = n;
    table_.nulls[n] = s;
    use_sort(s);
    return n;
  }

  std::string fut_name(const Term& t) {
    auto it = futs_.find(t.name);
    if (it != futs_.end()) return it->second;
    std::string n = claim(t.name);
    futs_[t.name] = n;
    fut_order_.push_back(n);
    table_.fut_lits[n] = t.name;
    need_fut_ = true;
    return n;
  }

  // `anon` is 0 for the heap variable `family`.
  std::string heap_name(const std::string& family, long long anon, const Sort& s) {
    auto key = std::make_pair(family + "#" + std::to_string(anon), s);
    auto it = heaps_.find(key);
    if (it != heaps_.end()) return it->second;
    std::string n = anon ? claim("anon_heap_" + sort_name(s) + "_" + std::to_string(anon)) : claim(family + "_" + sort_name(s));
    heaps_[key] = n;
    heap_order_.push_back({n, s});
    table_.heaps[n] = {anon ? "" : family, anon, s};
    return n;
  }

  std::string undef_name(const Sort& s, long long k) {
    auto key = std::make_pair(s, k);
    auto it = undefs_.find(key);
    if (it != undefs_.end()) return it->second;
    std::string n = claim("undef_" + sort_name(s) + "_" + std::to_string(k));
    undefs_[key] = n;
    decls_.push_back({n, sort_name(s)});
    table_.undefs[n] = key;
    use_sort(s);
    return n;
  }

  std::string fun_name(const Term& t) {
    auto it = funs_.find(t.name);
    if (it != funs_.end()) return it->second;
    std::string n = claim(t.name);
    funs_[t.name] = n;
    fun_order_.push_back(t.name);
    table_.functions[n] = t.name;
    std::vector<Sort> params;
    Sort result = t.sort;
    if (const FunDecl* fd = p_.find_function(t.name)) {
      for (const auto& prm : fd->params) params.push_back(sort_of(prm.type));
      result = sort_of(fd->return_type);
    } else {
      for (const auto& a : t.args) params.push_back(a->sort);
    }
    std::string sig = "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
      use_sort(params[i]);
      sig += (i ? " " : "") + sort_name(params[i]);
    }
    use_sort(result);
    fun_decls_.push_back("(declare-fun " + n + " " + sig + ") " + sort_name(result) + ")");
    fun_params_[t.name] = params;
    return n;
  }

  // ---- terms ----------------------------------------------------------

  // `want` disambiguates null and is ignored otherwise.
  std::string enc(const TermPtr& tp, const Sort& want) {
    const Term& t = *tp;
    switch (t.op) {
      case Op::Var: {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
          if (it->first == t.name) return it->second;
        if (t.sort.kind == Sort::Kind::Heap) throw SortError("heap-sorted variable " + t.name);
        return var_name(t, t.sort);
      }
      case Op::IntLit: return int_text(t.value);
      case Op::BoolLit: return t.value ? "true" : "false";
      case Op::Null: {
        return null_name(nullable(want) ? want : t.sort);
      }
      case Op::FutLit: return fut_name(t);
      case Op::Select: {
        std::string hp = heap(t.args[0], t.sort);
        return "(select " + hp + " " + field_name(*t.args[1]) + ")";
      }
      case Op::Fun: {
        std::string n = fun_name(t);
        if (t.args.empty()) return n;
        const auto& ps = fun_params_.at(t.name);
        std::string out = "(" + n;
        for (std::size_t i = 0; i < t.args.size(); ++i) out += " " + enc(t.args[i], i < ps.size() ? ps[i] : t.args[i]->sort);
        return out + ")";
      }
      case Op::Ctor: {
        use_sort(t.sort);
        if (t.args.empty()) return t.name;
        auto c = p_.find_ctor(t.name);
        std::string out = "(" + t.name;
        for (std::size_t i = 0; i < t.args.size(); ++i)
          out += " " + enc(t.args[i], c && i < c->second->args.size() ? sort_of(c->second->args[i]) : t.args[i]->sort);
        return out + ")";
      }
      case Op::IsCtor: return "((_ is " + t.name + ") " + enc(t.args[0], t.args[0]->sort) + ")";
      case Op::CtorArg:
        return "(" + t.name + "_" + std::to_string(t.value) + " " + enc(t.args[0], t.args[0]->sort) + ")";
      case Op::Ite: {
        Sort s = t.sort.kind == Sort::Kind::Ref && nullable(want) ? want : t.sort;
        return list("ite", {enc(t.args[0], Sort::bool_()), enc(t.args[1], s), enc(t.args[2], s)});
      }
      case Op::Case: return case_term(tp, want);
      case Op::Undef: return undef_name(t.sort, t.value);
      case Op::Not: return "(not " + enc(t.args[0], Sort::bool_()) + ")";
      case Op::And:
      case Op::Or: {
        if (t.args.empty()) return t.op == Op::And ? "true" : "false";
        if (t.args.size() == 1) return enc(t.args[0], Sort::bool_());
        std::string out = t.op == Op::And ? "(and" : "(or";
        for (const auto& a : t.args) out += " " + enc(a, Sort::bool_());
        return out + ")";
      }
      case Op::Implies: return list("=>", {enc(t.args[0], Sort::bool_()), enc(t.args[1], Sort::bool_())});
      case Op::Eq: return equality(t.args[0], t.args[1]);
      case Op::Lt: return binary("<", t);
      case Op::Le: return binary("<=", t);
      case Op::Gt: return binary(">", t);
      case Op::Ge: return binary(">=", t);
      case Op::Add: return binary("+", t);
      case Op::Sub: return binary("-", t);
      case Op::Mul: return binary("*", t);
      case Op::Div: return binary("div", t);
      case Op::Mod: return binary("mod", t);
      case Op::Neg: return "(- " + enc(t.args[0], Sort::int_()) + ")";
      case Op::Forall:
      case Op::Exists: {
        std::size_t mark = bound_.size();
        std::string binders;
        for (const auto& bv : t.bound) {
          use_sort(bv.sort);
          std::string n = "q_" + sanitize(bv.name);
          bound_.emplace_back(bv.name, n);
          binders += (binders.empty() ? "(" : " (") + n + " " + sort_name(bv.sort) + ")";
        }
        std::string body = enc(t.args[0], Sort::bool_());
        bound_.resize(mark);
        return std::string(t.op == Op::Forall ? "(forall (" : "(exists (") + binders + ") " + body + ")";
      }
      case Op::HeapVar:
      case Op::Store:
      case Op::Anon:
      case Op::Field: break;
    }
    throw SortError("term cannot be encoded at this position: " + to_string(tp));
  }

  // Braced initializer lists are evaluated left to right, which keeps
  // fresh-name allocation in reading order.
  static std::string list(const std::string& op, std::initializer_list<std::string> xs) {
    std::string out = "(" + op;
    for (const auto& x : xs) out += " " + x;
    return out + ")";
  }

  std::string binary(const char* op, const Term& t) {
    return list(op, {enc(t.args[0], Sort::int_()), enc(t.args[1], Sort::int_())});
  }

  std::string equality(const TermPtr& a, const TermPtr& b) {
    if (a->sort.kind == Sort::Kind::Heap) {
      std::string out;
      int n = 0;
      for (const auto& s : used_sorts_) {
        out += " " + list("=", {heap(a, s), heap(b, s)});
        ++n;
      }
      if (n == 0) return "true";
      return n == 1 ? out.substr(1) : "(and" + out + ")";
    }
    if (a->op == Op::Null && b->op == Op::Null) return "true";
    Sort s = a->op == Op::Null ? b->sort : a->sort;
    return list("=", {enc(a, s), enc(b, s)});
  }

  // The monomorphic heap of value sort `s` denoted by heap term `h`.
  std::string heap(const TermPtr& h, const Sort& s) {
    switch (h->op) {
      case Op::HeapVar: return heap_name(h->name, 0, s);
      case Op::Anon: return heap_name("", h->value, s);
      case Op::Store: {
        const Term& f = *h->args[1];
        if (f.sort != s) return heap(h->args[0], s);
        std::string base = heap(h->args[0], s);
        std::string fn = field_name(f);
        return "(store " + base + " " + fn + " " + enc(h->args[2], s) + ")";
      }
      case Op::Ite:
        return list("ite", {enc(h->args[0], Sort::bool_()), heap(h->args[1], s), heap(h->args[2], s)});
      default: break;
    }
    throw SortError("unsupported heap term " + to_string(h));
  }

  std::string case_term(const TermPtr& tp, const Sort& want) {
    const Term& t = *tp;
    const TermPtr& scr = t.args[0];
    std::string s = enc(scr, scr->sort);
    const DataDecl* d = p_.find_data(scr->sort.name);
    std::set<std::string> covered;
    bool wildcard = false;
    for (const auto& arm : t.arms) {
      if (arm.ctor == "_") wildcard = true;
      else covered.insert(arm.ctor);
    }
    bool exhaustive = wildcard || (d && std::all_of(d->ctors.begin(), d->ctors.end(), [&](const CtorDecl& c) {
                                     return covered.count(c.name) > 0;
                                   }));
    Sort rs = t.sort;
    std::string tail;
    if (!exhaustive) tail = case_undef(tp, rs);
    std::vector<std::pair<std::string, std::string>> branches;  // test, body
    for (const auto& arm : t.arms) {
      std::size_t mark = bound_.size();
      for (std::size_t i = 0; i < arm.binders.size(); ++i)
        bound_.emplace_back(arm.binders[i].name, "(" + arm.ctor + "_" + std::to_string(i) + " " + s + ")");
      std::string body = enc(arm.body, rs.kind == Sort::Kind::Ref ? want : rs);
      bound_.resize(mark);
      branches.push_back({arm.ctor == "_" ? "" : "((_ is " + arm.ctor + ") " + s + ")", body});
      if (arm.ctor == "_") break;
    }
    std::string out;
    if (exhaustive) {
      out = branches.back().second;
      branches.pop_back();
    } else {
      out = tail;
    }
    for (auto it = branches.rbegin(); it != branches.rend(); ++it) out = "(ite " + it->first + " " + it->second + " " + out + ")";
    return out;
  }

  // Structurally identical partial cases share their fallback.
  std::string case_undef(const TermPtr& c, const Sort& s) {
    for (const auto& [term, name] : case_undefs_)
      if (equal(term, c)) return name;
    long long k = static_cast<long long>(case_undefs_.size()) + 1;
    std::string n = claim("undef_" + sort_name(s) + "_" + std::to_string(k));
    decls_.push_back({n, sort_name(s)});
    use_sort(s);
    case_undefs_.push_back({c, n});
    return n;
  }

  // ---- header ---------------------------------------------------------

  void header(std::ostringstream& out) {
    if (need_ref_) out << "(declare-sort Ref 0)\n";
    if (need_fut_) out << "(declare-sort Fut 0)\n";

    std::vector<const DataDecl*> datas;
    for (const auto& d : p_.datatypes)
      if (data_used_.count(d.name)) datas.push_back(&d);
    if (!datas.empty()) {
      out << "(declare-datatypes (";
      for (std::size_t i = 0; i < datas.size(); ++i) out << (i ? " " : "") << "(" << sanitize(datas[i]->name) << " 0)";
      out << ") (";
      for (std::size_t i = 0; i < datas.size(); ++i) {
        out << (i ? " " : "") << "(";
        for (std::size_t c = 0; c < datas[i]->ctors.size(); ++c) {
          const CtorDecl& ct = datas[i]->ctors[c];
          out << (c ? " " : "") << "(" << ct.name;
          for (std::size_t a = 0; a < ct.args.size(); ++a)
            out << " (" << ct.name << "_" << a << " " << sort_name(sort_of(ct.args[a])) << ")";
          out << ")";
        }
        out << ")";
      }
      out << "))\n";
    }

    for (const auto& s : used_sorts_) out << "(declare-sort Field_" << sort_name(s) << " 0)\n";
    for (const auto& s : used_sorts_) {
      std::vector<std::string> same;
      for (const auto& [n, fs] : field_order_)
        if (fs == s) {
          out << "(declare-const " << n << " Field_" << sort_name(s) << ")\n";
          same.push_back(n);
        }
      if (same.size() >= 2) {
        out << "(assert (distinct";
        for (const auto& n : same) out << " " << n;
        out << "))\n";
      }
    }

    for (const auto& [n, s] : heap_order_) {
      out << "(declare-const " << n << " (Array Field_" << sort_name(s) << " " << sort_name(s) << "))\n";
    }

    for (const auto& [s, n] : nulls_) out << "(declare-const " << n << " " << sort_name(s) << ")\n";
    for (const auto& n : fut_order_) out << "(declare-const " << n << " Fut)\n";
    {
      std::vector<std::string> futs = fut_order_;
      auto nf = nulls_.find(Sort::fut());
      if (nf != nulls_.end()) futs.push_back(nf->second);
      if (futs.size() >= 2) {
        out << "(assert (distinct";
        for (const auto& n : futs) out << " " << n;
        out << "))\n";
      }
    }
    for (const auto& [n, s] : decls_) out << "(declare-const " << n << " " << s << ")\n";
    for (const auto& f : fun_decls_) out << f << "\n";
  }

  const Program& p_;
  SymbolTable table_;
  std::set<std::string> taken_;
  std::set<Sort> used_sorts_;
  std::set<std::string> data_used_;
  bool need_ref_ = false, need_fut_ = false;

  std::map<std::pair<std::string, std::string>, std::string> fields_;
  std::vector<std::pair<std::string, Sort>> field_order_;
  std::map<std::string, std::string> vars_;
  std::vector<std::pair<std::string, std::string>> decls_;  // name, sort text
  std::map<Sort, std::string> nulls_;
  std::map<std::string, std::string> futs_;
  std::vector<std::string> fut_order_;
  std::map<std::pair<std::string, Sort>, std::string> heaps_;
  std::vector<std::pair<std::string, Sort>> heap_order_;
  std::map<std::pair<Sort, long long>, std::string> undefs_;
  std::vector<std::pair<TermPtr, std::string>> case_undefs_;
  std::map<std::string, std::string> funs_;
  std::vector<std::string> fun_order_;
  std::vector<std::string> fun_decls_;
  std::map<std::string, std::vector<Sort>> fun_params_;
  std::vector<std::pair<std::string, std::string>> bound_;  // logic name -> SMT text
};

}  // namespace

SmtGoal encode(const Program& p, const std::vector<TermPtr>& gamma, const TermPtr& goal, const EncodeOptions& opt) {
  return Encoder(p).run(gamma, goal, opt);
}

}  // namespace bsev::smt
