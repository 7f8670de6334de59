#include "bsev/cli/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bsev/engine/rules.hpp"
#include "bsev/session/session.hpp"
#include "bsev/smt/encode.hpp"

namespace bsev::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char* status_name(Status s) {
  switch (s) {
    case Status::Valid: return "VALID";
    case Status::ValidUpToStatic: return "VALID_UP_TO_STATIC";
    case Status::Fail: return "FAIL";
    case Status::Error: return "ERROR";
  }
  return "?";
}

int Report::exit_code() const {
  int code = 0;
  for (const auto& t : targets) {
    if (t.status == Status::Error) return 2;
    if (t.status == Status::Fail) code = 1;
  }
  return code;
}

std::size_t Report::verified() const {
  return std::count_if(targets.begin(), targets.end(), [](const TargetResult& t) {
    return t.status == Status::Valid || t.status == Status::ValidUpToStatic;
  });
}

std::vector<std::string> resolve_targets(const Program& p, const std::string& sel) {
  std::vector<std::string> out;
  auto whole_class = [&](const ClassDecl& c) {
    out.push_back(c.name + ".<init>");
    for (const auto& m : c.methods) out.push_back(c.name + "." + m.sig.name);
  };
  if (sel == "all") {
    for (const auto& c : p.classes) whole_class(c);
    for (const auto& f : p.functions) out.push_back(f.name);
  } else if (auto dot = sel.find('.'); dot != std::string::npos) {
    const ClassDecl* c = p.find_class(sel.substr(0, dot));
    std::string m = sel.substr(dot + 1);
    if (!c) throw UsageError("unknown class in target '" + sel + "'");
    if (m != "<init>" && !c->find_method(m)) throw UsageError("unknown method in target '" + sel + "'");
    out.push_back(sel);
  } else if (const ClassDecl* c = p.find_class(sel)) {
    whole_class(*c);
  } else if (p.find_function(sel)) {
    out.push_back(sel);
  } else {
    throw UsageError("unknown target '" + sel + "'");
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') c = '_';
  return s;
}

class Checker {
 public:
  Checker(const Program& p, const VerifyOptions& opt, const std::string& target)
      : p_(p), opt_(opt), stem_(file_safe(target)) {}

  smt::SolverResult check(const std::vector<TermPtr>& gamma, const TermPtr& goal, const std::string& tag,
                          smt::SmtGoal* out = nullptr) {
    smt::SmtGoal g = smt::encode(p_, gamma, goal, {true});
    if (!opt_.dump_smt_dir.empty()) {
      fs::create_directories(opt_.dump_smt_dir);
      std::ofstream(fs::path(opt_.dump_smt_dir) / (stem_ + "_" + tag + ".smt2"), std::ios::binary) << g.text;
    }
    smt::SolverResult r = smt::run_solver(g.text, opt_.solver);
    if (out) *out = std::move(g);
    return r;
  }

 private:
  const Program& p_;
  const VerifyOptions& opt_;
  std::string stem_;
};

void solve(const Program& p, const SENode& n, GoalResult& g, Checker& ck, bool residuals) {
  g.node = &n;
  const Sequent& sq = n.sequent;
  smt::SmtGoal enc;
  std::string tag = "n" + std::to_string(n.id);
  smt::SolverResult r = ck.check(sq.gamma, sq.goal, tag, &enc);
  g.verdict = r.verdict;
  g.message = r.message;
  g.seconds = r.seconds;
  if (r.verdict != smt::Verdict::Sat || !residuals) return;
  try {
    g.model = smt::parse_model(r.model, enc, p);
  } catch (const std::exception&) {
    // A CE is still produced, with placeholders.
  }
  std::vector<TermPtr> parts = logic::conjuncts(sq.goal);
  if (parts.size() == 1) {
    g.residual.push_back(display_obligation(sq.goal, sq.gamma));
    return;
  }
  for (std::size_t k = 0; k < parts.size(); ++k) {
    smt::SolverResult rk = ck.check(sq.gamma, parts[k], tag + "_c" + std::to_string(k + 1));
    g.seconds += rk.seconds;
    if (rk.verdict != smt::Verdict::Unsat) g.residual.push_back(display_obligation(parts[k], sq.gamma));
  }
}

// Closed as described by the tree: logic leaves by their verdict, static
// leaves always, stuck leaves never.
bool closed(const SENode& n, const std::map<const SENode*, std::size_t>& idx, const std::vector<GoalResult>& goals) {
  switch (n.kind) {
    case SENode::Kind::Logic: return goals[idx.at(&n)].verdict == smt::Verdict::Unsat;
    case SENode::Kind::Static: return true;
    case SENode::Kind::Stuck: return false;
    case SENode::Kind::Symbolic: break;
  }
  if (n.children.empty()) return false;
  auto c = [&](const auto& ch) { return closed(*ch, idx, goals); };
  return n.disjunctive ? std::any_of(n.children.begin(), n.children.end(), c)
                       : std::all_of(n.children.begin(), n.children.end(), c);
}

void blame(const SENode& n, const std::map<const SENode*, std::size_t>& idx, TargetResult& t) {
  if (closed(n, idx, t.goals)) return;
  if (n.kind == SENode::Kind::Logic) t.open.push_back(idx.at(&n));
  else if (n.kind == SENode::Kind::Stuck) t.stuck.push_back(&n);
  for (const auto& c : n.children) blame(*c, idx, t);
}

ProofObligation make_po(const Program& p, const std::string& name, const VerifyOptions& opt) {
  if (auto dot = name.find('.'); dot != std::string::npos) {
    const ClassDecl& c = *p.find_class(name.substr(0, dot));
    std::string m = name.substr(dot + 1);
    if (m == "<init>") return init_po(p, c);
    return method_po(p, c, *c.find_method(m), opt.calculus);
  }
  return function_po(p, *p.find_function(name));
}

}  // namespace

TargetResult verify_target(const Program& p, const NullabilityFacts* facts, const std::string& name,
                           const VerifyOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  TargetResult t;
  t.name = name;
  try {
    if (opt.calculus == Calculus::Session && opt.target == name && name.find('.') != std::string::npos) {
      const ClassDecl* c = p.find_class(name.substr(0, name.find('.')));
      const MethodDecl* m = c ? c->find_method(name.substr(name.find('.') + 1)) : nullptr;
      if (m && !m->local_type) throw UsageError(name + " has no Local type to verify against");
    }
    t.po = make_po(p, name, opt);
    const RuleSet& rules = t.po.calculus == Calculus::Session ? session_calculus()
                           : opt.post_rules                   ? *opt.post_rules
                                                              : post_calculus();
    t.tree = build_tree(p, t.po, rules, facts, opt.limits);

    for (auto& s : emit_static_nodes(p)) {
      bool mine = s.kind == "context-set" ? s.owner == name
                                          : t.po.calculus == Calculus::Session && name.rfind(s.owner + ".", 0) == 0;
      if (mine) t.statics.push_back(std::move(s));
    }

    std::map<const SENode*, std::size_t> idx;
    for_each_node(*t.tree, [&](const SENode& n) {
      if (n.kind == SENode::Kind::Logic) {
        idx[&n] = t.goals.size();
        t.goals.emplace_back();
      }
    });
    Checker ck(p, opt, name);
    for (const auto& [n, i] : idx) solve(p, *n, t.goals[i], ck, opt.residuals || opt.ce);

    blame(*t.tree, idx, t);
    std::sort(t.open.begin(), t.open.end(), [&](std::size_t a, std::size_t b) {
      return t.goals[a].node->id < t.goals[b].node->id;
    });
    std::sort(t.stuck.begin(), t.stuck.end(), [](const SENode* a, const SENode* b) { return a->id < b->id; });

    bool solver_error = std::any_of(t.goals.begin(), t.goals.end(),
                                    [](const GoalResult& g) { return g.verdict == smt::Verdict::Error; });
    if (solver_error) t.status = Status::Error;
    else if (!closed(*t.tree, idx, t.goals)) t.status = Status::Fail;
    else t.status = t.statics.empty() ? Status::Valid : Status::ValidUpToStatic;

    if (opt.ce && t.status == Status::Fail) {
      for (std::size_t i : t.open) {
        const GoalResult& g = t.goals[i];
        CeOptions co;
        co.residual = g.residual;
        t.ces.push_back(generate_ce(p, t.po, *g.node, g.model ? &g.model->env : nullptr, co));
      }
      for (const SENode* s : t.stuck) t.ces.push_back(generate_ce(p, t.po, *s, nullptr));
    }
  } catch (const smt::SolverError& e) {
    t.status = Status::Error;
    t.error = e.what();
  } catch (const UsageError& e) {
    t.status = Status::Error;
    t.error = e.what();
  }
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return t;
}

Report verify(const Program& p, const NullabilityFacts* facts, const VerifyOptions& opt) {
  std::vector<std::string> names = resolve_targets(p, opt.target);
  Report r;
  r.targets.resize(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < names.size();) r.targets[i] = verify_target(p, facts, names[i], opt);
  };
  std::size_t jobs = std::clamp<std::size_t>(opt.jobs, 1, std::max<std::size_t>(names.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return r;
}

std::string report_text(const Report& r) {
  std::ostringstream out;
  char secs[32];
  for (const auto& t : r.targets) {
    std::size_t closed_goals = std::count_if(t.goals.begin(), t.goals.end(),
                                             [](const GoalResult& g) { return g.verdict == smt::Verdict::Unsat; });
    std::snprintf(secs, sizeof secs, "%.2f", t.seconds);
    out << t.name << ": " << status_name(t.status);
    if (!t.error.empty()) out << " (" << t.error << ")";
    else out << " (" << closed_goals << "/" << t.goals.size() << " goals closed, " << secs << " s)";
    out << "\n";
    for (std::size_t i : t.open) {
      const GoalResult& g = t.goals[i];
      out << "  open goal #" << g.node->id << " " << g.node->label << ": " << smt::verdict_name(g.verdict);
      if (!g.message.empty()) out << " (" << g.message << ")";
      out << "\n";
      for (const auto& res : g.residual) out << "    " << res << "\n";
    }
    for (const SENode* s : t.stuck) out << "  stuck #" << s->id << ": " << s->label << "\n";
    for (const auto& s : t.statics) out << "  static " << s.kind << ": " << s.str() << "\n";
  }
  out << r.verified() << "/" << r.targets.size() << " targets verified\n";
  return out.str();
}

std::string report_records(const Report& r) {
  std::ostringstream out;
  auto emit = [&](const json& j) { out << j.dump() << "\n"; };
  for (const auto& t : r.targets) {
    std::size_t closed_goals = std::count_if(t.goals.begin(), t.goals.end(),
                                             [](const GoalResult& g) { return g.verdict == smt::Verdict::Unsat; });
    json tj = {{"type", "target"},      {"target", t.name},         {"status", status_name(t.status)},
               {"goals", t.goals.size()}, {"closed", closed_goals}, {"seconds", t.seconds}};
    if (!t.error.empty()) tj["error"] = t.error;
    emit(tj);
    for (std::size_t i : t.open) {
      const GoalResult& g = t.goals[i];
      emit({{"type", "goal"}, {"target", t.name}, {"node", g.node->id}, {"label", g.node->label},
            {"verdict", smt::verdict_name(g.verdict)}, {"residual", g.residual}});
    }
    for (const SENode* s : t.stuck) emit({{"type", "stuck"}, {"target", t.name}, {"node", s->id}, {"reason", s->label}});
    for (const auto& s : t.statics) {
      json sj = {{"type", "static"}, {"target", t.name}, {"kind", s.kind}, {"owner", s.owner}, {"text", s.str()}};
      if (s.kind == "context-set") {
        sj["succeeds"] = s.succeeds;
        sj["overlaps"] = s.overlaps;
        sj["heap_precondition"] = logic::to_string(s.heap_precondition);
      } else {
        json roles = json::object(), types = json::object();
        for (const auto& [k, v] : s.roles) roles[k] = v;
        for (const auto& [k, v] : s.local_types) types[k] = v;
        sj["roles"] = roles;
        sj["local_types"] = types;
      }
      emit(sj);
    }
  }
  emit({{"type", "summary"}, {"verified", r.verified()}, {"targets", r.targets.size()}});
  return out.str();
}

std::vector<std::string> write_counterexamples(const Report& r, const std::string& dir) {
  std::vector<std::string> paths;
  if (!dir.empty()) fs::create_directories(dir);
  for (const auto& t : r.targets) {
    std::map<std::string, int> seen;
    for (std::size_t k = 0; k < t.ces.size(); ++k) {
      const Counterexample& ce = t.ces[k];
      std::string base = file_safe(ce.file_stem) + "_ce" + std::to_string(++seen[ce.file_stem]);
      fs::path mabs = fs::path(dir) / (base + ".mabs");
      std::ofstream(mabs) << ce.text;
      std::ostringstream txt;
      txt << t.name << ": " << status_name(t.status) << "\n";
      if (k < t.open.size()) {
        const GoalResult& g = t.goals[t.open[k]];
        txt << "open goal #" << g.node->id << " " << g.node->label << ": " << smt::verdict_name(g.verdict) << "\n";
        for (const auto& res : g.residual) txt << "  " << res << "\n";
      } else {
        const SENode* s = t.stuck[k - t.open.size()];
        txt << "stuck #" << s->id << ": " << s->label << "\n";
      }
      std::ofstream(fs::path(dir) / (base + ".txt")) << txt.str();
      paths.push_back(mabs.string());
    }
  }
  return paths;
}

}  // namespace bsev::cli
