#include "bsev/engine/state.hpp"

#include <functional>

#include "bsev/frontend/printer.hpp"
#include "bsev/frontend/session_type.hpp"

namespace bsev {

Prog cons(StmtPtr head, Prog tail) { return std::make_shared<const ProgCell>(ProgCell{std::move(head), std::move(tail)}); }

Prog prepend(const Block& b, Prog tail) {
  for (auto it = b.rbegin(); it != b.rend(); ++it) tail = cons(*it, std::move(tail));
  return tail;
}

std::size_t length(const Prog& p) {
  std::size_t n = 0;
  for (const ProgCell* c = p.get(); c; c = c->tail.get()) ++n;
  return n;
}

std::string BehavioralSpec::str() const {
  if (kind == Kind::Post) return post ? logic::to_string(post) : "true";
  return session_type::to_string(session);
}

std::string StaticPayload::str() const {
  auto names = [](const std::vector<std::string>& xs) {
    std::string s = "{";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
    return s + "}";
  };
  if (kind == "context-set") {
    std::string s = owner + ":";
    if (!succeeds.empty()) s += " succeeds " + names(succeeds);
    if (!overlaps.empty()) s += " overlaps " + names(overlaps);
    return s + " must establish " + logic::to_string(heap_precondition);
  }
  std::string s = owner + ": roles {";
  for (std::size_t i = 0; i < roles.size(); ++i) s += (i ? ", " : "") + roles[i].first + " -> this." + roles[i].second;
  s += "}";
  for (const auto& [m, t] : local_types) s += "; " + m + ": " + t;
  return s;
}

std::unique_ptr<SENode> make_symbolic(SymbolicState s, CeHint hint) {
  auto n = std::make_unique<SENode>();
  n->kind = SENode::Kind::Symbolic;
  n->state = std::move(s);
  n->hint = std::move(hint);
  return n;
}

std::unique_ptr<SENode> make_logic(Sequent s, std::string label, CeHint hint) {
  auto n = std::make_unique<SENode>();
  n->kind = SENode::Kind::Logic;
  n->sequent = std::move(s);
  n->label = std::move(label);
  n->hint = std::move(hint);
  return n;
}

std::unique_ptr<SENode> make_stuck(std::string reason, CeHint hint) {
  auto n = std::make_unique<SENode>();
  n->kind = SENode::Kind::Stuck;
  n->label = std::move(reason);
  n->hint = std::move(hint);
  return n;
}

std::unique_ptr<SENode> make_static(StaticPayload p) {
  auto n = std::make_unique<SENode>();
  n->kind = SENode::Kind::Static;
  n->payload = std::move(p);
  n->label = n->payload.kind;
  return n;
}

std::string modality_text(const SymbolicState& s) {
  std::string prog;
  for (const ProgCell* c = s.prog.get(); c; c = c->tail.get()) prog += (prog.empty() ? "" : " ") + statement_head(*c->head);
  return "[" + prog + (prog.empty() ? "" : " ") + "⊩ " + s.spec.str() + "]";
}

namespace {

const char* kind_name(SENode::Kind k) {
  switch (k) {
    case SENode::Kind::Symbolic: return "symbolic";
    case SENode::Kind::Logic: return "logic";
    case SENode::Kind::Static: return "static";
    case SENode::Kind::Stuck: return "stuck";
  }
  return "?";
}

}  // namespace

std::string dump_tree(const SENode& root) {
  std::string out;
  std::function<void(const SENode&, int)> walk = [&](const SENode& n, int indent) {
    out += std::string(static_cast<std::size_t>(indent) * 2, ' ') + "#" + std::to_string(n.id) + " " + kind_name(n.kind);
    switch (n.kind) {
      case SENode::Kind::Symbolic:
        if (!n.rule.empty()) out += " (" + n.rule + (n.disjunctive ? ", any" : "") + ")";
        out += " " + modality_text(*n.state);
        break;
      case SENode::Kind::Logic: out += " [" + n.label + "] " + logic::to_string(n.sequent.goal); break;
      case SENode::Kind::Static: out += " [" + n.payload.kind + "] " + n.payload.str(); break;
      case SENode::Kind::Stuck: out += " " + n.label; break;
    }
    out += "\n";
    for (const auto& c : n.children) walk(*c, indent + 1);
  };
  walk(root, 0);
  return out;
}

std::size_t node_count(const SENode& root) {
  std::size_t n = 0;
  for_each_node(root, [&](const SENode&) { ++n; });
  return n;
}

}  // namespace bsev
