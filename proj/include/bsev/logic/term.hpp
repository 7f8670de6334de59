#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsev::logic {

struct Sort {
  enum class Kind { Int, Bool, Ref, Fut, String, Data, Heap };
  Kind kind = Kind::Int;
  std::string name;  // datatype name for Data

  static Sort int_() { return {Kind::Int, {}}; }
  static Sort bool_() { return {Kind::Bool, {}}; }
  static Sort ref() { return {Kind::Ref, {}}; }
  static Sort fut() { return {Kind::Fut, {}}; }
  static Sort string() { return {Kind::String, {}}; }
  static Sort heap() { return {Kind::Heap, {}}; }
  static Sort data(std::string n) { return {Kind::Data, std::move(n)}; }

  /// SMT-facing name: Int, Bool, Ref, Fut, String, Heap, or the datatype.
  std::string str() const;

  friend bool operator==(const Sort& a, const Sort& b) { return a.kind == b.kind && a.name == b.name; }
  friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }
  friend bool operator<(const Sort& a, const Sort& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.name < b.name;
  }
};

enum class Op {
  Var,      // program variable, fresh constant, or bound variable
  HeapVar,  // heap, oldHeap, lastHeap
  Field,    // field symbol; sort is the field's value sort
  Select,   // select(heap, field)
  Store,    // store(heap, field, value)
  Anon,     // anon(heap, index)
  IntLit,
  BoolLit,
  Null,
  FutLit,
  Fun,     // program function application
  Ctor,    // datatype constructor application
  IsCtor,  // constructor test, name = ctor
  CtorArg,  // value = argument position, name = ctor
  Ite,
  Case,
  Undef,  // underspecified value of `sort`, value = index
  Not,
  And,
  Or,
  Implies,
  Eq,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,  // Euclidean, as in SMT-LIB
  Mod,
  Neg,
  Forall,
  Exists,
};

enum class VarKind { Program, Fresh, Bound };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct BoundVar {
  std::string name;
  Sort sort;
};

struct CaseArm {
  std::string ctor;  // "_" for a wildcard
  std::vector<BoundVar> binders;
  TermPtr body;
};

struct Term {
  Op op = Op::IntLit;
  Sort sort;
  std::string name;
  long long value = 0;
  VarKind var_kind = VarKind::Program;
  std::string owner;  // class declaring a Field symbol
  std::vector<TermPtr> args;
  std::vector<BoundVar> bound;  // quantifiers
  std::vector<CaseArm> arms;    // Case; args[0] is the scrutinee

  bool is_formula() const { return sort.kind == Sort::Kind::Bool; }
  bool is_true() const { return op == Op::BoolLit && value != 0; }
  bool is_false() const { return op == Op::BoolLit && value == 0; }
};

class SortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Construction. The boolean connectives flatten and drop neutral elements;
// everything else builds exactly the requested node.
TermPtr var(std::string name, Sort s, VarKind k = VarKind::Program);
TermPtr heap_var(std::string name);
TermPtr field(std::string owner, std::string name, Sort s);
TermPtr select(TermPtr heap, TermPtr field);
TermPtr store(TermPtr heap, TermPtr field, TermPtr value);
TermPtr anon(TermPtr heap, long long index);
TermPtr int_lit(long long v);
TermPtr bool_lit(bool b);
TermPtr true_();
TermPtr false_();
TermPtr null_lit();
TermPtr fut_lit(std::string name);
TermPtr fun(std::string name, std::vector<TermPtr> args, Sort result);
TermPtr ctor(std::string name, std::vector<TermPtr> args, Sort data);
TermPtr is_ctor(std::string ctor, TermPtr t);
TermPtr ctor_arg(std::string ctor, long long pos, TermPtr t, Sort s);
TermPtr ite(TermPtr c, TermPtr a, TermPtr b);
TermPtr case_(TermPtr scrutinee, std::vector<CaseArm> arms, Sort s);
TermPtr undef(Sort s, long long index);
TermPtr not_(TermPtr a);
TermPtr and_(std::vector<TermPtr> xs);
TermPtr and_(TermPtr a, TermPtr b);
TermPtr or_(std::vector<TermPtr> xs);
TermPtr or_(TermPtr a, TermPtr b);
TermPtr implies(TermPtr a, TermPtr b);
TermPtr eq(TermPtr a, TermPtr b);
TermPtr ne(TermPtr a, TermPtr b);
TermPtr cmp(Op op, TermPtr a, TermPtr b);
TermPtr arith(Op op, TermPtr a, TermPtr b);
TermPtr neg(TermPtr a);
TermPtr forall(std::vector<BoundVar> vars, TermPtr body);
TermPtr exists(std::vector<BoundVar> vars, TermPtr body);

/// Structural equality (names, sorts, values, children).
bool equal(const TermPtr& a, const TermPtr& b);

/// Top-level conjuncts of a formula (the formula itself if not an And).
std::vector<TermPtr> conjuncts(const TermPtr& t);

/// Rewrites select over store to a fixpoint: same field yields the stored
/// value, a syntactically different field looks through the store. Anon
/// heaps are opaque.
TermPtr simplify_select_store(const TermPtr& t);

struct Symbols {
  std::set<std::string> vars;  // program variables and fresh constants
  std::set<std::string> heap_vars;
  std::set<std::string> fields;
  std::set<std::string> functions;
  std::set<std::string> fut_lits;
  std::set<long long> anons;
  std::set<std::pair<Sort, long long>> undefs;
};

Symbols free_symbols(const TermPtr& t);

/// Human-readable surface form. Selects on heap variables print as
/// `heap.f`; other selects keep the `select(h, this.f)` form.
std::string to_string(const TermPtr& t);

}  // namespace bsev::logic
