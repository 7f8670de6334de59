#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bsev {

struct SourceLoc {
  int line = 0;
  int col = 0;
};

/// Source-level types of MiniABS. `Named` only exists between parsing and
/// type checking; the checker rewrites it to `Interface` or `Data`.
class Type {
 public:
  enum class Kind { Unknown, Int, Bool, Unit, String, Fut, Named, Interface, Data, Null };

  Type() = default;
  static Type unknown() { return Type(Kind::Unknown); }
  static Type int_() { return Type(Kind::Int); }
  static Type bool_() { return Type(Kind::Bool); }
  static Type unit() { return Type(Kind::Unit); }
  static Type string() { return Type(Kind::String); }
  static Type null() { return Type(Kind::Null); }
  static Type fut(Type inner);
  static Type named(std::string name) { return Type(Kind::Named, std::move(name)); }
  static Type interface(std::string name) { return Type(Kind::Interface, std::move(name)); }
  static Type data(std::string name) { return Type(Kind::Data, std::move(name)); }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Type& inner() const;

  bool is_reference() const {
    return kind_ == Kind::Interface || kind_ == Kind::Fut || kind_ == Kind::Null;
  }
  bool is_unknown() const { return kind_ == Kind::Unknown; }

  std::string str() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  explicit Type(Kind k, std::string name = {}) : kind_(k), name_(std::move(name)) {}

  Kind kind_ = Kind::Unknown;
  std::string name_;
  std::shared_ptr<const Type> inner_;
};

enum class Nullability { Nullable, NonNull };

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  IntLit,
  BoolLit,
  NullLit,
  StringLit,
  Name,    // bare identifier, resolved by the checker
  Field,   // this.f
  Result,  // `result` in specifications
  Unary,
  Binary,
  Call,    // function, constructor, or builtin application
  If,      // if c then a else b
  Case,
  Old,
  Last,
};

enum class UnOp { Not, Neg };
enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or, Implies };

const char* to_string(UnOp op);
const char* to_string(BinOp op);

/// What a Name or Call resolved to during type checking.
enum class NameRef { Unresolved, Local, Param, Field, Function, Constructor, Builtin };

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct CaseBranch {
  std::string ctor;  // "_" for a wildcard
  std::vector<std::string> binders;
  ExprPtr body;
};

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  SourceLoc loc;
  int id = 0;  // unique per parse; nullability facts are keyed by it

  long long int_value = 0;
  bool bool_value = false;
  std::string text;  // identifier, field, function, constructor, or string payload
  UnOp unop = UnOp::Not;
  BinOp binop = BinOp::Add;
  std::vector<ExprPtr> args;
  std::vector<CaseBranch> branches;

  // Filled in by the type checker.
  Type type;
  NameRef ref = NameRef::Unresolved;
};

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
  Skip,
  VarDecl,
  Assign,
  AsyncCall,
  Get,
  SyncCall,
  Await,
  If,
  While,
  Return,
  New,
  ExprStmt,  // builtin calls such as println
};

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;
using Block = std::vector<StmtPtr>;

/// Left-hand side of an assignment-like statement.
struct Target {
  enum class Kind { None, Local, Field };
  Kind kind = Kind::None;
  std::string name;
  bool declares = false;  // `T x = ...`
  Type decl_type;
  Nullability nullability = Nullability::Nullable;
};

struct Stmt {
  StmtKind kind = StmtKind::Skip;
  SourceLoc loc;
  int id = 0;

  Target target;
  ExprPtr expr;  // value / condition / guard / receiver / future / returned value
  bool future_guard = false;  // await f?
  std::string method;         // call statements
  std::string class_name;     // new
  std::vector<ExprPtr> args;
  Block then_body;
  Block else_body;  // also the loop body for While
  ExprPtr invariant;  // WhileInv, may be null
};

// ---------------------------------------------------------------------------
// Session types (Local annotations)

struct SessionType;
using SessionTypePtr = std::shared_ptr<const SessionType>;

struct SessionType {
  enum class Kind { Call, Susp, Get, Put, Seq, Alt, Star, End };
  Kind kind = Kind::End;
  std::string role;
  std::string method;
  ExprPtr formula;  // may be null: defaults to true (Call/Put/Susp) ; target expression for Get
  std::vector<SessionTypePtr> parts;
};

// ---------------------------------------------------------------------------
// Declarations

struct Param {
  std::string name;
  Type type;
  Nullability nullability = Nullability::Nullable;
  SourceLoc loc;
};

struct MethodSig {
  std::string name;
  std::vector<Param> params;
  Type return_type;
  ExprPtr pre;  // Requires; null means true
  ExprPtr post;  // Ensures; null means true
  SourceLoc loc;
};

struct InterfaceDecl {
  std::string name;
  std::vector<MethodSig> methods;
  SourceLoc loc;
  const MethodSig* find(const std::string& method) const;
};

struct MethodDecl {
  MethodSig sig;
  std::vector<std::string> succeeds;
  std::vector<std::string> overlaps;
  std::string local_type_text;
  SessionTypePtr local_type;  // null when no Local annotation
  Block body;
};

struct FieldDecl {
  std::string name;
  Type type;
  Nullability nullability = Nullability::Nullable;
  ExprPtr init;  // may be null
  SourceLoc loc;
};

struct ClassDecl {
  std::string name;
  std::vector<Param> params;
  std::string implements;  // empty if none
  std::vector<FieldDecl> fields;
  ExprPtr creation_cond;  // Requires on the class
  ExprPtr obj_invariant;  // ObjInv
  std::vector<std::pair<std::string, std::string>> roles;  // role name -> field name
  std::vector<MethodDecl> methods;
  SourceLoc loc;

  const MethodDecl* find_method(const std::string& m) const;
  /// Class parameters followed by body fields.
  std::vector<FieldDecl> all_fields() const;
  std::optional<std::string> role_field(const std::string& role) const;
};

struct FunDecl {
  std::string name;
  std::vector<Param> params;
  Type return_type;
  ExprPtr pre;
  ExprPtr post;  // Ensures; null means true
  ExprPtr body;
  SourceLoc loc;
};

struct CtorDecl {
  std::string name;
  std::vector<Type> args;
};

struct DataDecl {
  std::string name;
  std::vector<CtorDecl> ctors;
  SourceLoc loc;
};

struct Program {
  std::vector<InterfaceDecl> interfaces;
  std::vector<ClassDecl> classes;
  std::vector<FunDecl> functions;
  std::vector<DataDecl> datatypes;

  const InterfaceDecl* find_interface(const std::string& n) const;
  const ClassDecl* find_class(const std::string& n) const;
  const FunDecl* find_function(const std::string& n) const;
  const DataDecl* find_data(const std::string& n) const;
  /// The datatype declaring constructor `ctor`, with the constructor itself.
  std::optional<std::pair<const DataDecl*, const CtorDecl*>> find_ctor(const std::string& ctor) const;
};

// Construction helpers used by the parser, the engine's tests, and the
// counterexample generator.
ExprPtr make_int(long long v);
ExprPtr make_bool(bool v);
ExprPtr make_name(std::string name);
ExprPtr make_binary(BinOp op, ExprPtr a, ExprPtr b);

/// Deep copy with fresh node ids.
ExprPtr clone(const ExprPtr& e);

/// Process-wide id source for Expr and Stmt nodes.
int next_node_id();

}  // namespace bsev
