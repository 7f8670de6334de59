#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsev/logic/term.hpp"

namespace bsev::logic {

struct Value;
using HeapMap = std::map<std::string, Value>;

/// Concrete value of any sort. References and futures are object ids with
/// 0 standing for null.
struct Value {
  Sort sort;
  long long i = 0;  // Int, Bool (0/1), Ref/Fut id
  std::string s;    // String payload or constructor name
  std::vector<Value> args;  // constructor arguments
  std::shared_ptr<const HeapMap> heap;  // field name -> value

  static Value int_(long long v) { return {Sort::int_(), v, {}, {}, {}}; }
  static Value bool_(bool b) { return {Sort::bool_(), b ? 1 : 0, {}, {}, {}}; }
  static Value ref(long long id) { return {Sort::ref(), id, {}, {}, {}}; }
  static Value fut(long long id) { return {Sort::fut(), id, {}, {}, {}}; }
  static Value string(std::string s) { return {Sort::string(), 0, std::move(s), {}, {}}; }
  static Value data(Sort d, std::string ctor, std::vector<Value> args = {}) {
    return {std::move(d), 0, std::move(ctor), std::move(args), {}};
  }
  static Value heap_of(HeapMap m) { return {Sort::heap(), 0, {}, {}, std::make_shared<const HeapMap>(std::move(m))}; }

  bool truth() const { return i != 0; }
  std::string str() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalEnv {
  std::map<std::string, Value> vars;
  std::map<std::string, Value> heaps;   // heap variables
  std::map<long long, Value> anons;     // anon index -> heap
  std::map<std::pair<Sort, long long>, Value> undefs;
  /// Interpretation of program functions; may be empty.
  std::function<Value(const std::string&, const std::vector<Value>&)> functions;
  /// Value used for a field missing from a heap map; nullptr means error.
  std::function<std::optional<Value>(const std::string& field, const Sort&)> heap_default;
  /// Quantifier range for Int-sorted bound variables.
  long long quant_lo = -3;
  long long quant_hi = 3;
};

/// Euclidean division and remainder (SMT-LIB semantics); b must be nonzero.
long long euclid_div(long long a, long long b);
long long euclid_mod(long long a, long long b);

/// Evaluates a term. Throws EvalError on missing symbols, division by zero,
/// unmatched case branches, or quantifiers over unsupported sorts.
Value evaluate(const TermPtr& t, const EvalEnv& env);

}  // namespace bsev::logic
