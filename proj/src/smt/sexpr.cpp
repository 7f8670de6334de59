#include "bsev/smt/sexpr.hpp"

#include <cctype>

namespace bsev::smt {

std::string SExpr::str() const {
  if (!is_list) return atom;
  std::string s = "(";
  for (std::size_t i = 0; i < items.size(); ++i) s += (i ? " " : "") + items[i].str();
  return s + ")";
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view t) : t_(t) {}

  bool at_end() {
    skip();
    return pos_ >= t_.size();
  }

  SExpr read() {
    skip();
    if (pos_ >= t_.size()) throw SExprError("unexpected end of s-expression");
    char c = t_[pos_];
    if (c == ')') throw SExprError("unbalanced ')'");
    if (c == '(') {
      ++pos_;
      SExpr e;
      e.is_list = true;
      while (true) {
        skip();
        if (pos_ >= t_.size()) throw SExprError("unterminated list");
        if (t_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    SExpr e;
    if (c == '"') {
      std::size_t start = pos_++;
      // SMT-LIB escapes a quote by doubling it.
      while (pos_ < t_.size()) {
        if (t_[pos_] == '"') {
          if (pos_ + 1 < t_.size() && t_[pos_ + 1] == '"') {
            pos_ += 2;
            continue;
          }
          break;
        }
        ++pos_;
      }
      if (pos_ >= t_.size()) throw SExprError("unterminated string");
      e.atom = std::string(t_.substr(start, ++pos_ - start));
      return e;
    }
    if (c == '|') {
      std::size_t end = t_.find('|', pos_ + 1);
      if (end == std::string_view::npos) throw SExprError("unterminated quoted symbol");
      e.atom = std::string(t_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < t_.size() && !std::isspace(static_cast<unsigned char>(t_[pos_])) && t_[pos_] != '(' &&
           t_[pos_] != ')')
      ++pos_;
    e.atom = std::string(t_.substr(start, pos_ - start));
    return e;
  }

 private:
  void skip() {
    while (pos_ < t_.size()) {
      if (std::isspace(static_cast<unsigned char>(t_[pos_]))) {
        ++pos_;
      } else if (t_[pos_] == ';') {
        while (pos_ < t_.size() && t_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) {
  Reader r(text);
  std::vector<SExpr> out;
  while (!r.at_end()) out.push_back(r.read());
  return out;
}

}  // namespace bsev::smt
