#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bsev/frontend/ast.hpp"

namespace bsev {

enum class Tok {
  End,
  Ident,
  Int,
  String,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Lt,
  Gt,
  Le,
  Ge,
  EqEq,
  Ne,
  Assign,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  AndAnd,
  OrOr,
  Arrow,     // ->
  FatArrow,  // =>
  Bang,
  Question,
  Dot,
  Comma,
  Semi,
  Colon,
  Pipe,
};

const char* to_string(Tok t);

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long value = 0;
  SourceLoc loc;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, std::vector<std::string> expected, std::string found);

  SourceLoc loc() const { return loc_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  SourceLoc loc_;
  std::vector<std::string> expected_;
  std::string found_;
};

/// Tokenizes MiniABS. Line (`//`) and block (`/* */`) comments are skipped.
std::vector<Token> lex(std::string_view source);

}  // namespace bsev
