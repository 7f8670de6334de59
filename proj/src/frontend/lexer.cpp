#include "bsev/frontend/lexer.hpp"

#include <cctype>

namespace bsev {

const char* to_string(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::String: return "string";
    case Tok::LParen: return "(";
    case Tok::RParen: return ")";
    case Tok::LBrace: return "{";
    case Tok::RBrace: return "}";
    case Tok::LBracket: return "[";
    case Tok::RBracket: return "]";
    case Tok::Lt: return "<";
    case Tok::Gt: return ">";
    case Tok::Le: return "<=";
    case Tok::Ge: return ">=";
    case Tok::EqEq: return "==";
    case Tok::Ne: return "!=";
    case Tok::Assign: return "=";
    case Tok::Plus: return "+";
    case Tok::Minus: return "-";
    case Tok::Star: return "*";
    case Tok::Slash: return "/";
    case Tok::Percent: return "%";
    case Tok::AndAnd: return "&&";
    case Tok::OrOr: return "||";
    case Tok::Arrow: return "->";
    case Tok::FatArrow: return "=>";
    case Tok::Bang: return "!";
    case Tok::Question: return "?";
    case Tok::Dot: return ".";
    case Tok::Comma: return ",";
    case Tok::Semi: return ";";
    case Tok::Colon: return ":";
    case Tok::Pipe: return "|";
  }
  return "?";
}

namespace {

std::string describe(const std::vector<std::string>& expected) {
  std::string s;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) s += ", ";
    s += "'" + expected[i] + "'";
  }
  return s;
}

}  // namespace

ParseError::ParseError(SourceLoc loc, std::vector<std::string> expected, std::string found)
    : std::runtime_error(std::to_string(loc.line) + ":" + std::to_string(loc.col) +
                         ": parse error: expected " + describe(expected) + ", found '" + found + "'"),
      loc_(loc),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok t, std::size_t len, SourceLoc loc) {
    out.push_back(Token{t, std::string(src.substr(i, len)), 0, loc});
    advance(len);
  };

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      SourceLoc start{line, col};
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance();
      if (i + 1 >= src.size()) throw ParseError(start, {"*/"}, "end of input");
      advance(2);
      continue;
    }
    SourceLoc loc{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, j - i, loc);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Tok::Int, std::string(src.substr(i, j - i)), 0, loc};
      try {
        t.value = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw ParseError(loc, {"integer literal in range"}, t.text);
      }
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      std::string payload;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < src.size()) {
          char e = src[j + 1];
          payload += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          j += 2;
        } else {
          payload += src[j++];
        }
      }
      if (j >= src.size()) throw ParseError(loc, {"\""}, "end of input");
      out.push_back(Token{Tok::String, payload, 0, loc});
      advance(j + 1 - i);
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
    if (two('<', '=')) { push(Tok::Le, 2, loc); continue; }
    if (two('>', '=')) { push(Tok::Ge, 2, loc); continue; }
    if (two('=', '=')) { push(Tok::EqEq, 2, loc); continue; }
    if (two('!', '=')) { push(Tok::Ne, 2, loc); continue; }
    if (two('&', '&')) { push(Tok::AndAnd, 2, loc); continue; }
    if (two('|', '|')) { push(Tok::OrOr, 2, loc); continue; }
    if (two('-', '>')) { push(Tok::Arrow, 2, loc); continue; }
    if (two('=', '>')) { push(Tok::FatArrow, 2, loc); continue; }
    Tok t;
    switch (c) {
      case '(': t = Tok::LParen; break;
      case ')': t = Tok::RParen; break;
      case '{': t = Tok::LBrace; break;
      case '}': t = Tok::RBrace; break;
      case '[': t = Tok::LBracket; break;
      case ']': t = Tok::RBracket; break;
      case '<': t = Tok::Lt; break;
      case '>': t = Tok::Gt; break;
      case '=': t = Tok::Assign; break;
      case '+': t = Tok::Plus; break;
      case '-': t = Tok::Minus; break;
      case '*': t = Tok::Star; break;
      case '/': t = Tok::Slash; break;
      case '%': t = Tok::Percent; break;
      case '!': t = Tok::Bang; break;
      case '?': t = Tok::Question; break;
      case '.': t = Tok::Dot; break;
      case ',': t = Tok::Comma; break;
      case ';': t = Tok::Semi; break;
      case ':': t = Tok::Colon; break;
      case '|': t = Tok::Pipe; break;
      default: throw ParseError(loc, {"token"}, std::string(1, c));
    }
    push(t, 1, loc);
  }
  out.push_back(Token{Tok::End, "", 0, SourceLoc{line, col}});
  return out;
}

}  // namespace bsev
