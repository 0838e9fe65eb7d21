#include <cctype>
#include <map>

#include "pol/common.hpp"
#include "pol/surface.hpp"

namespace pol::surface {

namespace {

const std::map<std::string, Tok>& keywords() {
  static const std::map<std::string, Tok> kw = {
      {"data", Tok::KwData},       {"codata", Tok::KwCodata}, {"def", Tok::KwDef},
      {"codef", Tok::KwCodef},     {"let", Tok::KwLet},       {"match", Tok::KwMatch},
      {"as", Tok::KwAs},           {"return", Tok::KwReturn}, {"absurd", Tok::KwAbsurd},
      {"comatch", Tok::KwComatch}, {"implicit", Tok::KwImplicit}, {"Type", Tok::KwType},
  };
  return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> lex(const std::string& src, uint32_t file) {
  std::vector<Token> out;
  uint32_t line = 1, col = 1;
  size_t i = 0;
  const size_t n = src.size();

  auto here = [&]() { return Span{file, line, col}; };
  auto bump = [&](size_t k = 1) {
    for (size_t j = 0; j < k && i < n; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Tok k, std::string text, Span sp) {
    out.push_back(Token{k, std::move(text), 0, sp});
  };

  while (i < n) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      bump();
      continue;
    }
    if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      while (i < n && src[i] != '\n') bump();
      continue;
    }
    Span sp = here();
    if (ident_start(c)) {
      size_t j = i;
      while (j < n && ident_cont(src[j])) ++j;
      std::string word = src.substr(i, j - i);
      bump(j - i);
      if (word == "_") {
        push(Tok::Hole, word, sp);
      } else if (auto it = keywords().find(word); it != keywords().end()) {
        push(it->second, word, sp);
      } else {
        push(Tok::Ident, word, sp);
      }
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string digits = src.substr(i, j - i);
      bump(j - i);
      Token t{Tok::Number, digits, 0, sp};
      try {
        t.number = std::stoull(digits);
      } catch (const std::exception&) {
        throw type_error("lex-error", "numeral out of range: " + digits, sp);
      }
      out.push_back(std::move(t));
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < n && src[i + 1] == b; };
    if (two(':', '=')) { bump(2); push(Tok::Assign, ":=", sp); continue; }
    if (two('=', '>')) { bump(2); push(Tok::FatArrow, "=>", sp); continue; }
    if (two('-', '>')) { bump(2); push(Tok::Arrow, "->", sp); continue; }
    switch (c) {
      case '(': bump(); push(Tok::LParen, "(", sp); continue;
      case ')': bump(); push(Tok::RParen, ")", sp); continue;
      case '{': bump(); push(Tok::LBrace, "{", sp); continue;
      case '}': bump(); push(Tok::RBrace, "}", sp); continue;
      case ',': bump(); push(Tok::Comma, ",", sp); continue;
      case ':': bump(); push(Tok::Colon, ":", sp); continue;
      case ';': bump(); push(Tok::Semi, ";", sp); continue;
      case '.': bump(); push(Tok::Dot, ".", sp); continue;
      case '\\': bump(); push(Tok::Backslash, "\\", sp); continue;
      default:
        throw type_error("lex-error", std::string("unexpected character '") + c + "'", sp);
    }
  }
  out.push_back(Token{Tok::End, "", 0, here()});
  return out;
}

}  // namespace pol::surface
