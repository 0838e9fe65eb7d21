#include <memory>

#include "pol/common.hpp"
#include "pol/surface.hpp"

namespace pol::surface {

namespace {

struct Parser {
  const std::vector<Token>& toks;
  size_t pos = 0;

  const Token& peek(size_t k = 0) const {
    size_t i = pos + k;
    return i < toks.size() ? toks[i] : toks.back();
  }
  bool at(Tok k, size_t ahead = 0) const { return peek(ahead).kind == k; }
  const Token& advance() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++pos;
    return t;
  }
  bool eat(Tok k) {
    if (at(k)) {
      advance();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw type_error("parse-error", msg + ", found " + got, t.span);
  }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return advance();
  }
  std::string ident(const char* what) { return expect(Tok::Ident, what).text; }

  static SExprPtr node(std::variant<SVar, SCall, SNum, SHole, SType, SAnn, SArrow, SLetE, SDtorE,
                                    SMatchE, SComatchE, SLambda>
                           v,
                       Span sp) {
    auto e = std::make_shared<SExpr>();
    e->v = std::move(v);
    e->span = sp;
    return e;
  }

  // --- terms ---------------------------------------------------------------

  SExprPtr expr() { return arrow(); }

  SExprPtr arrow() {
    Span sp = peek().span;
    SExprPtr lhs = postfix();
    if (eat(Tok::Arrow)) {
      SExprPtr rhs = arrow();
      return node(SArrow{lhs, rhs}, sp);
    }
    return lhs;
  }

  SExprPtr postfix() {
    SExprPtr e = atom();
    while (at(Tok::Dot)) {
      Span sp = peek().span;
      advance();
      if (eat(Tok::KwMatch)) {
        e = match_tail(e, sp);
        continue;
      }
      std::string name = ident("destructor or definition name after '.'");
      std::vector<SArg> args;
      if (at(Tok::LParen)) args = arg_list();
      e = node(SDtorE{e, name, std::move(args)}, sp);
    }
    return e;
  }

  SExprPtr match_tail(SExprPtr scrutinee, Span sp) {
    SMatchE m;
    m.scrutinee = scrutinee;
    if (at(Tok::Ident)) m.label = advance().text;
    if (eat(Tok::KwAs)) {
      m.binder = ident("binder after 'as'");
      expect(Tok::KwReturn, "'return'");
      m.motive = expr();
    }
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      m.cases.push_back(case_clause());
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RBrace, "'}'");
    return node(std::move(m), sp);
  }

  SCase case_clause() {
    SCase c;
    c.span = peek().span;
    c.name = ident("constructor name");
    if (at(Tok::LParen)) c.binders = binder_list();
    if (eat(Tok::KwAbsurd)) return c;
    expect(Tok::FatArrow, "'=>' or 'absurd'");
    c.body = expr();
    return c;
  }

  SCocase cocase_clause() {
    SCocase c;
    c.span = peek().span;
    expect(Tok::Dot, "'.'");
    c.name = ident("destructor name");
    if (at(Tok::LParen)) c.binders = binder_list();
    if (eat(Tok::KwAbsurd)) return c;
    expect(Tok::FatArrow, "'=>' or 'absurd'");
    c.body = expr();
    return c;
  }

  std::vector<std::string> binder_list() {
    std::vector<std::string> out;
    expect(Tok::LParen, "'('");
    while (!at(Tok::RParen)) {
      if (at(Tok::Hole)) {
        advance();
        out.push_back("_");
      } else {
        out.push_back(ident("binder"));
      }
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  std::vector<SArg> arg_list() {
    std::vector<SArg> out;
    expect(Tok::LParen, "'('");
    while (!at(Tok::RParen)) {
      SArg a;
      if (at(Tok::Ident) && at(Tok::Assign, 1)) {
        a.name = advance().text;
        advance();  // :=
      }
      a.value = expr();
      out.push_back(std::move(a));
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  SExprPtr atom() {
    const Token& t = peek();
    Span sp = t.span;
    switch (t.kind) {
      case Tok::KwType:
        advance();
        return node(SType{}, sp);
      case Tok::Hole:
        advance();
        return node(SHole{}, sp);
      case Tok::Number: {
        advance();
        return node(SNum{t.number}, sp);
      }
      case Tok::Ident: {
        std::string name = advance().text;
        if (at(Tok::LParen)) return node(SCall{name, arg_list()}, sp);
        return node(SVar{name}, sp);
      }
      case Tok::Backslash: {
        advance();
        SLambda lam;
        lam.dtor = ident("destructor name after '\\'");
        lam.binders = binder_list();
        expect(Tok::FatArrow, "'=>'");
        lam.body = expr();
        return node(std::move(lam), sp);
      }
      case Tok::KwComatch: {
        advance();
        SComatchE cm;
        if (at(Tok::Ident)) cm.label = advance().text;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
          cm.cocases.push_back(cocase_clause());
          if (!eat(Tok::Comma)) break;
        }
        expect(Tok::RBrace, "'}'");
        return node(std::move(cm), sp);
      }
      case Tok::KwLet: {
        advance();
        SLetE le;
        le.name = at(Tok::Hole) ? (advance(), std::string("_")) : ident("let binder");
        if (eat(Tok::Colon)) le.type = expr();
        expect(Tok::Assign, "':='");
        le.bound = expr();
        expect(Tok::Semi, "';'");
        le.body = expr();
        return node(std::move(le), sp);
      }
      case Tok::LParen: {
        advance();
        SExprPtr inner = expr();
        if (eat(Tok::Colon)) {
          SExprPtr ty = expr();
          expect(Tok::RParen, "')'");
          return node(SAnn{inner, ty}, sp);
        }
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail("expected a term");
    }
  }

  // --- declarations ----------------------------------------------------------

  STele tele() {
    STele out;
    if (!at(Tok::LParen)) return out;
    advance();
    while (!at(Tok::RParen)) {
      // `implicit a b: Type` declares several parameters of one type.
      bool implicit = eat(Tok::KwImplicit);
      std::vector<std::pair<std::string, Span>> names;
      do {
        Span sp = peek().span;
        std::string n = at(Tok::Hole) ? (advance(), std::string("_")) : ident("parameter name");
        names.emplace_back(std::move(n), sp);
      } while (at(Tok::Ident) || at(Tok::Hole));
      expect(Tok::Colon, "':'");
      SExprPtr ty = expr();
      for (auto& [n, sp] : names) out.push_back(STeleEntry{implicit, std::move(n), ty, sp});
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RParen, "')'");
    return out;
  }

  // Destructor and definition headers come in three forms:
  //   .name(...)                  anonymous self of the enclosing codata type
  //   Name(args).name(...)        anonymous self, type spelled out
  //   (x: Name(args)).name(...)   named self
  // `enclosing` names the codata block being parsed; empty outside one.
  void self_header(std::string& self_name, std::string& self_type, std::vector<SArg>& self_args,
                   const std::string& enclosing) {
    self_name = "_";
    if (at(Tok::Dot) && !enclosing.empty()) {
      advance();
      self_type = enclosing;
      return;
    }
    if (at(Tok::Ident)) {
      self_type = advance().text;
      if (at(Tok::LParen)) self_args = arg_list();
      expect(Tok::Dot, "'.'");
      return;
    }
    expect(Tok::LParen, "'('");
    if (at(Tok::Hole)) advance();  // anonymous self
    else self_name = ident("self binder");
    expect(Tok::Colon, "':'");
    self_type = ident("type name");
    if (at(Tok::LParen)) self_args = arg_list();
    expect(Tok::RParen, "')'");
    expect(Tok::Dot, "'.'");
  }

  SData data_decl() {
    SData d;
    d.span = peek().span;
    expect(Tok::KwData, "'data'");
    d.name = ident("data type name");
    d.indices = tele();
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      SCtor c;
      c.span = peek().span;
      c.name = ident("constructor name");
      if (at(Tok::LParen)) c.args = tele();
      if (eat(Tok::Colon)) c.result = expr();
      d.ctors.push_back(std::move(c));
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RBrace, "'}'");
    return d;
  }

  SCodata codata_decl() {
    SCodata d;
    d.span = peek().span;
    expect(Tok::KwCodata, "'codata'");
    d.name = ident("codata type name");
    d.indices = tele();
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      SDtorDecl dt;
      dt.span = peek().span;
      self_header(dt.self_name, dt.self_type, dt.self_args, d.name);
      dt.name = ident("destructor name");
      if (at(Tok::LParen)) dt.args = tele();
      expect(Tok::Colon, "':'");
      dt.ret = expr();
      d.dtors.push_back(std::move(dt));
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RBrace, "'}'");
    return d;
  }

  SDef def_decl() {
    SDef d;
    d.span = peek().span;
    expect(Tok::KwDef, "'def'");
    self_header(d.self_name, d.self_type, d.self_args, "");
    d.name = ident("definition name");
    d.params = tele();
    expect(Tok::Colon, "':'");
    d.ret = expr();
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      d.cases.push_back(case_clause());
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RBrace, "'}'");
    return d;
  }

  SCodef codef_decl() {
    SCodef d;
    d.span = peek().span;
    expect(Tok::KwCodef, "'codef'");
    d.name = ident("codefinition name");
    d.params = tele();
    expect(Tok::Colon, "':'");
    d.ret = expr();
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      d.cocases.push_back(cocase_clause());
      if (!eat(Tok::Comma)) break;
    }
    expect(Tok::RBrace, "'}'");
    return d;
  }

  // `let x: T { e }` (brace body) or `let x: T := e;`.
  SLetD let_decl() {
    SLetD d;
    d.span = peek().span;
    expect(Tok::KwLet, "'let'");
    d.name = ident("let binding name");
    expect(Tok::Colon, "':'");
    d.type = expr();
    if (eat(Tok::LBrace)) {
      d.body = expr();
      expect(Tok::RBrace, "'}'");
      eat(Tok::Semi);
      return d;
    }
    expect(Tok::Assign, "':=' or '{'");
    d.body = expr();
    eat(Tok::Semi);
    return d;
  }

  SProgram program() {
    SProgram p;
    while (!at(Tok::End)) {
      switch (peek().kind) {
        case Tok::KwData: p.decls.push_back(data_decl()); break;
        case Tok::KwCodata: p.decls.push_back(codata_decl()); break;
        case Tok::KwDef: p.decls.push_back(def_decl()); break;
        case Tok::KwCodef: p.decls.push_back(codef_decl()); break;
        case Tok::KwLet: p.decls.push_back(let_decl()); break;
        default: fail("expected a declaration");
      }
    }
    return p;
  }
};

}  // namespace

SProgram parse_program(const std::vector<Token>& toks) {
  Parser p{toks};
  return p.program();
}

SExprPtr parse_expr_string(const std::string& src, uint32_t file) {
  auto toks = lex(src, file);
  Parser p{toks};
  SExprPtr e = p.expr();
  if (!p.at(Tok::End)) p.fail("trailing input after term");
  return e;
}

}  // namespace pol::surface
