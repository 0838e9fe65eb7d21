#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pol/decls.hpp"
#include "pol/syntax.hpp"

namespace pol::surface {

// --- tokens ---------------------------------------------------------------

enum class Tok {
  Ident, Number, Hole,
  KwData, KwCodata, KwDef, KwCodef, KwLet, KwMatch, KwAs, KwReturn, KwAbsurd,
  KwComatch, KwImplicit, KwType,
  LParen, RParen, LBrace, RBrace, Comma, Colon, Semi, Dot, Backslash,
  Assign,    // :=
  FatArrow,  // =>
  Arrow,     // ->
  End,
};

struct Token {
  Tok kind;
  std::string text;
  uint64_t number = 0;
  Span span;
};

// Throws TypeError{code="lex-error"} on malformed input.
std::vector<Token> lex(const std::string& src, uint32_t file);

// --- surface syntax --------------------------------------------------------

struct SExpr;
using SExprPtr = std::shared_ptr<SExpr>;

struct SArg {
  std::optional<std::string> name;  // named argument `x := e`
  SExprPtr value;
};

struct STeleEntry {
  bool implicit = false;
  std::string name;
  SExprPtr type;
  Span span;
};
using STele = std::vector<STeleEntry>;

struct SCase {
  std::string name;
  std::vector<std::string> binders;
  std::optional<SExprPtr> body;  // nullopt = absurd
  Span span;
};

struct SCocase {
  std::string name;
  std::vector<std::string> binders;
  std::optional<SExprPtr> body;
  Span span;
};

struct SVar { std::string name; };
struct SCall { std::string name; std::vector<SArg> args; };
struct SNum { uint64_t value = 0; };
struct SHole {};
struct SType {};
struct SAnn { SExprPtr body, type; };
struct SArrow { SExprPtr from, to; };
struct SLetE { std::string name; std::optional<SExprPtr> type; SExprPtr bound, body; };
struct SDtorE { SExprPtr scrutinee; std::string name; std::vector<SArg> args; };
struct SMatchE {
  SExprPtr scrutinee;
  std::optional<std::string> label;
  std::optional<std::string> binder;  // `as z return motive`
  SExprPtr motive;                    // null unless binder set
  std::vector<SCase> cases;
};
struct SComatchE {
  std::optional<std::string> label;
  std::vector<SCocase> cocases;
};
struct SLambda { std::string dtor; std::vector<std::string> binders; SExprPtr body; };

struct SExpr {
  std::variant<SVar, SCall, SNum, SHole, SType, SAnn, SArrow, SLetE, SDtorE, SMatchE, SComatchE,
               SLambda>
      v;
  Span span;
};

// --- declarations ----------------------------------------------------------

struct SCtor {
  std::string name;
  STele args;
  std::optional<SExprPtr> result;  // applied data type; optional when no indices
  Span span;
};

struct SData {
  std::string name;
  STele indices;
  std::vector<SCtor> ctors;
  Span span;
};

struct SDtorDecl {
  std::string self_name;
  std::string self_type;
  std::vector<SArg> self_args;
  std::string name;
  STele args;
  SExprPtr ret;
  Span span;
};

struct SCodata {
  std::string name;
  STele indices;
  std::vector<SDtorDecl> dtors;
  Span span;
};

struct SDef {
  std::string self_name;
  std::string self_type;
  std::vector<SArg> self_args;
  std::string name;
  STele params;
  SExprPtr ret;
  std::vector<SCase> cases;
  Span span;
};

struct SCodef {
  std::string name;
  STele params;
  SExprPtr ret;
  std::vector<SCocase> cocases;
  Span span;
};

struct SLetD {
  std::string name;
  SExprPtr type;
  SExprPtr body;
  Span span;
};

using SDecl = std::variant<SData, SCodata, SDef, SCodef, SLetD>;

struct SProgram {
  std::vector<SDecl> decls;
};

// Throws TypeError{code="parse-error"} with the offending span.
SProgram parse_program(const std::vector<Token>& toks);
SExprPtr parse_expr_string(const std::string& src, uint32_t file = 0);

// --- desugaring ------------------------------------------------------------

// Appends the program's declarations to the global environment, resolving
// names sequentially (a declaration sees only what precedes it). Local
// (co)matches get fresh labels and closures over exactly the local variables
// their bodies and motive use; definition calls expand to label-sharing
// (co)match nodes. Throws TypeError on scope errors.
void desugar_program(GlobalEnv& globals, const SProgram& prog);

// Desugars one expression in the scope of the given globals (top-level lets
// visible). For tests and the `run` driver.
Term desugar_expr_in(GlobalEnv& globals, const SExprPtr& e);

}  // namespace pol::surface
