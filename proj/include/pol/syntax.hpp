#pragma once

#include <cassert>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "pol/common.hpp"

namespace pol {

struct TermData;

// Immutable, freely shared term handle.
class Term {
 public:
  Term() = default;
  explicit Term(std::shared_ptr<const TermData> p) : ptr_(std::move(p)) {}

  const TermData& data() const {
    assert(ptr_);
    return *ptr_;
  }
  const TermData* raw() const { return ptr_.get(); }
  bool valid() const { return ptr_ != nullptr; }

 private:
  std::shared_ptr<const TermData> ptr_;
};

// One argument of an application-like form. Mirrors the implicitness flag of
// the telescope position it fills.
struct Arg {
  Term term;
  bool implicit = false;
};
using ArgList = std::vector<Arg>;

// Explicit substitution attached to (co)matches and metavariables:
// ordered var -> term, domain entries distinct.
struct ClosureEntry {
  VarRef var;
  Term term;
};
using Closure = std::vector<ClosureEntry>;

struct Case {
  std::string ctor;
  std::vector<VarRef> binders;
  std::optional<Term> body;  // nullopt = absurd case
  Span span;
};

struct Cocase {
  std::string dtor;
  std::vector<VarRef> binders;
  std::optional<Term> body;  // nullopt = absurd cocase
  Span span;
};

// Case/cocase lists are shared between every expansion site of a top-level
// definition; recursive definitions make the structure cyclic. No core
// operation descends into bodies (free variables flow through closures), so
// the cycle is invisible everywhere except evaluation, which enters exactly
// one clause at a time.
using CaseList = std::vector<Case>;
using CocaseList = std::vector<Cocase>;

struct VarT {
  VarRef var;
};
struct AnnT {
  Term body;
  Term type;
};
struct LetT {
  VarRef var;
  Term type;
  Term bound;
  Term body;
};
struct UniverseT {};
struct TyCtorT {
  std::string name;
  ArgList args;
};
struct CtorT {
  std::string name;
  ArgList args;
};
struct MatchT {
  Term scrutinee;
  Label label;
  Closure closure;
  VarRef motive_binder;
  std::optional<Term> motive;  // scoped under motive_binder
  std::shared_ptr<const CaseList> cases;
};
struct DtorT {
  Term scrutinee;
  std::string name;
  ArgList args;
};
struct ComatchT {
  Label label;  // doubles as the self-reference variable inside bodies
  Closure closure;
  std::shared_ptr<const CocaseList> cocases;
};
struct MetaT {
  MetaName name;
  Closure delayed;  // empty until the typechecker initializes it
};

enum class TermKind { Var, Ann, Let, Universe, TyCtor, Ctor, Match, Dtor, Comatch, Meta };

struct TermData {
  std::variant<VarT, AnnT, LetT, UniverseT, TyCtorT, CtorT, MatchT, DtorT, ComatchT, MetaT> v;
  Span span;

  TermKind kind() const { return static_cast<TermKind>(v.index()); }
};

template <class T>
const T* term_as(const Term& t) {
  if (!t.valid()) return nullptr;
  return std::get_if<T>(&t.data().v);
}
template <class T>
const T& term_get(const Term& t) {
  const T* p = term_as<T>(t);
  assert(p);
  return *p;
}
inline TermKind kind_of(const Term& t) { return t.data().kind(); }

Term mk_var(VarRef v, Span span = {});
Term mk_ann(Term body, Term type, Span span = {});
Term mk_let(VarRef v, Term type, Term bound, Term body, Span span = {});
Term mk_universe(Span span = {});
Term mk_tyctor(std::string name, ArgList args, Span span = {});
Term mk_ctor(std::string name, ArgList args, Span span = {});
Term mk_match(Term scrutinee, Label label, Closure closure, VarRef motive_binder,
              std::optional<Term> motive, std::shared_ptr<const CaseList> cases, Span span = {});
Term mk_dtor(Term scrutinee, std::string name, ArgList args, Span span = {});
Term mk_comatch(Label label, Closure closure, std::shared_ptr<const CocaseList> cocases,
                Span span = {});
Term mk_meta(MetaName name, Closure delayed, Span span = {});

// Strips ascriptions: annotations never block reduction or shape dispatch.
const Term& strip_ann(const Term& t);

// --- Telescopes and typing contexts -------------------------------------

struct TeleEntry {
  VarRef var;
  Term type;
  bool implicit = false;
};
// Grows to the right; each type may mention the variables to its left.
using Telescope = std::vector<TeleEntry>;

struct CtxEntry {
  VarRef var;
  Term type;
  std::optional<Term> body;  // let-bound value, if any
  bool marked = false;       // true when index unification turned it into a let
};

// Closed snoc-list of typed (optionally let-bound) variables.
struct TypingContext {
  std::vector<CtxEntry> entries;

  const CtxEntry* lookup(const VarRef& v) const {
    for (auto it = entries.rbegin(); it != entries.rend(); ++it)
      if (it->var == v) return &*it;
    return nullptr;
  }
  void push(CtxEntry e) { entries.push_back(std::move(e)); }
  size_t size() const { return entries.size(); }
};

// Ordered finite map var -> term (parallel substitution).
struct ContextSubst {
  std::vector<ClosureEntry> entries;

  const Term* lookup(const VarRef& v) const {
    for (const auto& e : entries)
      if (e.var == v) return &e.term;
    return nullptr;
  }
  void push(VarRef v, Term t) { entries.push_back({std::move(v), std::move(t)}); }
  bool empty() const { return entries.empty(); }
  size_t size() const { return entries.size(); }
};

}  // namespace pol
