#pragma once

#include <set>

#include "pol/syntax.hpp"

namespace pol {

// Capture-avoiding parallel substitution. Rewrites closures and delayed
// substitutions of (co)matches and metas but never descends into case or
// cocase bodies: their free variables are reachable only through closures.
Term subst_apply(const Term& t, const ContextSubst& subst);

// subst_apply with a singleton substitution.
Term subst_one(const Term& t, const VarRef& v, const Term& replacement);

// Free variables (context variables only; (co)match bodies contribute through
// their closures, binders are removed).
std::set<uint64_t> free_vars(const Term& t);
bool occurs_free(const VarRef& v, const Term& t);

// Free metavariables reachable without entering (co)match bodies.
std::set<uint64_t> free_metas(const Term& t);

// Alpha-equality: consistent renaming of bound variables; labels and
// metavariable names compare by identity; (co)match bodies are not compared
// (equal labels imply shared clause lists).
bool alpha_eq(const Term& a, const Term& b);
bool alpha_eq_args(const ArgList& a, const ArgList& b);

// Structural variant used by round-trip tests: labels, metavariable names and
// free variables are matched up by a bijection built on first encounter.
bool alpha_eq_structural(const Term& a, const Term& b);

// Renaming of binder ids: replaces each domain variable by a fresh copy both
// in binding position and in free occurrences. Used by evaluation when
// entering clause bodies.
struct Renaming {
  std::vector<std::pair<VarRef, VarRef>> pairs;  // old -> fresh
  ContextSubst as_subst() const;
};

}  // namespace pol
