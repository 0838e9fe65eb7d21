#pragma once

#include <memory>
#include <optional>

#include "pol/decls.hpp"
#include "pol/meta.hpp"
#include "pol/syntax.hpp"

namespace pol {

// One machine environment binding. Regular bindings (x -> e) are installed by
// LET, MATCH, COMATCH2 and solved-meta expansion; comatch bindings (x ->c cm)
// are installed by COMATCH1 and consumed only when a destructor hits x.
struct EnvEntry {
  VarRef var;
  Term value;
  bool comatch_bind = false;
};

// Machine environment: a typing-context prefix plus append-only bindings.
// Binder ids are freshened every time a binding is installed, so extending
// the environment never shadows anything and weakening is a no-op.
struct ReductionEnv {
  std::shared_ptr<const TypingContext> ctx;  // may be null (closed terms)
  std::vector<EnvEntry> binds;

  static ReductionEnv over(std::shared_ptr<const TypingContext> c) {
    ReductionEnv env;
    env.ctx = std::move(c);
    return env;
  }

  const EnvEntry* lookup(const VarRef& v) const {
    for (auto it = binds.rbegin(); it != binds.rend(); ++it)
      if (it->var == v) return &*it;
    return nullptr;
  }
  const CtxEntry* lookup_ctx(const VarRef& v) const { return ctx ? ctx->lookup(v) : nullptr; }
};

enum class WhnfClass { Value, Neutral, Blocked };

struct WhnfInfo {
  WhnfClass cls = WhnfClass::Value;
  std::optional<MetaName> blocker;  // head metavariable when Blocked
};

struct StepResult {
  Term term;
  const char* rule;  // machine rule that fired, for traces and tests
};

// Single reduction step; returns nullopt when no rule applies (WHNF reached).
// Appends to env when the rule installs bindings. Throws EvalError on a
// missing case or a stuck absurd clause.
std::optional<StepResult> step(const Term& t, ReductionEnv& env, const MetaMap& metas);

// Reduces to weak head normal form. Throws EvalError (fuel-exhausted,
// missing-case, stuck-absurd).
Term whnf(Term t, ReductionEnv& env, const MetaMap& metas, Fuel& fuel);

// Head classification of a WHNF (annotations are stripped transparently).
WhnfInfo classify_whnf(const Term& t, const ReductionEnv& env, const MetaMap& metas);

// Replaces environment-bound variables by their (unreduced) values,
// transitively, without entering (co)match bodies. The result is scoped over
// the typing-context prefix only.
Term quote(const Term& t, const ReductionEnv& env, const MetaMap& metas);

// whnf followed by quote.
Term normalize(Term t, ReductionEnv env, const MetaMap& metas, Fuel& fuel);

// Deep normalization: whnf at every subterm position reachable without
// entering (co)match bodies, quoted back to context scope. Annotations are
// stripped. Used by the metavariable solver and test oracles.
Term nf(Term t, ReductionEnv env, const MetaMap& metas, Fuel& fuel);

}  // namespace pol
