#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pol/eval.hpp"
#include "pol/syntax.hpp"

namespace pol {

enum class IdxStatus { Unifier, Conflict, Fail };

// Outcome of first-order index unification. Unifier carries an idempotent
// substitution on context variables; Conflict means the equations are
// unsatisfiable; Fail means the problem is outside the decidable fragment.
struct IdxResult {
  IdxStatus status = IdxStatus::Fail;
  ContextSubst unifier;
  std::string reason;               // set for Conflict/Fail
  std::vector<std::string> trace;   // rules applied, in order

  static IdxResult ok(ContextSubst u, std::vector<std::string> trace) {
    return {IdxStatus::Unifier, std::move(u), {}, std::move(trace)};
  }
};

// Unifies two index terms in the given context. Never solves metavariables:
// an unsolved metavariable at a head position yields Fail.
IdxResult unify_idx(const Term& t1, const Term& t2,
                    std::shared_ptr<const TypingContext> ctx, const MetaMap& metas, Fuel& fuel);

// Pointwise unification of two equally long index lists, threading each
// partial unifier through the remaining pairs and composing the results.
IdxResult unify_idx_args(const ArgList& a1, const ArgList& a2,
                         std::shared_ptr<const TypingContext> ctx, const MetaMap& metas,
                         Fuel& fuel);

}  // namespace pol
