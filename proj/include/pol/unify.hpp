#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pol/eval.hpp"
#include "pol/meta.hpp"
#include "pol/syntax.hpp"

namespace pol {

struct GlobalEnv;

enum class ConvStatus { Ok, Conflict, Stuck };

struct ConvResult {
  ConvStatus status = ConvStatus::Ok;
  std::string code;    // diagnostic code on Conflict
  std::string detail;  // human-readable mismatch
  std::set<uint64_t> blockers;  // unsolved metavariable ids on Stuck
  Span span;

  bool ok() const { return status == ConvStatus::Ok; }
};

struct TraceEvent {
  std::string rule;
  std::string text;
};

// One suspended equation. Both sides share the environment: reducing the left
// side may install bindings the right side then reuses.
struct Constraint {
  uint64_t id = 0;
  ReductionEnv env;
  Term lhs, rhs;
  std::set<uint64_t> blockers;  // metavariable ids this constraint waits on
  Span span;
};

// Typechecks a candidate solution against the metavariable's registered type;
// sets `why` and returns false to reject.
using SolutionCheck = std::function<bool(const MetaInfo&, const Term&, std::string&)>;

// Constraint store for one declaration-checking session. The MetaMap outlives
// the session (solutions and frozen flags persist across declarations).
struct UnifState {
  MetaMap& metas;
  Fuel* fuel = nullptr;
  const GlobalEnv* globals = nullptr;  // printing only
  SolutionCheck recheck;
  bool allow_solve = true;  // false inside solution rechecking (no side effects)
  std::vector<Constraint>* archive = nullptr;  // records every root equation for replay
  std::deque<Constraint> queue;
  std::vector<Constraint> postponed;
  std::vector<TraceEvent> trace;
  uint64_t next_id = 1;

  explicit UnifState(MetaMap& m) : metas(m) {}
};

// Decides convertibility of two terms under the environment, solving
// metavariables along the way. Ok discharges every equation this call
// created; Stuck means some were postponed (they stay in the state and are
// retried whenever a blocker is solved, and once more by flush).
ConvResult conv(UnifState& st, const ReductionEnv& env, Term lhs, Term rhs, Span span = {});

// End-of-session sweep: requeues every postponed constraint and drains the
// queue. Anything still postponed afterwards is genuinely stuck.
ConvResult flush(UnifState& st);

// --- solver subroutines (exposed for tests) ------------------------------

struct OccursVerdict {
  enum class Kind { Ok, Blocked, Fail };
  Kind kind = Kind::Ok;
  std::set<uint64_t> blockers;
  std::string code, detail;
};

// Scope and occurs check of a candidate equation alpha[theta] = rhs, where
// img is the set of variable ids theta maps to and rhs is deep-normal.
// Fail: rhs has a rigid variable outside img, or alpha occurs strongly
// rigidly. Blocked: offending occurrences are flexible and may disappear.
OccursVerdict occurs(const MetaName& alpha, const std::set<uint64_t>& img, const Term& rhs);

// Inverts a variable renaming on rhs (every free variable of rhs must be in
// the image). nullopt when the renaming restricted to those variables is not
// injective.
std::optional<Term> invert(const Closure& theta, const Term& rhs);

struct PruneOutcome {
  bool changed = false;       // some metavariable context was narrowed
  bool flex_failure = false;  // an out-of-scope variable occurs flexibly inside
};

// Narrows metavariables occurring rigidly in rhs whose delayed substitutions
// carry entries that cannot stay in scope (image is a neutral spine headed by
// a variable outside img). Commits the narrowing as a solution; the caller
// re-normalizes rhs to see the effect.
PruneOutcome prune(UnifState& st, const std::set<uint64_t>& img, const Term& rhs_nf);

// alpha[th1] = alpha[th2] with both sides variable renamings: keeps the
// subcontext where they agree and replaces alpha by a narrower metavariable.
// Returns false when inapplicable (caller postpones).
bool same_meta(UnifState& st, const MetaName& alpha, const Closure& th1, const Closure& th2,
               const ReductionEnv& env);

enum class SolveKind { Solved, Postponed, Failed, NotApplicable };
struct SolveRes {
  SolveKind kind = SolveKind::NotApplicable;
  std::set<uint64_t> blockers;
  std::string code, detail;
};

// Attempts the metavariable rules on one constraint. quick works on quoted
// (unreduced) terms and reports NotApplicable instead of failing, so the
// caller falls back to the reduced attempt.
SolveRes solve_one(UnifState& st, Constraint& c, bool quick);

// Requeues postponed constraints blocked on the given metavariable.
void wake(UnifState& st, uint64_t solved_meta_id);

}  // namespace pol
