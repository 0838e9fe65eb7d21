#pragma once

#include <map>
#include <memory>
#include <vector>

#include "pol/decls.hpp"
#include "pol/eval.hpp"
#include "pol/meta.hpp"
#include "pol/unify.hpp"

namespace pol {

using Ctx = std::shared_ptr<const TypingContext>;

// Extends a context functionally (contexts are shared snapshots).
Ctx ctx_extend(const Ctx& ctx, CtxEntry e);

// Whole-program checking state. The metavariable store, local label
// signatures and the top-level-let context accumulate across declarations;
// each declaration is checked in its own session and frozen afterwards.
struct CheckState {
  GlobalEnv& globals;
  MetaMap metas;
  std::vector<Diag> diags;
  std::vector<TraceEvent> trace;
  std::map<uint64_t, Telescope> label_sigs;  // local (co)match labels
  Ctx base_ctx;                              // top-level lets checked so far
  uint64_t fuel_budget = Fuel::kDefault;
  std::vector<Constraint>* archive = nullptr;  // every root equation, for replay

  explicit CheckState(GlobalEnv& g) : globals(g), base_ctx(std::make_shared<TypingContext>()) {}
};

// One declaration-checking session: its own fuel and constraint store over
// the shared metavariable map.
struct Session {
  CheckState& state;
  Fuel fuel;
  UnifState unif;
  std::vector<MetaName> fresh_metas;  // registered this session, frozen at end

  explicit Session(CheckState& s);
  Session(const Session&) = delete;
};

struct Inferred {
  Term term;  // elaborated: metavariables registered, children rewritten
  Term type;
};

Inferred infer(Session& s, const Ctx& ctx, const Term& e);
Term check(Session& s, const Ctx& ctx, const Term& e, const Term& type);

// Checks one declaration: runs the session, flushes constraints, reports
// unsolved metavariables, freezes them, and writes the zonked declaration
// back into the global environment. False on error (diagnostics collected).
bool check_decl(CheckState& state, DeclKind kind, size_t index);

// Checks every declaration in order. Errors do not stop later declarations.
bool wf_program(CheckState& state);

}  // namespace pol
