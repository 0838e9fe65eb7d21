#include "pol/index_unify.hpp"

#include "pol/print.hpp"
#include "pol/subst.hpp"

namespace pol {

namespace {

// Applies new entries on top of an accumulated unifier, keeping the result
// idempotent: earlier images are rewritten by the newer bindings first.
ContextSubst compose(const ContextSubst& newer, const ContextSubst& older) {
  ContextSubst out;
  for (const auto& e : older.entries) out.push(e.var, subst_apply(e.term, newer));
  for (const auto& e : newer.entries) out.push(e.var, e.term);
  return out;
}

struct IdxUnifier {
  std::shared_ptr<const TypingContext> ctx;
  const MetaMap& metas;
  Fuel& fuel;
  std::vector<std::string> trace;

  IdxResult fail(std::string why) {
    return {IdxStatus::Fail, {}, std::move(why), std::move(trace)};
  }
  IdxResult conflict(std::string why) {
    return {IdxStatus::Conflict, {}, std::move(why), std::move(trace)};
  }

  Term reduce(const Term& t) {
    ReductionEnv env = ReductionEnv::over(ctx);
    return nf(t, std::move(env), metas, fuel);
  }

  // True when the variable may stand for an index to solve: a context
  // variable without a definition (let-bound entries were inlined by nf).
  bool solvable_var(const VarRef& v) const {
    if (!ctx) return true;
    const CtxEntry* e = ctx->lookup(v);
    return !e || !e->body;
  }

  IdxResult term(const Term& t1, const Term& t2) {
    Term w1 = reduce(t1);
    Term w2 = reduce(t2);

    // Deletion strictly before solution: x ~ x deletes rather than solves,
    // which is what makes the rule set injective on constructors (axiom K).
    if (alpha_eq(w1, w2)) {
      trace.push_back("deletion");
      return IdxResult::ok({}, std::move(trace));
    }

    if (const VarT* v = term_as<VarT>(w1); v && solvable_var(v->var)) {
      if (free_vars(w2).count(v->var.id)) {
        trace.push_back("cycle");
        return conflict("variable " + v->var.name + " occurs in the other side");
      }
      trace.push_back("solution");
      ContextSubst u;
      u.push(v->var, w2);
      return IdxResult::ok(std::move(u), std::move(trace));
    }
    if (const VarT* v = term_as<VarT>(w2); v && solvable_var(v->var)) {
      if (free_vars(w1).count(v->var.id)) {
        trace.push_back("cycle");
        return conflict("variable " + v->var.name + " occurs in the other side");
      }
      trace.push_back("solution");
      ContextSubst u;
      u.push(v->var, w1);
      return IdxResult::ok(std::move(u), std::move(trace));
    }

    // An unsolved meta head on either side blocks every remaining rule.
    // (Solving a variable *to* a meta-containing term above is fine — the
    // unifier maps context variables, it never solves metas itself.)
    ReductionEnv env = ReductionEnv::over(ctx);
    WhnfInfo c1 = classify_whnf(w1, env, metas);
    WhnfInfo c2 = classify_whnf(w2, env, metas);
    if (c1.cls == WhnfClass::Blocked || c2.cls == WhnfClass::Blocked)
      return fail("unsolved metavariable blocks index unification");

    const CtorT* k1 = term_as<CtorT>(w1);
    const CtorT* k2 = term_as<CtorT>(w2);
    if (k1 && k2) {
      if (k1->name != k2->name) {
        trace.push_back("conflict-ctor");
        return conflict("constructors " + k1->name + " and " + k2->name + " differ");
      }
      trace.push_back("inj-ctor");
      return args(k1->args, k2->args);
    }

    const TyCtorT* tc1 = term_as<TyCtorT>(w1);
    const TyCtorT* tc2 = term_as<TyCtorT>(w2);
    if (tc1 && tc2) {
      if (tc1->name != tc2->name) {
        trace.push_back("conflict-tyctor");
        return conflict("type constructors " + tc1->name + " and " + tc2->name + " differ");
      }
      trace.push_back("inj-tyctor");
      return args(tc1->args, tc2->args);
    }

    if ((k1 && tc2) || (tc1 && k2)) {
      trace.push_back("conflict-ctor-tyctor");
      return conflict("constructor cannot equal a type constructor");
    }

    const ComatchT* cm1 = term_as<ComatchT>(w1);
    const ComatchT* cm2 = term_as<ComatchT>(w2);
    if (cm1 && cm2) {
      if (cm1->label != cm2->label) {
        trace.push_back("conflict-comatch");
        return conflict("comatch labels " + cm1->label.name + " and " + cm2->label.name +
                        " differ");
      }
      trace.push_back("inj-comatch");
      ArgList a1, a2;
      for (const auto& e : cm1->closure) a1.push_back({e.term, false});
      for (const auto& e : cm2->closure) a2.push_back({e.term, false});
      return args(a1, a2);
    }

    // No rule covers the remaining shapes (distinct-headed neutrals,
    // neutral against value, stuck projections): outside the fragment.
    return fail("no rule applies to " + print_term(w1) + " ~ " + print_term(w2));
  }

  IdxResult args(const ArgList& a1, const ArgList& a2) {
    if (a1.size() != a2.size()) return fail("argument lists of different length");
    ContextSubst acc;
    ArgList r1 = a1, r2 = a2;
    for (size_t i = 0; i < r1.size(); ++i) {
      IdxResult r = term(r1[i].term, r2[i].term);
      trace = std::move(r.trace);
      if (r.status != IdxStatus::Unifier) {
        r.trace = std::move(trace);
        return r;
      }
      if (!r.unifier.empty()) {
        for (size_t j = i + 1; j < r1.size(); ++j) {
          r1[j].term = subst_apply(r1[j].term, r.unifier);
          r2[j].term = subst_apply(r2[j].term, r.unifier);
        }
        acc = compose(r.unifier, acc);
      }
    }
    return IdxResult::ok(std::move(acc), std::move(trace));
  }
};

}  // namespace

IdxResult unify_idx(const Term& t1, const Term& t2, std::shared_ptr<const TypingContext> ctx,
                    const MetaMap& metas, Fuel& fuel) {
  IdxUnifier u{std::move(ctx), metas, fuel, {}};
  return u.term(t1, t2);
}

IdxResult unify_idx_args(const ArgList& a1, const ArgList& a2,
                         std::shared_ptr<const TypingContext> ctx, const MetaMap& metas,
                         Fuel& fuel) {
  IdxUnifier u{std::move(ctx), metas, fuel, {}};
  return u.args(a1, a2);
}

}  // namespace pol
