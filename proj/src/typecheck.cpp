#include "pol/typecheck.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

#include "pol/index_unify.hpp"
#include "pol/print.hpp"
#include "pol/subst.hpp"

namespace pol {

Ctx ctx_extend(const Ctx& ctx, CtxEntry e) {
  auto c = ctx ? std::make_shared<TypingContext>(*ctx) : std::make_shared<TypingContext>();
  c->push(std::move(e));
  return c;
}

namespace {

bool recheck_solution(Session& host, const MetaInfo& mi, const Term& sol, std::string& why);

}  // namespace

Session::Session(CheckState& s) : state(s), fuel{s.fuel_budget}, unif(s.metas) {
  unif.fuel = &fuel;
  unif.globals = &s.globals;
  unif.archive = s.archive;
  unif.recheck = [this](const MetaInfo& mi, const Term& sol, std::string& why) {
    return recheck_solution(*this, mi, sol, why);
  };
}

namespace {

std::string show(Session& s, const Term& t) {
  PrintOpts o;
  o.env = &s.state.globals;
  return print_term(t, o);
}

// Head-normalize and quote: reduction-introduced bindings must not escape
// into recorded types (cocase bodies bring the codef's own variables into
// the environment).
Term wh(Session& s, const Ctx& ctx, Term t) {
  return normalize(std::move(t), ReductionEnv::over(ctx), s.state.metas, s.fuel);
}

// Conversion; conflicts become type errors, stuck equations stay pending in
// the session and are retried on wakeups and at the final flush.
void require_conv(Session& s, const Ctx& ctx, const Term& got, const Term& want, Span span,
                  const char* what) {
  ConvResult r = conv(s.unif, ReductionEnv::over(ctx), got, want, span);
  if (r.status == ConvStatus::Conflict)
    throw type_error(r.code,
                     std::string(what) + ": " + show(s, got) + " is not convertible with " +
                         show(s, want) + " (" + r.detail + ")",
                     span);
}

Telescope check_tele(Session& s, Ctx& ctx, const Telescope& tele) {
  Telescope out;
  for (const auto& e : tele) {
    Term ty = check(s, ctx, e.type, mk_universe());
    out.push_back({e.var, ty, e.implicit});
    ctx = ctx_extend(ctx, CtxEntry{e.var, ty, std::nullopt, false});
  }
  return out;
}

struct ArgsResult {
  ArgList args;
  ContextSubst subst;  // telescope var -> elaborated argument
};

// Comatch arguments can only be checked once their expected type is concrete
// enough; when the caller has a scrutinee that will constrain the metas, it
// defers them past the scrutinee and elaborates them afterwards.
struct Deferred {
  size_t idx;
  Term want;
};

bool should_defer(const Term& t) { return kind_of(t) == TermKind::Comatch; }

ArgsResult check_args(Session& s, const Ctx& ctx, const ArgList& args, const Telescope& tele,
                      Span span, const std::string& what,
                      std::vector<Deferred>* defer = nullptr) {
  if (args.size() != tele.size())
    throw type_error("arity", what + " expects " + std::to_string(tele.size()) +
                                  " argument(s), got " + std::to_string(args.size()),
                     span);
  ArgsResult r;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i].implicit != tele[i].implicit)
      throw type_error("arity", what + ": implicitness mismatch at argument " +
                                    std::to_string(i + 1),
                       span);
    Term want = subst_apply(tele[i].type, r.subst);
    if (defer && should_defer(args[i].term)) {
      defer->push_back({i, want});
      r.args.push_back(args[i]);
      r.subst.push(tele[i].var, args[i].term);
      continue;
    }
    Term e = check(s, ctx, args[i].term, want);
    r.args.push_back({e, args[i].implicit});
    r.subst.push(tele[i].var, e);
  }
  return r;
}

void finish_deferred(Session& s, const Ctx& ctx, ArgList& args,
                     const std::vector<Deferred>& defer) {
  for (const Deferred& d : defer) args[d.idx].term = check(s, ctx, args[d.idx].term, d.want);
}

struct ClosResult {
  Closure clos;
  ContextSubst subst;  // telescope/closure var -> elaborated image
};

// Checks closure images against a known telescope (definition parameters or
// a recorded label signature). Domains agree positionally by construction.
ClosResult check_closure_tele(Session& s, const Ctx& ctx, const Closure& clos,
                              const Telescope& tele, Span span, const std::string& what,
                              std::vector<Deferred>* defer = nullptr) {
  if (clos.size() != tele.size())
    throw type_error("arity", what + " expects " + std::to_string(tele.size()) +
                                  " argument(s), got " + std::to_string(clos.size()),
                     span);
  ClosResult r;
  for (size_t i = 0; i < clos.size(); ++i) {
    Term want = subst_apply(tele[i].type, r.subst);
    if (defer && should_defer(clos[i].term)) {
      defer->push_back({i, want});
      r.clos.push_back(clos[i]);
      r.subst.push(tele[i].var, clos[i].term);
      continue;
    }
    Term e = check(s, ctx, clos[i].term, want);
    r.clos.push_back({clos[i].var, e});
    r.subst.push(tele[i].var, e);
  }
  return r;
}

void finish_deferred(Session& s, const Ctx& ctx, Closure& clos,
                     const std::vector<Deferred>& defer) {
  for (const Deferred& d : defer) clos[d.idx].term = check(s, ctx, clos[d.idx].term, d.want);
}

// First encounter of a local label: infer image types and express them over
// the closure variables (earlier variable images are renamed back). The
// resulting telescope is recorded as the label's signature.
ClosResult derive_closure(Session& s, const Ctx& ctx, const Closure& clos, Telescope& sig) {
  ContextSubst back;  // outer variable -> closure variable
  ClosResult r;
  for (const auto& e : clos) {
    Inferred in = infer(s, ctx, e.term);
    sig.push_back({e.var, subst_apply(in.type, back), false});
    r.clos.push_back({e.var, in.term});
    r.subst.push(e.var, in.term);
    if (auto* v = term_as<VarT>(strip_ann(in.term))) back.push(v->var, mk_var(e.var));
  }
  return r;
}

ClosResult label_closure(Session& s, const Ctx& ctx, const Label& label, const Closure& clos,
                         Span span, const Telescope** sig_out) {
  auto it = s.state.label_sigs.find(label.id);
  if (it != s.state.label_sigs.end()) {
    *sig_out = &it->second;
    return check_closure_tele(s, ctx, clos, it->second, span, "label " + label.name);
  }
  Telescope sig;
  ClosResult r = derive_closure(s, ctx, clos, sig);
  auto [pos, _] = s.state.label_sigs.emplace(label.id, std::move(sig));
  *sig_out = &pos->second;
  return r;
}

Ctx ctx_with_tele(const Ctx& ctx, const Telescope& tele) {
  Ctx c = ctx;
  for (const auto& e : tele) c = ctx_extend(c, CtxEntry{e.var, e.type, std::nullopt, false});
  return c;
}

// Installs an index unifier: solved variables become marked let entries, so
// conversion sees the refinement while the variables stay in scope.
Ctx refine_ctx(const Ctx& ctx, const ContextSubst& u) {
  auto c = std::make_shared<TypingContext>(*ctx);
  for (const auto& e : u.entries) {
    for (auto it = c->entries.rbegin(); it != c->entries.rend(); ++it) {
      if (it->var == e.var) {
        it->body = e.term;
        it->marked = true;
        break;
      }
    }
  }
  return c;
}

// Extends the context with case binders typed by the constructor/destructor
// telescope; returns the renaming telescope var -> binder.
Ctx open_binders(Ctx ctx, const std::vector<VarRef>& binders, const Telescope& tele,
                 Span span, const std::string& what, ContextSubst& ren) {
  if (binders.size() != tele.size())
    throw type_error("arity", what + " binds " + std::to_string(binders.size()) +
                                  " variable(s), expected " + std::to_string(tele.size()),
                     span);
  for (size_t i = 0; i < tele.size(); ++i) {
    Term ty = subst_apply(tele[i].type, ren);
    ctx = ctx_extend(ctx, CtxEntry{binders[i], ty, std::nullopt, false});
    ren.push(tele[i].var, mk_var(binders[i]));
  }
  return ctx;
}

ArgList args_of_binders(const std::vector<VarRef>& binders, const Telescope& tele) {
  ArgList out;
  for (size_t i = 0; i < binders.size(); ++i)
    out.push_back({mk_var(binders[i]), tele[i].implicit});
  return out;
}

ArgList subst_args(const ArgList& args, const ContextSubst& su) {
  ArgList out;
  out.reserve(args.size());
  for (const auto& a : args) out.push_back({subst_apply(a.term, su), a.implicit});
  return out;
}

// Checks one match clause against constructor `ctor`. tau: the scrutinee (or
// definition self) indices, scoped over ctx. expected produces the body's
// type given the refined context and the rebuilt constructor pattern.
std::optional<Term> check_case_clause(
    Session& s, Ctx ctx, const CtorDecl& ctor, const Case& cs, const ArgList& tau,
    const std::function<Term(const Ctx&, const Term&)>& expected) {
  ContextSubst ren;
  ctx = open_binders(ctx, cs.binders, ctor.args, cs.span, "case " + cs.ctor, ren);
  ArgList rho = subst_args(ctor.result_args, ren);
  IdxResult u = unify_idx_args(tau, rho, ctx, s.state.metas, s.fuel);
  if (u.status == IdxStatus::Fail)
    throw type_error("index-unify-failed",
                     "cannot decide index equations for case " + cs.ctor + ": " + u.reason,
                     cs.span);
  if (u.status == IdxStatus::Conflict) {
    if (cs.body)
      throw type_error("case-impossible",
                       "case " + cs.ctor + " is impossible (" + u.reason +
                           "); it must be declared absurd",
                       cs.span);
    return std::nullopt;  // absurd case, correctly so
  }
  if (!cs.body)
    throw type_error("absurd-reachable",
                     "case " + cs.ctor + " is declared absurd but its indices unify", cs.span);
  Ctx refined = refine_ctx(ctx, u.unifier);
  Term self_ctor = mk_ctor(cs.ctor, args_of_binders(cs.binders, ctor.args), cs.span);
  return check(s, refined, *cs.body, expected(refined, self_ctor));
}

// Checks one comatch clause against destructor `dtor`. tau: the codata type
// indices. self: the object the clause belongs to (for self-referential
// destructor return types).
std::optional<Term> check_cocase_clause(Session& s, Ctx ctx, const DtorDecl& dtor,
                                        const Cocase& cc, const ArgList& tau, const Term& self) {
  ContextSubst ren;
  ctx = open_binders(ctx, cc.binders, dtor.args, cc.span, "cocase " + cc.dtor, ren);
  ArgList rho = subst_args(dtor.self_args, ren);
  IdxResult u = unify_idx_args(tau, rho, ctx, s.state.metas, s.fuel);
  if (u.status == IdxStatus::Fail)
    throw type_error("index-unify-failed",
                     "cannot decide index equations for cocase " + cc.dtor + ": " + u.reason,
                     cc.span);
  if (u.status == IdxStatus::Conflict) {
    if (cc.body)
      throw type_error("case-impossible",
                       "cocase " + cc.dtor + " is impossible (" + u.reason +
                           "); it must be declared absurd",
                       cc.span);
    return std::nullopt;
  }
  if (!cc.body)
    throw type_error("absurd-reachable",
                     "cocase " + cc.dtor + " is declared absurd but its indices unify", cc.span);
  Ctx refined = refine_ctx(ctx, u.unifier);
  Term want = subst_apply(dtor.ret, ren);
  want = subst_one(want, dtor.self_var, self);
  return check(s, refined, *cc.body, want);
}

// Case list in canonical constructor order, every constructor exactly once.
template <class Decl, class Clause>
std::vector<const Clause*> align_clauses(const std::vector<Decl>& decls,
                                         const std::vector<Clause>& clauses,
                                         const std::string& kind, const std::string& type_name,
                                         Span span,
                                         const std::string& (*clause_name)(const Clause&)) {
  std::vector<const Clause*> out(decls.size(), nullptr);
  for (const auto& c : clauses) {
    bool found = false;
    for (size_t i = 0; i < decls.size(); ++i) {
      if (decls[i].name == clause_name(c)) {
        if (out[i])
          throw type_error("duplicate-case", kind + " " + clause_name(c) + " appears twice",
                           c.span);
        out[i] = &c;
        found = true;
        break;
      }
    }
    if (!found)
      throw type_error(kind == "case" ? "unknown-ctor" : "unknown-dtor",
                       clause_name(c) + " is not a " +
                           (kind == "case" ? "constructor" : "destructor") + " of " + type_name,
                       c.span);
  }
  for (size_t i = 0; i < decls.size(); ++i)
    if (!out[i])
      throw type_error("missing-case", kind + " for " + decls[i].name + " of " + type_name +
                                           " is missing",
                       span);
  return out;
}

const std::string& case_name(const Case& c) { return c.ctor; }
const std::string& cocase_name(const Cocase& c) { return c.dtor; }

Inferred infer_def_call(Session& s, const Ctx& ctx, const Term& t, const MatchT& m,
                        const DefDecl& def) {
  Span span = t.data().span;
  std::vector<Deferred> defer;
  ClosResult cr = check_closure_tele(s, ctx, m.closure, def.params, span, def.label.name,
                                     &defer);
  Term self_ty = mk_tyctor(def.self_type, subst_args(def.self_args, cr.subst), span);
  Term sc = check(s, ctx, m.scrutinee, self_ty);
  finish_deferred(s, ctx, cr.clos, defer);
  Term res = subst_one(subst_apply(def.ret, cr.subst), def.self_var, sc);
  Term out = mk_match(sc, m.label, cr.clos, m.motive_binder, std::nullopt, m.cases, span);
  return {out, res};
}

Inferred infer_codef_call(Session& s, const Ctx& ctx, const Term& t, const ComatchT& cm,
                          const CodefDecl& codef) {
  Span span = t.data().span;
  ClosResult cr = check_closure_tele(s, ctx, cm.closure, codef.params, span, codef.label.name);
  Term res = subst_apply(codef.ret, cr.subst);
  Term out = mk_comatch(cm.label, cr.clos, cm.cocases, span);
  return {out, res};
}

// Local match: in infer mode a motive is mandatory; in check mode a missing
// motive reuses the expected type for every case (refinements apply through
// the marked context entries).
Inferred elab_match(Session& s, const Ctx& ctx, const Term& t, const Term* expected) {
  const MatchT& m = term_get<MatchT>(t);
  Span span = t.data().span;
  if (const DefDecl* def = s.state.globals.find_def_label(m.label))
    return infer_def_call(s, ctx, t, m, *def);

  Inferred sc = infer(s, ctx, m.scrutinee);
  Term sty = wh(s, ctx, sc.type);
  const TyCtorT* tc = term_as<TyCtorT>(strip_ann(sty));
  const DataDecl* data = tc ? s.state.globals.find_data(tc->name) : nullptr;
  if (!data)
    throw type_error("match-non-data",
                     "match scrutinee has type " + show(s, sty) + ", which is not a data type",
                     span);

  const Telescope* sig = nullptr;
  ClosResult cr = label_closure(s, ctx, m.label, m.closure, span, &sig);
  Ctx cctx = ctx_with_tele(ctx, *sig);

  std::optional<Term> motive;
  if (m.motive) {
    Ctx zctx = ctx_extend(cctx, CtxEntry{m.motive_binder, sty, std::nullopt, false});
    motive = check(s, zctx, *m.motive, mk_universe());
  } else if (!expected) {
    throw type_error("cannot-infer", "cannot infer the type of a match without a motive", span);
  }

  auto aligned = align_clauses<CtorDecl, Case>(data->ctors, *m.cases, "case", data->name, span,
                                               case_name);
  CaseList new_cases;
  for (size_t i = 0; i < data->ctors.size(); ++i) {
    const Case& cs = *aligned[i];
    auto body_ty = [&](const Ctx&, const Term& self_ctor) -> Term {
      if (motive) return subst_one(*motive, m.motive_binder, self_ctor);
      return *expected;
    };
    std::optional<Term> body =
        check_case_clause(s, cctx, data->ctors[i], cs, tc->args, body_ty);
    new_cases.push_back(Case{cs.ctor, cs.binders, std::move(body), cs.span});
  }

  Term res_ty;
  if (motive) {
    res_ty = subst_one(subst_apply(*motive, cr.subst), m.motive_binder, sc.term);
  } else {
    res_ty = *expected;
  }
  Term out = mk_match(sc.term, m.label, cr.clos, m.motive_binder, motive,
                      std::make_shared<CaseList>(std::move(new_cases)), span);
  return {out, res_ty};
}

Term check_comatch(Session& s, const Ctx& ctx, const Term& t, const Term& expected) {
  const ComatchT& cm = term_get<ComatchT>(t);
  Span span = t.data().span;
  Term w = wh(s, ctx, expected);
  const TyCtorT* tc = term_as<TyCtorT>(strip_ann(w));
  const CodataDecl* codata = tc ? s.state.globals.find_codata(tc->name) : nullptr;
  if (!codata)
    throw type_error("comatch-non-codata",
                     "comatch checked against " + show(s, w) + ", which is not a codata type",
                     span);

  const Telescope* sig = nullptr;
  ClosResult cr = label_closure(s, ctx, cm.label, cm.closure, span, &sig);
  Ctx cctx = ctx_with_tele(ctx, *sig);
  // The label doubles as the self-reference variable inside the bodies
  // (recursive observations); it carries the comatch's own type.
  cctx = ctx_extend(cctx, CtxEntry{VarRef{cm.label.id, cm.label.name}, w, std::nullopt, false});

  // The self object: same label and closure, original clause list. Labels
  // decide judgmental equality, so this is interchangeable with the result.
  Term self = mk_comatch(cm.label, cr.clos, cm.cocases, span);

  auto aligned = align_clauses<DtorDecl, Cocase>(codata->dtors, *cm.cocases, "cocase",
                                                 codata->name, span, cocase_name);
  CocaseList new_cocases;
  for (size_t i = 0; i < codata->dtors.size(); ++i) {
    const Cocase& cc = *aligned[i];
    std::optional<Term> body =
        check_cocase_clause(s, cctx, codata->dtors[i], cc, tc->args, self);
    new_cocases.push_back(Cocase{cc.dtor, cc.binders, std::move(body), cc.span});
  }
  return mk_comatch(cm.label, cr.clos, std::make_shared<CocaseList>(std::move(new_cocases)),
                    span);
}

bool recheck_solution(Session& host, const MetaInfo& mi, const Term& sol, std::string& why) {
  Session scratch(host.state);
  scratch.unif.allow_solve = false;
  scratch.unif.recheck = nullptr;
  try {
    Ctx c = std::make_shared<TypingContext>(mi.ctx);
    check(scratch, c, sol, mi.type);
  } catch (const TypeError& e) {
    why = e.diag.message;
    return false;
  } catch (const EvalError& e) {
    why = e.diag.message;
    return false;
  }
  // Keep the tentative equations: they are re-verified on wakeups/flush.
  for (auto& p : scratch.unif.postponed) host.unif.postponed.push_back(std::move(p));
  for (auto& ev : scratch.unif.trace) host.unif.trace.push_back(std::move(ev));
  return true;
}

}  // namespace

Inferred infer(Session& s, const Ctx& ctx, const Term& e) {
  Span span = e.data().span;
  switch (kind_of(e)) {
    case TermKind::Var: {
      const auto& v = term_get<VarT>(e);
      const CtxEntry* entry = ctx ? ctx->lookup(v.var) : nullptr;
      if (!entry)
        throw type_error("unbound-var", "variable " + v.var.name + " is not in scope", span);
      return {e, entry->type};
    }
    case TermKind::Universe:
      return {e, mk_universe(span)};
    case TermKind::Ann: {
      const auto& a = term_get<AnnT>(e);
      Term ty = check(s, ctx, a.type, mk_universe());
      Term body = check(s, ctx, a.body, ty);
      return {mk_ann(body, ty, span), ty};
    }
    case TermKind::Let: {
      const auto& l = term_get<LetT>(e);
      Term ty = check(s, ctx, l.type, mk_universe());
      Term bound = check(s, ctx, l.bound, ty);
      Ctx inner = ctx_extend(ctx, CtxEntry{l.var, ty, bound, false});
      Inferred body = infer(s, inner, l.body);
      // strengthen: the let variable may escape through the inferred type
      Term res = subst_one(body.type, l.var, bound);
      return {mk_let(l.var, ty, bound, body.term, span), res};
    }
    case TermKind::TyCtor: {
      const auto& c = term_get<TyCtorT>(e);
      const Telescope* indices = nullptr;
      if (const DataDecl* d = s.state.globals.find_data(c.name)) indices = &d->indices;
      else if (const CodataDecl* cd = s.state.globals.find_codata(c.name)) indices = &cd->indices;
      if (!indices)
        throw type_error("unknown-type", c.name + " is not a declared type", span);
      ArgsResult ar = check_args(s, ctx, c.args, *indices, span, c.name);
      return {mk_tyctor(c.name, std::move(ar.args), span), mk_universe(span)};
    }
    case TermKind::Ctor: {
      const auto& c = term_get<CtorT>(e);
      const DataDecl* owner = nullptr;
      const CtorDecl* ctor = s.state.globals.find_ctor(c.name, &owner);
      if (!ctor)
        throw type_error("unknown-ctor", c.name + " is not a declared constructor", span);
      ArgsResult ar = check_args(s, ctx, c.args, ctor->args, span, c.name);
      Term res = mk_tyctor(owner->name, subst_args(ctor->result_args, ar.subst), span);
      return {mk_ctor(c.name, std::move(ar.args), span), res};
    }
    case TermKind::Dtor: {
      const auto& d = term_get<DtorT>(e);
      const CodataDecl* owner = nullptr;
      const DtorDecl* dtor = s.state.globals.find_dtor(d.name, &owner);
      if (!dtor)
        throw type_error("unknown-dtor", d.name + " is not a declared destructor", span);
      // arguments first: the self type's indices depend on them; comatch
      // arguments wait until the scrutinee has constrained the metas
      std::vector<Deferred> defer;
      ArgsResult ar = check_args(s, ctx, d.args, dtor->args, span, d.name, &defer);
      Term self_ty = mk_tyctor(owner->name, subst_args(dtor->self_args, ar.subst), span);
      Term sc = check(s, ctx, d.scrutinee, self_ty);
      finish_deferred(s, ctx, ar.args, defer);
      Term res = subst_one(subst_apply(dtor->ret, ar.subst), dtor->self_var, sc);
      return {mk_dtor(sc, d.name, std::move(ar.args), span), res};
    }
    case TermKind::Match:
      return elab_match(s, ctx, e, nullptr);
    case TermKind::Comatch: {
      const auto& cm = term_get<ComatchT>(e);
      if (const CodefDecl* codef = s.state.globals.find_codef_label(cm.label))
        return infer_codef_call(s, ctx, e, cm, *codef);
      throw type_error("cannot-infer", "cannot infer the type of a comatch", span);
    }
    case TermKind::Meta: {
      const auto& m = term_get<MetaT>(e);
      const MetaInfo* info = s.state.metas.find(m.name);
      if (!info)
        throw type_error("cannot-infer", "cannot infer the type of a hole", span);
      ContextSubst su;
      for (const auto& d : m.delayed) su.push(d.var, d.term);
      return {e, subst_apply(info->type, su)};
    }
  }
  throw type_error("internal", "unhandled term in infer", span);
}

Term check(Session& s, const Ctx& ctx, const Term& e, const Term& type) {
  Span span = e.data().span;
  switch (kind_of(e)) {
    case TermKind::Let: {
      const auto& l = term_get<LetT>(e);
      Term ty = check(s, ctx, l.type, mk_universe());
      Term bound = check(s, ctx, l.bound, ty);
      Ctx inner = ctx_extend(ctx, CtxEntry{l.var, ty, bound, false});
      Term body = check(s, inner, l.body, type);
      return mk_let(l.var, ty, bound, body, span);
    }
    case TermKind::Match: {
      const MatchT& m = term_get<MatchT>(e);
      bool is_def_call = s.state.globals.find_def_label(m.label) != nullptr;
      Inferred r = elab_match(s, ctx, e, &type);
      if (m.motive || is_def_call)
        require_conv(s, ctx, r.type, type, span, "match result type");
      return r.term;
    }
    case TermKind::Comatch: {
      const auto& cm = term_get<ComatchT>(e);
      if (s.state.globals.find_codef_label(cm.label)) break;  // infer + convert
      return check_comatch(s, ctx, e, type);
    }
    case TermKind::Meta: {
      const auto& m = term_get<MetaT>(e);
      if (!s.state.metas.find(m.name)) {
        // first encounter: register over the current context
        TypingContext snapshot = ctx ? *ctx : TypingContext{};
        s.state.metas.declare(m.name, std::move(snapshot), type);
        s.fresh_metas.push_back(m.name);
        Closure delayed;
        for (const auto& entry : (ctx ? ctx->entries : std::vector<CtxEntry>{}))
          if (!entry.body) delayed.push_back({entry.var, mk_var(entry.var)});
        return mk_meta(m.name, std::move(delayed), span);
      }
      break;  // registered: infer + convert
    }
    default:
      break;
  }
  Inferred r = infer(s, ctx, e);
  require_conv(s, ctx, r.type, type, span, "type mismatch");
  return r.term;
}

namespace {

void zonk_tele(Zonker& z, Telescope& tele) {
  for (auto& e : tele) e.type = z.term(e.type);
}

void zonk_args(Zonker& z, ArgList& args) {
  for (auto& a : args) a.term = z.term(a.term);
}

void wf_data(Session& s, DataDecl& d) {
  Ctx c = s.state.base_ctx;
  d.indices = check_tele(s, c, d.indices);
  for (auto& ctor : d.ctors) {
    Ctx cc = s.state.base_ctx;
    ctor.args = check_tele(s, cc, ctor.args);
    ArgsResult ar = check_args(s, cc, ctor.result_args, d.indices, ctor.span,
                               "result type of " + ctor.name);
    ctor.result_args = std::move(ar.args);
  }
}

void wf_codata(Session& s, CodataDecl& d) {
  Ctx c = s.state.base_ctx;
  d.indices = check_tele(s, c, d.indices);
  for (auto& dtor : d.dtors) {
    Ctx cc = s.state.base_ctx;
    dtor.args = check_tele(s, cc, dtor.args);
    ArgsResult ar = check_args(s, cc, dtor.self_args, d.indices, dtor.span,
                               "self type of " + dtor.name);
    dtor.self_args = std::move(ar.args);
    Ctx cself = ctx_extend(cc, CtxEntry{dtor.self_var,
                                        mk_tyctor(d.name, dtor.self_args, dtor.span),
                                        std::nullopt, false});
    dtor.ret = check(s, cself, dtor.ret, mk_universe());
  }
}

void wf_def(Session& s, DefDecl& def) {
  Ctx c = s.state.base_ctx;
  def.params = check_tele(s, c, def.params);
  const DataDecl* data = s.state.globals.find_data(def.self_type);
  if (!data)
    throw type_error("unknown-type", def.self_type + " is not a data type", def.span);
  ArgsResult ar = check_args(s, c, def.self_args, data->indices, def.span,
                             "self type of " + def.label.name);
  def.self_args = std::move(ar.args);
  Ctx cret = ctx_extend(c, CtxEntry{def.self_var,
                                    mk_tyctor(def.self_type, def.self_args, def.span),
                                    std::nullopt, false});
  def.ret = check(s, cret, def.ret, mk_universe());

  auto aligned = align_clauses<CtorDecl, Case>(data->ctors, *def.cases, "case", data->name,
                                               def.span, case_name);
  CaseList new_cases;
  for (size_t i = 0; i < data->ctors.size(); ++i) {
    const Case& cs = *aligned[i];
    auto body_ty = [&](const Ctx&, const Term& self_ctor) -> Term {
      return subst_one(def.ret, def.self_var, self_ctor);
    };
    std::optional<Term> body =
        check_case_clause(s, c, data->ctors[i], cs, def.self_args, body_ty);
    new_cases.push_back(Case{cs.ctor, cs.binders, std::move(body), cs.span});
  }
  // overwrite contents in place: every call site shares this list
  *def.cases = std::move(new_cases);
}

void wf_codef(Session& s, CodefDecl& codef) {
  Ctx c = s.state.base_ctx;
  codef.params = check_tele(s, c, codef.params);
  codef.ret = check(s, c, codef.ret, mk_universe());
  Term w = wh(s, c, codef.ret);
  const TyCtorT* tc = term_as<TyCtorT>(strip_ann(w));
  const CodataDecl* codata = tc ? s.state.globals.find_codata(tc->name) : nullptr;
  if (!codata)
    throw type_error("comatch-non-codata",
                     codef.label.name + " must produce a codata type, got " + show(s, w),
                     codef.span);

  Closure id_clos;
  for (const auto& p : codef.params) id_clos.push_back({p.var, mk_var(p.var)});
  Term self = mk_comatch(codef.label, id_clos, codef.cocases, codef.span);

  auto aligned = align_clauses<DtorDecl, Cocase>(codata->dtors, *codef.cocases, "cocase",
                                                 codata->name, codef.span, cocase_name);
  CocaseList new_cocases;
  for (size_t i = 0; i < codata->dtors.size(); ++i) {
    const Cocase& cc = *aligned[i];
    std::optional<Term> body =
        check_cocase_clause(s, c, codata->dtors[i], cc, tc->args, self);
    new_cocases.push_back(Cocase{cc.dtor, cc.binders, std::move(body), cc.span});
  }
  *codef.cocases = std::move(new_cocases);
}

void wf_let(Session& s, TopLet& l) {
  Ctx c = s.state.base_ctx;
  l.type = check(s, c, l.type, mk_universe());
  l.body = check(s, c, l.body, l.type);
}

}  // namespace

bool check_decl(CheckState& state, DeclKind kind, size_t index) {
  Session session(state);
  bool ok = true;
  try {
    switch (kind) {
      case DeclKind::Data: wf_data(session, state.globals.datas[index]); break;
      case DeclKind::Codata: wf_codata(session, state.globals.codatas[index]); break;
      case DeclKind::Def: wf_def(session, state.globals.defs[index]); break;
      case DeclKind::Codef: wf_codef(session, state.globals.codefs[index]); break;
      case DeclKind::Let: wf_let(session, state.globals.lets[index]); break;
    }
  } catch (const TypeError& e) {
    state.diags.push_back(e.diag);
    ok = false;
  } catch (const EvalError& e) {
    state.diags.push_back(e.diag);
    ok = false;
  }

  if (ok) {
    try {
      ConvResult fr = flush(session.unif);
      if (fr.status == ConvStatus::Conflict) {
        state.diags.push_back(Diag{Severity::Error, fr.code, fr.detail, fr.span, {}});
        ok = false;
      } else if (fr.status == ConvStatus::Stuck) {
        state.diags.push_back(Diag{Severity::Error, fr.code,
                                   "unsolved constraints: " + fr.detail, fr.span, {}});
        ok = false;
      }
    } catch (const TypeError& e) {
      state.diags.push_back(e.diag);
      ok = false;
    } catch (const EvalError& e) {
      state.diags.push_back(e.diag);
      ok = false;
    }
  }

  if (ok) {
    std::vector<std::string> unsolved;
    for (const auto& name : session.fresh_metas)
      if (!state.metas.solved(name))
        unsolved.push_back("?" + name.hint + "<" + std::to_string(name.id) + ">");
    if (!unsolved.empty()) {
      std::string msg = "unsolved metavariable(s):";
      for (const auto& u : unsolved) msg += " " + u;
      state.diags.push_back(Diag{Severity::Error, "unsolved-meta", msg, Span{}, {}});
      ok = false;
    }
  }

  // freeze regardless of success: later declarations may not solve these
  for (const auto& name : session.fresh_metas)
    if (MetaInfo* mi = state.metas.find(name)) mi->frozen = true;

  if (ok) {
    Zonker z(state.metas);
    switch (kind) {
      case DeclKind::Data: {
        DataDecl& d = state.globals.datas[index];
        zonk_tele(z, d.indices);
        for (auto& ctor : d.ctors) {
          zonk_tele(z, ctor.args);
          zonk_args(z, ctor.result_args);
        }
        break;
      }
      case DeclKind::Codata: {
        CodataDecl& d = state.globals.codatas[index];
        zonk_tele(z, d.indices);
        for (auto& dtor : d.dtors) {
          zonk_tele(z, dtor.args);
          zonk_args(z, dtor.self_args);
          dtor.ret = z.term(dtor.ret);
        }
        break;
      }
      case DeclKind::Def: {
        DefDecl& def = state.globals.defs[index];
        zonk_tele(z, def.params);
        zonk_args(z, def.self_args);
        def.ret = z.term(def.ret);
        auto zonked = z.cases(def.cases);
        *def.cases = *zonked;  // copy: call sites keep sharing this object
        break;
      }
      case DeclKind::Codef: {
        CodefDecl& codef = state.globals.codefs[index];
        zonk_tele(z, codef.params);
        codef.ret = z.term(codef.ret);
        auto zonked = z.cocases(codef.cocases);
        *codef.cocases = *zonked;
        break;
      }
      case DeclKind::Let: {
        TopLet& l = state.globals.lets[index];
        l.type = z.term(l.type);
        l.body = z.term(l.body);
        state.base_ctx = ctx_extend(state.base_ctx, CtxEntry{l.var, l.type, l.body, false});
        break;
      }
    }
  } else if (kind == DeclKind::Let) {
    // keep the name in scope so later declarations do not cascade
    TopLet& l = state.globals.lets[index];
    state.base_ctx = ctx_extend(state.base_ctx, CtxEntry{l.var, l.type, l.body, false});
  }

  for (auto& ev : session.unif.trace) state.trace.push_back(std::move(ev));
  return ok;
}

bool wf_program(CheckState& state) {
  bool ok = true;
  for (const auto& [kind, index] : state.globals.order)
    if (!check_decl(state, kind, index)) ok = false;
  return ok;
}

}  // namespace pol
