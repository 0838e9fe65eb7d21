#include "pol/eval.hpp"

#include <cassert>
#include <map>

#include "pol/subst.hpp"

namespace pol {

namespace {

const Case* find_case(const CaseList& cases, const std::string& ctor) {
  for (const auto& c : cases)
    if (c.ctor == ctor) return &c;
  return nullptr;
}

const Cocase* find_cocase(const CocaseList& cocases, const std::string& dtor) {
  for (const auto& c : cocases)
    if (c.dtor == dtor) return &c;
  return nullptr;
}

// Installs closure bindings under fresh ids; records old -> fresh pairs.
void bind_closure(ReductionEnv& env, const Closure& closure, Renaming& ren) {
  for (const auto& e : closure) {
    VarRef fresh = fresh_var(e.var.name);
    env.binds.push_back({fresh, e.term, false});
    ren.pairs.push_back({e.var, fresh});
  }
}

void bind_args(ReductionEnv& env, const std::vector<VarRef>& binders, const ArgList& args,
               Renaming& ren, Span span) {
  if (binders.size() != args.size())
    throw eval_error("arity", "clause binder count does not match argument count", span);
  for (size_t i = 0; i < binders.size(); ++i) {
    VarRef fresh = fresh_var(binders[i].name);
    env.binds.push_back({fresh, args[i].term, false});
    ren.pairs.push_back({binders[i], fresh});
  }
}

Term rename_body(const Term& body, const Renaming& ren) {
  if (ren.pairs.empty()) return body;
  return subst_apply(body, ren.as_subst());
}

}  // namespace

std::optional<StepResult> step(const Term& t, ReductionEnv& env, const MetaMap& metas) {
  if (!t.valid()) return std::nullopt;
  const TermData& d = t.data();
  switch (d.kind()) {
    case TermKind::Var: {
      const VarRef& x = std::get<VarT>(d.v).var;
      if (const EnvEntry* e = env.lookup(x)) {
        // A comatch binding unfolds only when the variable itself is the
        // redex; under a destructor COMATCH2 takes it instead.
        return StepResult{e->value, e->comatch_bind ? "env-comatch" : "env1"};
      }
      if (const CtxEntry* c = env.lookup_ctx(x)) {
        if (c->body) return StepResult{*c->body, "env2"};
      }
      return std::nullopt;
    }

    case TermKind::Ann: {
      const auto& a = std::get<AnnT>(d.v);
      if (auto r = step(a.body, env, metas))
        return StepResult{mk_ann(r->term, a.type, d.span), "cng3"};
      return std::nullopt;
    }

    case TermKind::Let: {
      const auto& l = std::get<LetT>(d.v);
      VarRef fresh = fresh_var(l.var.name);
      env.binds.push_back({fresh, l.bound, false});
      Renaming ren;
      ren.pairs.push_back({l.var, fresh});
      return StepResult{rename_body(l.body, ren), "let"};
    }

    case TermKind::Match: {
      const auto& m = std::get<MatchT>(d.v);
      const Term& scrut = strip_ann(m.scrutinee);
      if (const CtorT* k = term_as<CtorT>(scrut)) {
        assert(m.cases);
        const Case* c = find_case(*m.cases, k->name);
        if (!c)
          throw eval_error("missing-case",
                           "match " + m.label.name + " has no case for constructor " + k->name,
                           d.span);
        if (!c->body)
          throw eval_error("stuck-absurd",
                           "match " + m.label.name + " reached absurd case " + k->name, d.span);
        Renaming ren;
        bind_closure(env, m.closure, ren);
        bind_args(env, c->binders, k->args, ren, d.span);
        return StepResult{rename_body(*c->body, ren), "match"};
      }
      if (auto r = step(m.scrutinee, env, metas))
        return StepResult{mk_match(r->term, m.label, m.closure, m.motive_binder, m.motive,
                                   m.cases, d.span),
                          "cng1"};
      return std::nullopt;
    }

    case TermKind::Dtor: {
      const auto& dt = std::get<DtorT>(d.v);
      const Term& head = strip_ann(dt.scrutinee);
      if (const ComatchT* cm = term_as<ComatchT>(head)) {
        // COMATCH1: name the comatch so its bodies can refer to it.
        VarRef self = fresh_var(cm->label.name);
        env.binds.push_back({self, head, true});
        return StepResult{mk_dtor(mk_var(self, d.span), dt.name, dt.args, d.span), "comatch1"};
      }
      if (const VarT* v = term_as<VarT>(head)) {
        const EnvEntry* e = env.lookup(v->var);
        if (e && e->comatch_bind) {
          const ComatchT& cm = term_get<ComatchT>(e->value);
          assert(cm.cocases);
          const Cocase* c = find_cocase(*cm.cocases, dt.name);
          if (!c)
            throw eval_error("missing-case",
                             "comatch " + cm.label.name + " has no cocase for destructor " +
                                 dt.name,
                             d.span);
          if (!c->body)
            throw eval_error("stuck-absurd",
                             "comatch " + cm.label.name + " reached absurd cocase " + dt.name,
                             d.span);
          Renaming ren;
          bind_closure(env, cm.closure, ren);
          bind_args(env, c->binders, dt.args, ren, d.span);
          // Self-references inside the body use the comatch's label name;
          // point them at the binding we were found under.
          ren.pairs.push_back({VarRef{cm.label.id, cm.label.name}, v->var});
          return StepResult{rename_body(*c->body, ren), "comatch2"};
        }
      }
      if (auto r = step(dt.scrutinee, env, metas))
        return StepResult{mk_dtor(r->term, dt.name, dt.args, d.span), "cng2"};
      return std::nullopt;
    }

    case TermKind::Meta: {
      const auto& m = std::get<MetaT>(d.v);
      const MetaInfo* info = metas.find(m.name);
      if (info && info->solution) {
        // Expand the solution under the delayed substitution, installed as
        // ordinary bindings.
        Renaming ren;
        bind_closure(env, m.delayed, ren);
        return StepResult{rename_body(*info->solution, ren), "env-meta"};
      }
      return std::nullopt;
    }

    case TermKind::Universe:
    case TermKind::TyCtor:
    case TermKind::Ctor:
    case TermKind::Comatch:
      return std::nullopt;
  }
  return std::nullopt;
}

Term whnf(Term t, ReductionEnv& env, const MetaMap& metas, Fuel& fuel) {
  while (true) {
    auto r = step(t, env, metas);
    if (!r) return t;
    if (!fuel.spend())
      throw eval_error("fuel-exhausted", "reduction step budget exhausted", t.data().span);
    t = std::move(r->term);
  }
}

WhnfInfo classify_whnf(const Term& t, const ReductionEnv& env, const MetaMap& metas) {
  const Term& s = strip_ann(t);
  const TermData& d = s.data();
  switch (d.kind()) {
    case TermKind::Universe:
    case TermKind::TyCtor:
    case TermKind::Ctor:
    case TermKind::Comatch:
      return {WhnfClass::Value, std::nullopt};
    case TermKind::Meta: {
      const auto& m = std::get<MetaT>(d.v);
      if (!metas.solved(m.name)) return {WhnfClass::Blocked, m.name};
      return {WhnfClass::Value, std::nullopt};  // not in WHNF; caller's bug
    }
    case TermKind::Var:
      return {WhnfClass::Neutral, std::nullopt};
    case TermKind::Dtor:
      return classify_whnf(std::get<DtorT>(d.v).scrutinee, env, metas);
    case TermKind::Match:
      return classify_whnf(std::get<MatchT>(d.v).scrutinee, env, metas);
    case TermKind::Ann:
    case TermKind::Let:
      return {WhnfClass::Neutral, std::nullopt};  // lets cannot survive whnf
  }
  return {WhnfClass::Neutral, std::nullopt};
}

namespace {

struct Quoter {
  const ReductionEnv& env;
  const MetaMap& metas;
  std::map<uint64_t, Term> memo;  // per environment variable

  Term quote_var(const VarRef& x, Span span) {
    if (auto it = memo.find(x.id); it != memo.end()) return it->second;
    const EnvEntry* e = env.lookup(x);
    if (!e) return mk_var(x, span);
    Term q = quote(e->value);
    memo[x.id] = q;
    return q;
  }

  Term quote(const Term& t) {
    const TermData& d = t.data();
    switch (d.kind()) {
      case TermKind::Var:
        return quote_var(std::get<VarT>(d.v).var, d.span);
      case TermKind::Universe:
        return t;
      case TermKind::Ann: {
        const auto& a = std::get<AnnT>(d.v);
        return mk_ann(quote(a.body), quote(a.type), d.span);
      }
      case TermKind::Let: {
        const auto& l = std::get<LetT>(d.v);
        return mk_let(l.var, quote(l.type), quote(l.bound), quote(l.body), d.span);
      }
      case TermKind::TyCtor: {
        const auto& c = std::get<TyCtorT>(d.v);
        return mk_tyctor(c.name, quote_args(c.args), d.span);
      }
      case TermKind::Ctor: {
        const auto& c = std::get<CtorT>(d.v);
        return mk_ctor(c.name, quote_args(c.args), d.span);
      }
      case TermKind::Match: {
        const auto& m = std::get<MatchT>(d.v);
        std::optional<Term> motive;
        if (m.motive) motive = quote(*m.motive);
        return mk_match(quote(m.scrutinee), m.label, quote_closure(m.closure), m.motive_binder,
                        std::move(motive), m.cases, d.span);
      }
      case TermKind::Dtor: {
        const auto& dt = std::get<DtorT>(d.v);
        return mk_dtor(quote(dt.scrutinee), dt.name, quote_args(dt.args), d.span);
      }
      case TermKind::Comatch: {
        const auto& c = std::get<ComatchT>(d.v);
        return mk_comatch(c.label, quote_closure(c.closure), c.cocases, d.span);
      }
      case TermKind::Meta: {
        const auto& m = std::get<MetaT>(d.v);
        return mk_meta(m.name, quote_closure(m.delayed), d.span);
      }
    }
    assert(false && "unreachable");
    return t;
  }

  ArgList quote_args(const ArgList& args) {
    ArgList out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back({quote(a.term), a.implicit});
    return out;
  }

  Closure quote_closure(const Closure& c) {
    Closure out;
    out.reserve(c.size());
    for (const auto& e : c) out.push_back({e.var, quote(e.term)});
    return out;
  }
};

struct DeepNormalizer {
  const MetaMap& metas;
  Fuel& fuel;

  Term go(Term t, ReductionEnv& env) {
    Term w = strip_ann(whnf(std::move(t), env, metas, fuel));
    const TermData& d = w.data();
    switch (d.kind()) {
      case TermKind::Var: {
        // Heads surviving whnf are context variables without bodies; comatch
        // bindings were already unfolded by the variable step rule.
        return w;
      }
      case TermKind::Universe:
        return w;
      case TermKind::TyCtor: {
        const auto& c = std::get<TyCtorT>(d.v);
        return mk_tyctor(c.name, go_args(c.args, env), d.span);
      }
      case TermKind::Ctor: {
        const auto& c = std::get<CtorT>(d.v);
        return mk_ctor(c.name, go_args(c.args, env), d.span);
      }
      case TermKind::Match: {
        const auto& m = std::get<MatchT>(d.v);
        std::optional<Term> motive;
        if (m.motive) motive = go(*m.motive, env);
        return mk_match(go(m.scrutinee, env), m.label, go_closure(m.closure, env),
                        m.motive_binder, std::move(motive), m.cases, d.span);
      }
      case TermKind::Dtor: {
        const auto& dt = std::get<DtorT>(d.v);
        return mk_dtor(go(dt.scrutinee, env), dt.name, go_args(dt.args, env), d.span);
      }
      case TermKind::Comatch: {
        const auto& c = std::get<ComatchT>(d.v);
        return mk_comatch(c.label, go_closure(c.closure, env), c.cocases, d.span);
      }
      case TermKind::Meta: {
        const auto& m = std::get<MetaT>(d.v);
        Closure delayed;
        delayed.reserve(m.delayed.size());
        for (const auto& e : m.delayed) delayed.push_back({e.var, go(e.term, env)});
        return mk_meta(m.name, std::move(delayed), d.span);
      }
      case TermKind::Ann:
      case TermKind::Let:
        return w;  // unreachable after whnf + strip
    }
    return w;
  }

  ArgList go_args(const ArgList& args, ReductionEnv& env) {
    ArgList out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back({go(a.term, env), a.implicit});
    return out;
  }

  Closure go_closure(const Closure& c, ReductionEnv& env) {
    Closure out;
    out.reserve(c.size());
    for (const auto& e : c) out.push_back({e.var, go(e.term, env)});
    return out;
  }
};

}  // namespace

Term quote(const Term& t, const ReductionEnv& env, const MetaMap& metas) {
  Quoter q{env, metas, {}};
  return q.quote(t);
}

Term normalize(Term t, ReductionEnv env, const MetaMap& metas, Fuel& fuel) {
  Term w = whnf(std::move(t), env, metas, fuel);
  return quote(w, env, metas);
}

Term nf(Term t, ReductionEnv env, const MetaMap& metas, Fuel& fuel) {
  DeepNormalizer n{metas, fuel};
  Term deep = n.go(std::move(t), env);
  return quote(deep, env, metas);
}

}  // namespace pol
