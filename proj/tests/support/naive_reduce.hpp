#pragma once

// Reference normalizer used to cross-check the environment machine. Works by
// direct capture-avoiding substitution: lets and (co)match closures are
// substituted into clause bodies at elimination time, nothing is shared, no
// environments or quoting are involved. Deliberately naive and slow.

#include <map>
#include <stdexcept>
#include <string>

#include "pol/subst.hpp"
#include "pol/syntax.hpp"

namespace pol::testsupport {

struct NaiveReducer {
  // Top-level let bodies by variable id; resolved like delta-reduction.
  std::map<uint64_t, Term> top;
  uint64_t steps = 0;
  uint64_t max_steps = 5'000'000;

  void tick() {
    if (++steps > max_steps) throw std::runtime_error("naive reducer: step budget exceeded");
  }

  Term whnf(Term t) {
    for (;;) {
      tick();
      switch (kind_of(t)) {
        case TermKind::Var: {
          auto it = top.find(term_get<VarT>(t).var.id);
          if (it == top.end()) return t;
          t = it->second;
          break;
        }
        case TermKind::Ann:
          t = term_get<AnnT>(t).body;
          break;
        case TermKind::Let: {
          const auto& l = term_get<LetT>(t);
          t = subst_one(l.body, l.var, l.bound);
          break;
        }
        case TermKind::Match: {
          // Copy: t is reassigned below while m's pieces are still needed.
          const MatchT m = term_get<MatchT>(t);
          Term sc = whnf(m.scrutinee);
          if (kind_of(sc) != TermKind::Ctor)
            return mk_match(sc, m.label, m.closure, m.motive_binder, m.motive, m.cases,
                            t.data().span);
          const auto& c = term_get<CtorT>(sc);
          const Case* arm = nullptr;
          for (const auto& a : *m.cases)
            if (a.ctor == c.name) arm = &a;
          if (!arm || !arm->body)
            throw std::runtime_error("naive reducer: no case for " + c.name);
          if (arm->binders.size() != c.args.size())
            throw std::runtime_error("naive reducer: arity mismatch in case " + c.name);
          ContextSubst s;
          for (const auto& e : m.closure) s.push(e.var, e.term);
          for (size_t i = 0; i < arm->binders.size(); ++i)
            s.push(arm->binders[i], c.args[i].term);
          t = subst_apply(*arm->body, s);
          break;
        }
        case TermKind::Dtor: {
          const DtorT d = term_get<DtorT>(t);
          Term sc = whnf(d.scrutinee);
          if (kind_of(sc) != TermKind::Comatch) return mk_dtor(sc, d.name, d.args, t.data().span);
          const auto& cm = term_get<ComatchT>(sc);
          const Cocase* arm = nullptr;
          for (const auto& a : *cm.cocases)
            if (a.dtor == d.name) arm = &a;
          if (!arm || !arm->body)
            throw std::runtime_error("naive reducer: no cocase for " + d.name);
          if (arm->binders.size() != d.args.size())
            throw std::runtime_error("naive reducer: arity mismatch in cocase " + d.name);
          ContextSubst s;
          for (const auto& e : cm.closure) s.push(e.var, e.term);
          // The label doubles as the self variable: substitute the whole
          // comatch for recursive observations.
          s.push(VarRef{cm.label.id, cm.label.name}, sc);
          for (size_t i = 0; i < arm->binders.size(); ++i)
            s.push(arm->binders[i], d.args[i].term);
          t = subst_apply(*arm->body, s);
          break;
        }
        default:
          return t;  // Universe, TyCtor, Ctor, Comatch, Meta
      }
    }
  }

  Term nf(Term t) {
    Term w = strip_ann(whnf(std::move(t)));
    const TermData& d = w.data();
    switch (d.kind()) {
      case TermKind::Var:
      case TermKind::Universe:
        return w;
      case TermKind::TyCtor: {
        const auto& c = std::get<TyCtorT>(d.v);
        return mk_tyctor(c.name, nf_args(c.args), d.span);
      }
      case TermKind::Ctor: {
        const auto& c = std::get<CtorT>(d.v);
        return mk_ctor(c.name, nf_args(c.args), d.span);
      }
      case TermKind::Match: {
        const auto& m = std::get<MatchT>(d.v);
        std::optional<Term> motive;
        if (m.motive) motive = nf(*m.motive);
        return mk_match(nf(m.scrutinee), m.label, nf_closure(m.closure), m.motive_binder,
                        std::move(motive), m.cases, d.span);
      }
      case TermKind::Dtor: {
        const auto& dt = std::get<DtorT>(d.v);
        return mk_dtor(nf(dt.scrutinee), dt.name, nf_args(dt.args), d.span);
      }
      case TermKind::Comatch: {
        const auto& c = std::get<ComatchT>(d.v);
        return mk_comatch(c.label, nf_closure(c.closure), c.cocases, d.span);
      }
      case TermKind::Meta: {
        const auto& m = std::get<MetaT>(d.v);
        return mk_meta(m.name, nf_closure(m.delayed), d.span);
      }
      case TermKind::Ann:
      case TermKind::Let:
        return w;  // unreachable after whnf + strip
    }
    return w;
  }

  ArgList nf_args(const ArgList& args) {
    ArgList out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back({nf(a.term), a.implicit});
    return out;
  }

  Closure nf_closure(const Closure& c) {
    Closure out;
    out.reserve(c.size());
    for (const auto& e : c) out.push_back({e.var, nf(e.term)});
    return out;
  }
};

}  // namespace pol::testsupport
