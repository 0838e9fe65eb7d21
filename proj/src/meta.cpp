#include "pol/meta.hpp"

#include "pol/subst.hpp"

namespace pol {

namespace {

ArgList zonk_args(Zonker& z, const ArgList& args) {
  ArgList out;
  out.reserve(args.size());
  for (const auto& a : args) out.push_back({z.term(a.term), a.implicit});
  return out;
}

Closure zonk_closure(Zonker& z, const Closure& c) {
  Closure out;
  out.reserve(c.size());
  for (const auto& e : c) out.push_back({e.var, z.term(e.term)});
  return out;
}

}  // namespace

std::shared_ptr<const CaseList> Zonker::cases(const std::shared_ptr<const CaseList>& cs) {
  if (!cs) return cs;
  auto it = case_memo.find(cs.get());
  if (it != case_memo.end()) return it->second;
  auto fresh = std::make_shared<CaseList>();
  // Registered before filling: recursive definitions reach this list again
  // from inside their own bodies.
  case_memo[cs.get()] = fresh;
  for (const auto& c : *cs) {
    Case nc{c.ctor, c.binders, std::nullopt, c.span};
    if (c.body) nc.body = term(*c.body);
    fresh->push_back(std::move(nc));
  }
  return fresh;
}

std::shared_ptr<const CocaseList> Zonker::cocases(const std::shared_ptr<const CocaseList>& cs) {
  if (!cs) return cs;
  auto it = cocase_memo.find(cs.get());
  if (it != cocase_memo.end()) return it->second;
  auto fresh = std::make_shared<CocaseList>();
  cocase_memo[cs.get()] = fresh;
  for (const auto& c : *cs) {
    Cocase nc{c.dtor, c.binders, std::nullopt, c.span};
    if (c.body) nc.body = term(*c.body);
    fresh->push_back(std::move(nc));
  }
  return fresh;
}

Term Zonker::term(const Term& t) {
  if (!t.valid()) return t;
  auto it = term_memo.find(t.raw());
  if (it != term_memo.end()) return it->second;

  Term out;
  Span sp = t.data().span;
  switch (kind_of(t)) {
    case TermKind::Var:
    case TermKind::Universe:
      out = t;
      break;
    case TermKind::Ann: {
      const auto& a = term_get<AnnT>(t);
      out = mk_ann(term(a.body), term(a.type), sp);
      break;
    }
    case TermKind::Let: {
      const auto& l = term_get<LetT>(t);
      out = mk_let(l.var, term(l.type), term(l.bound), term(l.body), sp);
      break;
    }
    case TermKind::TyCtor: {
      const auto& c = term_get<TyCtorT>(t);
      out = mk_tyctor(c.name, zonk_args(*this, c.args), sp);
      break;
    }
    case TermKind::Ctor: {
      const auto& c = term_get<CtorT>(t);
      out = mk_ctor(c.name, zonk_args(*this, c.args), sp);
      break;
    }
    case TermKind::Match: {
      const auto& m = term_get<MatchT>(t);
      std::optional<Term> motive;
      if (m.motive) motive = term(*m.motive);
      out = mk_match(term(m.scrutinee), m.label, zonk_closure(*this, m.closure),
                     m.motive_binder, std::move(motive), cases(m.cases), sp);
      break;
    }
    case TermKind::Dtor: {
      const auto& d = term_get<DtorT>(t);
      out = mk_dtor(term(d.scrutinee), d.name, zonk_args(*this, d.args), sp);
      break;
    }
    case TermKind::Comatch: {
      const auto& c = term_get<ComatchT>(t);
      out = mk_comatch(c.label, zonk_closure(*this, c.closure), cocases(c.cocases), sp);
      break;
    }
    case TermKind::Meta: {
      const auto& m = term_get<MetaT>(t);
      Closure delayed = zonk_closure(*this, m.delayed);
      const MetaInfo* info = metas.find(m.name);
      if (info && info->solution) {
        ContextSubst subst;
        for (auto& e : delayed) subst.push(e.var, e.term);
        out = subst_apply(term(*info->solution), subst);
      } else {
        out = mk_meta(m.name, std::move(delayed), sp);
      }
      break;
    }
  }
  term_memo[t.raw()] = out;
  return out;
}

Term zonk(const Term& t, const MetaMap& metas) {
  Zonker z(metas);
  return z.term(t);
}

}  // namespace pol
