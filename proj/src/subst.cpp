#include "pol/subst.hpp"

#include <cassert>
#include <map>

namespace pol {

namespace {

// Drops the binder from the substitution when shadowed. Binder ids are unique
// per source position, so this only matters for re-entrant clause bodies.
ContextSubst drop_binders(const ContextSubst& s, const std::vector<VarRef>& binders) {
  ContextSubst out;
  for (const auto& e : s.entries) {
    bool shadowed = false;
    for (const auto& b : binders)
      if (b == e.var) {
        shadowed = true;
        break;
      }
    if (!shadowed) out.entries.push_back(e);
  }
  return out;
}

}  // namespace

Term subst_apply(const Term& t, const ContextSubst& subst) {
  if (subst.empty() || !t.valid()) return t;
  const TermData& d = t.data();
  switch (d.kind()) {
    case TermKind::Var: {
      const auto& v = std::get<VarT>(d.v);
      if (const Term* r = subst.lookup(v.var)) return *r;
      return t;
    }
    case TermKind::Ann: {
      const auto& a = std::get<AnnT>(d.v);
      return mk_ann(subst_apply(a.body, subst), subst_apply(a.type, subst), d.span);
    }
    case TermKind::Let: {
      const auto& l = std::get<LetT>(d.v);
      ContextSubst inner = drop_binders(subst, {l.var});
      return mk_let(l.var, subst_apply(l.type, subst), subst_apply(l.bound, subst),
                    subst_apply(l.body, inner), d.span);
    }
    case TermKind::Universe:
      return t;
    case TermKind::TyCtor: {
      const auto& c = std::get<TyCtorT>(d.v);
      ArgList args;
      args.reserve(c.args.size());
      for (const auto& a : c.args) args.push_back({subst_apply(a.term, subst), a.implicit});
      return mk_tyctor(c.name, std::move(args), d.span);
    }
    case TermKind::Ctor: {
      const auto& c = std::get<CtorT>(d.v);
      ArgList args;
      args.reserve(c.args.size());
      for (const auto& a : c.args) args.push_back({subst_apply(a.term, subst), a.implicit});
      return mk_ctor(c.name, std::move(args), d.span);
    }
    case TermKind::Match: {
      const auto& m = std::get<MatchT>(d.v);
      Closure closure;
      closure.reserve(m.closure.size());
      for (const auto& e : m.closure) closure.push_back({e.var, subst_apply(e.term, subst)});
      std::optional<Term> motive;
      if (m.motive) {
        ContextSubst inner = drop_binders(subst, {m.motive_binder});
        motive = subst_apply(*m.motive, inner);
      }
      return mk_match(subst_apply(m.scrutinee, subst), m.label, std::move(closure),
                      m.motive_binder, std::move(motive), m.cases, d.span);
    }
    case TermKind::Dtor: {
      const auto& dt = std::get<DtorT>(d.v);
      ArgList args;
      args.reserve(dt.args.size());
      for (const auto& a : dt.args) args.push_back({subst_apply(a.term, subst), a.implicit});
      return mk_dtor(subst_apply(dt.scrutinee, subst), dt.name, std::move(args), d.span);
    }
    case TermKind::Comatch: {
      const auto& c = std::get<ComatchT>(d.v);
      Closure closure;
      closure.reserve(c.closure.size());
      for (const auto& e : c.closure) closure.push_back({e.var, subst_apply(e.term, subst)});
      return mk_comatch(c.label, std::move(closure), c.cocases, d.span);
    }
    case TermKind::Meta: {
      const auto& m = std::get<MetaT>(d.v);
      Closure delayed;
      delayed.reserve(m.delayed.size());
      for (const auto& e : m.delayed) delayed.push_back({e.var, subst_apply(e.term, subst)});
      return mk_meta(m.name, std::move(delayed), d.span);
    }
  }
  assert(false && "unreachable");
  return t;
}

Term subst_one(const Term& t, const VarRef& v, const Term& replacement) {
  ContextSubst s;
  s.push(v, replacement);
  return subst_apply(t, s);
}

namespace {

void collect_free(const Term& t, std::set<uint64_t>& bound, std::set<uint64_t>& out) {
  if (!t.valid()) return;
  const TermData& d = t.data();
  switch (d.kind()) {
    case TermKind::Var: {
      const auto& v = std::get<VarT>(d.v);
      if (!bound.count(v.var.id)) out.insert(v.var.id);
      return;
    }
    case TermKind::Ann: {
      const auto& a = std::get<AnnT>(d.v);
      collect_free(a.body, bound, out);
      collect_free(a.type, bound, out);
      return;
    }
    case TermKind::Let: {
      const auto& l = std::get<LetT>(d.v);
      collect_free(l.type, bound, out);
      collect_free(l.bound, bound, out);
      bool inserted = bound.insert(l.var.id).second;
      collect_free(l.body, bound, out);
      if (inserted) bound.erase(l.var.id);
      return;
    }
    case TermKind::Universe:
      return;
    case TermKind::TyCtor:
      for (const auto& a : std::get<TyCtorT>(d.v).args) collect_free(a.term, bound, out);
      return;
    case TermKind::Ctor:
      for (const auto& a : std::get<CtorT>(d.v).args) collect_free(a.term, bound, out);
      return;
    case TermKind::Match: {
      const auto& m = std::get<MatchT>(d.v);
      collect_free(m.scrutinee, bound, out);
      for (const auto& e : m.closure) collect_free(e.term, bound, out);
      if (m.motive) {
        bool inserted = bound.insert(m.motive_binder.id).second;
        collect_free(*m.motive, bound, out);
        if (inserted) bound.erase(m.motive_binder.id);
      }
      return;  // bodies contribute only through the closure
    }
    case TermKind::Dtor: {
      const auto& dt = std::get<DtorT>(d.v);
      collect_free(dt.scrutinee, bound, out);
      for (const auto& a : dt.args) collect_free(a.term, bound, out);
      return;
    }
    case TermKind::Comatch:
      for (const auto& e : std::get<ComatchT>(d.v).closure) collect_free(e.term, bound, out);
      return;
    case TermKind::Meta:
      for (const auto& e : std::get<MetaT>(d.v).delayed) collect_free(e.term, bound, out);
      return;
  }
}

void collect_metas(const Term& t, std::set<uint64_t>& out) {
  if (!t.valid()) return;
  const TermData& d = t.data();
  switch (d.kind()) {
    case TermKind::Var:
    case TermKind::Universe:
      return;
    case TermKind::Ann: {
      const auto& a = std::get<AnnT>(d.v);
      collect_metas(a.body, out);
      collect_metas(a.type, out);
      return;
    }
    case TermKind::Let: {
      const auto& l = std::get<LetT>(d.v);
      collect_metas(l.type, out);
      collect_metas(l.bound, out);
      collect_metas(l.body, out);
      return;
    }
    case TermKind::TyCtor:
      for (const auto& a : std::get<TyCtorT>(d.v).args) collect_metas(a.term, out);
      return;
    case TermKind::Ctor:
      for (const auto& a : std::get<CtorT>(d.v).args) collect_metas(a.term, out);
      return;
    case TermKind::Match: {
      const auto& m = std::get<MatchT>(d.v);
      collect_metas(m.scrutinee, out);
      for (const auto& e : m.closure) collect_metas(e.term, out);
      if (m.motive) collect_metas(*m.motive, out);
      return;
    }
    case TermKind::Dtor: {
      const auto& dt = std::get<DtorT>(d.v);
      collect_metas(dt.scrutinee, out);
      for (const auto& a : dt.args) collect_metas(a.term, out);
      return;
    }
    case TermKind::Comatch:
      for (const auto& e : std::get<ComatchT>(d.v).closure) collect_metas(e.term, out);
      return;
    case TermKind::Meta: {
      const auto& m = std::get<MetaT>(d.v);
      out.insert(m.name.id);
      for (const auto& e : m.delayed) collect_metas(e.term, out);
      return;
    }
  }
}

}  // namespace

std::set<uint64_t> free_vars(const Term& t) {
  std::set<uint64_t> bound, out;
  collect_free(t, bound, out);
  return out;
}

bool occurs_free(const VarRef& v, const Term& t) { return free_vars(t).count(v.id) != 0; }

std::set<uint64_t> free_metas(const Term& t) {
  std::set<uint64_t> out;
  collect_metas(t, out);
  return out;
}

namespace {

// Bound-variable correspondence for alpha comparison.
struct VarCorr {
  std::vector<std::pair<uint64_t, uint64_t>> pairs;

  bool related(uint64_t a, uint64_t b) const {
    // Innermost binding wins on either side.
    for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
      if (it->first == a || it->second == b) return it->first == a && it->second == b;
    }
    return a == b;  // both free: identity
  }
  void push(uint64_t a, uint64_t b) { pairs.push_back({a, b}); }
  void pop() { pairs.pop_back(); }
};

// Optional bijections for the structural comparison mode.
struct StructMaps {
  std::map<uint64_t, uint64_t> labels, labels_rev;
  std::map<uint64_t, uint64_t> metas, metas_rev;
  std::map<uint64_t, uint64_t> vars, vars_rev;  // free variables

  bool relate(std::map<uint64_t, uint64_t>& fwd, std::map<uint64_t, uint64_t>& rev, uint64_t a,
              uint64_t b) {
    auto f = fwd.find(a);
    auto r = rev.find(b);
    if (f == fwd.end() && r == rev.end()) {
      fwd[a] = b;
      rev[b] = a;
      return true;
    }
    return f != fwd.end() && r != rev.end() && f->second == b && r->second == a;
  }
};

bool alpha_rec(const Term& ta, const Term& tb, VarCorr& corr, StructMaps* sm);

bool alpha_args(const ArgList& a, const ArgList& b, VarCorr& corr, StructMaps* sm) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].implicit != b[i].implicit) return false;
    if (!alpha_rec(a[i].term, b[i].term, corr, sm)) return false;
  }
  return true;
}

bool alpha_closure(const Closure& a, const Closure& b, VarCorr& corr, StructMaps* sm) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    // Closure domains name variables inside the (shared) bodies; compare by
    // identity unless running structurally.
    if (sm) {
      if (!sm->relate(sm->vars, sm->vars_rev, a[i].var.id, b[i].var.id)) return false;
    } else if (a[i].var != b[i].var) {
      return false;
    }
    if (!alpha_rec(a[i].term, b[i].term, corr, sm)) return false;
  }
  return true;
}

bool alpha_var(uint64_t a, uint64_t b, VarCorr& corr, StructMaps* sm) {
  if (sm) {
    // Bound correspondence first, then the free-variable bijection.
    for (auto it = corr.pairs.rbegin(); it != corr.pairs.rend(); ++it)
      if (it->first == a || it->second == b) return it->first == a && it->second == b;
    return sm->relate(sm->vars, sm->vars_rev, a, b);
  }
  return corr.related(a, b);
}

bool alpha_rec(const Term& ta, const Term& tb, VarCorr& corr, StructMaps* sm) {
  if (!ta.valid() || !tb.valid()) return ta.valid() == tb.valid();
  if (ta.raw() == tb.raw() && corr.pairs.empty() && !sm) return true;
  const TermData& da = ta.data();
  const TermData& db = tb.data();
  if (da.kind() != db.kind()) return false;
  switch (da.kind()) {
    case TermKind::Var:
      return alpha_var(std::get<VarT>(da.v).var.id, std::get<VarT>(db.v).var.id, corr, sm);
    case TermKind::Ann: {
      const auto& a = std::get<AnnT>(da.v);
      const auto& b = std::get<AnnT>(db.v);
      return alpha_rec(a.body, b.body, corr, sm) && alpha_rec(a.type, b.type, corr, sm);
    }
    case TermKind::Let: {
      const auto& a = std::get<LetT>(da.v);
      const auto& b = std::get<LetT>(db.v);
      if (!alpha_rec(a.type, b.type, corr, sm) || !alpha_rec(a.bound, b.bound, corr, sm))
        return false;
      corr.push(a.var.id, b.var.id);
      bool ok = alpha_rec(a.body, b.body, corr, sm);
      corr.pop();
      return ok;
    }
    case TermKind::Universe:
      return true;
    case TermKind::TyCtor: {
      const auto& a = std::get<TyCtorT>(da.v);
      const auto& b = std::get<TyCtorT>(db.v);
      return a.name == b.name && alpha_args(a.args, b.args, corr, sm);
    }
    case TermKind::Ctor: {
      const auto& a = std::get<CtorT>(da.v);
      const auto& b = std::get<CtorT>(db.v);
      return a.name == b.name && alpha_args(a.args, b.args, corr, sm);
    }
    case TermKind::Match: {
      const auto& a = std::get<MatchT>(da.v);
      const auto& b = std::get<MatchT>(db.v);
      if (sm) {
        if (!sm->relate(sm->labels, sm->labels_rev, a.label.id, b.label.id)) return false;
      } else if (a.label != b.label) {
        return false;
      }
      if (!alpha_rec(a.scrutinee, b.scrutinee, corr, sm)) return false;
      if (!alpha_closure(a.closure, b.closure, corr, sm)) return false;
      if (a.motive.has_value() != b.motive.has_value()) return false;
      if (a.motive) {
        corr.push(a.motive_binder.id, b.motive_binder.id);
        bool ok = alpha_rec(*a.motive, *b.motive, corr, sm);
        corr.pop();
        if (!ok) return false;
      }
      return true;
    }
    case TermKind::Dtor: {
      const auto& a = std::get<DtorT>(da.v);
      const auto& b = std::get<DtorT>(db.v);
      return a.name == b.name && alpha_rec(a.scrutinee, b.scrutinee, corr, sm) &&
             alpha_args(a.args, b.args, corr, sm);
    }
    case TermKind::Comatch: {
      const auto& a = std::get<ComatchT>(da.v);
      const auto& b = std::get<ComatchT>(db.v);
      if (sm) {
        if (!sm->relate(sm->labels, sm->labels_rev, a.label.id, b.label.id)) return false;
      } else if (a.label != b.label) {
        return false;
      }
      return alpha_closure(a.closure, b.closure, corr, sm);
    }
    case TermKind::Meta: {
      const auto& a = std::get<MetaT>(da.v);
      const auto& b = std::get<MetaT>(db.v);
      if (sm) {
        if (!sm->relate(sm->metas, sm->metas_rev, a.name.id, b.name.id)) return false;
      } else if (a.name != b.name) {
        return false;
      }
      return alpha_closure(a.delayed, b.delayed, corr, sm);
    }
  }
  assert(false && "unreachable");
  return false;
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
  VarCorr corr;
  return alpha_rec(a, b, corr, nullptr);
}

bool alpha_eq_args(const ArgList& a, const ArgList& b) {
  VarCorr corr;
  return alpha_args(a, b, corr, nullptr);
}

bool alpha_eq_structural(const Term& a, const Term& b) {
  VarCorr corr;
  StructMaps sm;
  return alpha_rec(a, b, corr, &sm);
}

ContextSubst Renaming::as_subst() const {
  ContextSubst s;
  for (const auto& [from, to] : pairs) s.push(from, mk_var(to));
  return s;
}

}  // namespace pol
