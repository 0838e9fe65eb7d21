#include "pol/occurrence.hpp"

namespace pol {

namespace {

int rank(OccClass c) {
  switch (c) {
    case OccClass::StronglyRigid: return 2;
    case OccClass::Rigid: return 1;
    case OccClass::Flexible: return 0;
  }
  return 0;
}

// Strongly rigid weakens to rigid when passing under an elimination;
// flexible never recovers.
OccClass weaken(OccClass c) {
  return c == OccClass::StronglyRigid ? OccClass::Rigid : c;
}

// Innermost head of an elimination spine.
const TermData* spine_head(Term t) {
  for (;;) {
    t = strip_ann(t);
    if (auto* d = term_as<DtorT>(t)) {
      t = d->scrutinee;
      continue;
    }
    if (auto* m = term_as<MatchT>(t)) {
      t = m->scrutinee;
      continue;
    }
    return t.raw();
  }
}

bool head_blocked(const Term& t) {
  return spine_head(t)->kind() == TermKind::Meta;
}

struct Walker {
  OccSummary out;
  std::vector<int> path;
  std::optional<MetaName> inside_meta;

  void child(int i, const Term& t, OccClass m) {
    path.push_back(i);
    go(t, m);
    path.pop_back();
  }

  void go(const Term& t, OccClass m) {
    switch (kind_of(t)) {
      case TermKind::Var: {
        const auto& v = *term_as<VarT>(t);
        out.vars.push_back({v.var, m, path, inside_meta});
        out.fv_all.insert(v.var.id);
        if (m == OccClass::StronglyRigid) out.fv_srig.insert(v.var.id);
        if (m != OccClass::Flexible) out.fv_rig.insert(v.var.id);
        return;
      }
      case TermKind::Universe:
        return;
      case TermKind::Ann: {
        const auto& a = *term_as<AnnT>(t);
        child(0, a.body, m);
        child(1, a.type, OccClass::Flexible);  // annotations are erasable
        return;
      }
      case TermKind::Let: {
        // Not part of normal forms; everything here may still reduce away.
        const auto& l = *term_as<LetT>(t);
        child(0, l.type, OccClass::Flexible);
        child(1, l.bound, OccClass::Flexible);
        child(2, l.body, OccClass::Flexible);
        return;
      }
      case TermKind::TyCtor: {
        const auto& c = *term_as<TyCtorT>(t);
        for (size_t i = 0; i < c.args.size(); ++i)
          child(static_cast<int>(i), c.args[i].term, m);
        return;
      }
      case TermKind::Ctor: {
        const auto& c = *term_as<CtorT>(t);
        for (size_t i = 0; i < c.args.size(); ++i)
          child(static_cast<int>(i), c.args[i].term, m);
        return;
      }
      case TermKind::Comatch: {
        const auto& c = *term_as<ComatchT>(t);
        for (size_t i = 0; i < c.closure.size(); ++i)
          child(static_cast<int>(i), c.closure[i].term, m);
        return;  // cocase bodies are invisible to occurrence analysis
      }
      case TermKind::Meta: {
        const auto& mt = *term_as<MetaT>(t);
        out.metas.push_back({mt.name, m, path});
        auto saved = inside_meta;
        inside_meta = mt.name;
        for (size_t i = 0; i < mt.delayed.size(); ++i)
          child(static_cast<int>(i), mt.delayed[i].term, OccClass::Flexible);
        inside_meta = saved;
        return;
      }
      case TermKind::Dtor: {
        const auto& d = *term_as<DtorT>(t);
        OccClass sub = head_blocked(d.scrutinee) ? OccClass::Flexible : weaken(m);
        child(0, d.scrutinee, sub);
        for (size_t i = 0; i < d.args.size(); ++i)
          child(static_cast<int>(i) + 1, d.args[i].term, sub);
        return;
      }
      case TermKind::Match: {
        const auto& mm = *term_as<MatchT>(t);
        OccClass sub = head_blocked(mm.scrutinee) ? OccClass::Flexible : weaken(m);
        child(0, mm.scrutinee, sub);
        int i = 1;
        for (const auto& ce : mm.closure) child(i++, ce.term, sub);
        if (mm.motive) child(i, *mm.motive, sub);
        return;  // case bodies are invisible to occurrence analysis
      }
    }
  }
};

}  // namespace

std::optional<OccClass> OccSummary::strongest_meta_occ(const MetaName& n) const {
  std::optional<OccClass> best;
  for (const auto& m : metas) {
    if (!(m.name == n)) continue;
    if (!best || rank(m.cls) > rank(*best)) best = m.cls;
  }
  return best;
}

OccSummary classify(const Term& e) {
  Walker w;
  w.go(e, OccClass::StronglyRigid);
  return w.out;
}

}  // namespace pol
