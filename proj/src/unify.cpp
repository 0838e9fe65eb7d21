#include "pol/unify.hpp"

#include <cassert>
#include <map>

#include "pol/occurrence.hpp"
#include "pol/print.hpp"
#include "pol/subst.hpp"

namespace pol {

namespace {

std::string meta_str(const MetaName& n) {
  std::string s = "?";
  if (!n.hint.empty()) s += n.hint;
  s += "<" + std::to_string(n.id) + ">";
  return s;
}

std::string show(const UnifState& st, const Term& t) {
  PrintOpts opts;
  opts.env = st.globals;
  opts.show_meta_subst = true;
  opts.show_implicit = true;
  return print_term(t, opts);
}

std::string show_pair(const UnifState& st, const Term& a, const Term& b) {
  return show(st, a) + " =? " + show(st, b);
}

void trace(UnifState& st, std::string rule, std::string text) {
  st.trace.push_back({std::move(rule), std::move(text)});
}

Term spine_head(Term t) {
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
    return t;
  }
}

void head_blockers(const UnifState& st, const Term& t, std::set<uint64_t>& out) {
  Term h = spine_head(t);
  if (auto* m = term_as<MetaT>(h))
    if (!st.metas.solved(m->name)) out.insert(m->name.id);
}

bool is_renaming(const Closure& theta) {
  for (const auto& e : theta)
    if (!term_as<VarT>(strip_ann(e.term))) return false;
  return true;
}

std::set<uint64_t> renaming_img(const Closure& theta) {
  std::set<uint64_t> img;
  for (const auto& e : theta) img.insert(term_get<VarT>(strip_ann(e.term)).var.id);
  return img;
}

bool intersects(const std::set<uint64_t>& a, const std::set<uint64_t>& b) {
  for (uint64_t x : a)
    if (b.count(x)) return true;
  return false;
}

// Commits a solution; info must be unsolved and unfrozen.
void commit(UnifState& st, MetaInfo& info, Term solution, const char* rule) {
  assert(!info.solution && !info.frozen);
  info.solution = std::move(solution);
  trace(st, rule, meta_str(info.name) + " := " + show(st, *info.solution));
  wake(st, info.name.id);
}

const char* describe(TermKind k) {
  switch (k) {
    case TermKind::Var: return "variable";
    case TermKind::Ann: return "annotation";
    case TermKind::Let: return "let";
    case TermKind::Universe: return "Type";
    case TermKind::TyCtor: return "type constructor";
    case TermKind::Ctor: return "constructor";
    case TermKind::Match: return "match";
    case TermKind::Dtor: return "destructor";
    case TermKind::Comatch: return "comatch";
    case TermKind::Meta: return "metavariable";
  }
  return "?";
}

}  // namespace

void wake(UnifState& st, uint64_t solved_meta_id) {
  for (auto it = st.postponed.begin(); it != st.postponed.end();) {
    if (it->blockers.count(solved_meta_id)) {
      st.queue.push_back(std::move(*it));
      it = st.postponed.erase(it);
    } else {
      ++it;
    }
  }
}

OccursVerdict occurs(const MetaName& alpha, const std::set<uint64_t>& img, const Term& rhs) {
  OccSummary occ = classify(rhs);
  OccursVerdict v;
  for (const auto& vo : occ.vars) {
    if (img.count(vo.var.id)) continue;
    if (vo.cls != OccClass::Flexible) {
      v.kind = OccursVerdict::Kind::Fail;
      v.code = "escaping-var";
      v.detail = "variable " + vo.var.name + " is not in scope of the metavariable";
      return v;
    }
    if (vo.inside_meta) {
      v.blockers.insert(vo.inside_meta->id);
    } else {
      // flexible through a blocked head: wait for any head metavariable
      for (const auto& mo : occ.metas) v.blockers.insert(mo.name.id);
    }
  }
  for (const auto& mo : occ.metas) {
    if (mo.name != alpha) continue;
    if (mo.cls == OccClass::StronglyRigid) {
      v.kind = OccursVerdict::Kind::Fail;
      v.code = "unif-occurs-rig";
      v.detail = meta_str(alpha) + " occurs strongly rigidly in its candidate solution";
      v.blockers.clear();
      return v;
    }
    v.blockers.insert(alpha.id);
  }
  if (!v.blockers.empty()) v.kind = OccursVerdict::Kind::Blocked;
  return v;
}

std::optional<Term> invert(const Closure& theta, const Term& rhs) {
  std::set<uint64_t> fv = free_vars(rhs);
  ContextSubst inv;
  std::set<uint64_t> seen;
  for (const auto& e : theta) {
    const VarT* v = term_as<VarT>(strip_ann(e.term));
    if (!v) return std::nullopt;
    if (!fv.count(v->var.id)) continue;  // irrelevant entry: drop
    if (!seen.insert(v->var.id).second) return std::nullopt;  // non-linear on FV(rhs)
    inv.push(v->var, mk_var(e.var));
  }
  for (uint64_t id : fv)
    if (!seen.count(id)) return std::nullopt;  // uncovered variable
  return subst_apply(rhs, inv);
}

namespace {

OccClass weaken(OccClass c) {
  return c == OccClass::StronglyRigid ? OccClass::Rigid : c;
}

bool head_blocked(const Term& t) {
  return kind_of(spine_head(t)) == TermKind::Meta;
}

// Collects pruning plans: for metavariables in rigid positions, delayed
// entries whose image is a neutral spine headed by an out-of-scope variable.
struct PruneScan {
  UnifState& st;
  const std::set<uint64_t>& img;
  bool flex_failure = false;
  std::map<uint64_t, std::vector<bool>> plans;  // meta id -> positions to drop
  std::map<uint64_t, MetaName> names;

  void consider(const MetaT& m) {
    if (plans.count(m.name.id)) return;
    const MetaInfo* info = st.metas.find(m.name);
    if (!info || info->solution || info->frozen) return;
    std::vector<bool> drop(m.delayed.size(), false);
    bool any = false;
    for (size_t i = 0; i < m.delayed.size(); ++i) {
      const Term& u = m.delayed[i].term;
      std::set<uint64_t> fv = free_vars(u);
      bool out_of_scope = false;
      for (uint64_t id : fv)
        if (!img.count(id)) {
          out_of_scope = true;
          break;
        }
      if (!out_of_scope) continue;
      const VarT* hv = term_as<VarT>(spine_head(u));
      if (hv && !img.count(hv->var.id)) {
        // neutral spine on an out-of-scope variable: never eliminatable
        drop[i] = true;
        any = true;
        continue;
      }
      OccSummary occ = classify(u);
      bool all_flex = true;
      for (uint64_t id : fv)
        if (!img.count(id) && occ.fv_rig.count(id)) {
          all_flex = false;
          break;
        }
      if (all_flex) flex_failure = true;  // may vanish: do not prune, postpone
    }
    if (any) {
      plans[m.name.id] = std::move(drop);
      names[m.name.id] = m.name;
    }
  }

  void term(const Term& t, OccClass mode) {
    switch (kind_of(t)) {
      case TermKind::Var:
      case TermKind::Universe:
        return;
      case TermKind::Ann: {
        const auto& a = term_get<AnnT>(t);
        term(a.body, mode);
        term(a.type, OccClass::Flexible);
        return;
      }
      case TermKind::Let: {
        const auto& l = term_get<LetT>(t);
        term(l.type, OccClass::Flexible);
        term(l.bound, OccClass::Flexible);
        term(l.body, OccClass::Flexible);
        return;
      }
      case TermKind::TyCtor: {
        for (const auto& a : term_get<TyCtorT>(t).args) term(a.term, mode);
        return;
      }
      case TermKind::Ctor: {
        for (const auto& a : term_get<CtorT>(t).args) term(a.term, mode);
        return;
      }
      case TermKind::Comatch: {
        for (const auto& e : term_get<ComatchT>(t).closure) term(e.term, mode);
        return;
      }
      case TermKind::Dtor: {
        const auto& d = term_get<DtorT>(t);
        OccClass sub = head_blocked(d.scrutinee) ? OccClass::Flexible : weaken(mode);
        term(d.scrutinee, sub);
        for (const auto& a : d.args) term(a.term, sub);
        return;
      }
      case TermKind::Match: {
        const auto& m = term_get<MatchT>(t);
        OccClass sub = head_blocked(m.scrutinee) ? OccClass::Flexible : weaken(mode);
        term(m.scrutinee, sub);
        for (const auto& e : m.closure) term(e.term, sub);
        if (m.motive) term(*m.motive, sub);
        return;
      }
      case TermKind::Meta: {
        const auto& m = term_get<MetaT>(t);
        if (mode != OccClass::Flexible) consider(m);
        for (const auto& e : m.delayed) term(e.term, OccClass::Flexible);
        return;
      }
    }
  }
};

}  // namespace

PruneOutcome prune(UnifState& st, const std::set<uint64_t>& img, const Term& rhs_nf) {
  PruneOutcome out;
  if (!st.allow_solve) return out;
  PruneScan scan{st, img, false, {}, {}};
  scan.term(rhs_nf, OccClass::StronglyRigid);
  if (scan.flex_failure) {
    out.flex_failure = true;
    return out;
  }
  for (const auto& [id, drop] : scan.plans) {
    const MetaName& name = scan.names[id];
    const MetaInfo* info = st.metas.find(name);
    if (!info || info->solution) continue;
    std::set<uint64_t> dropped;
    size_t di = 0;
    for (const auto& e : info->ctx.entries) {
      if (e.body) continue;
      if (di < drop.size() && drop[di]) dropped.insert(e.var.id);
      ++di;
    }
    if (di != drop.size()) continue;  // stale delayed substitution: skip
    bool feasible = true;
    TypingContext kept;
    for (const auto& e : info->ctx.entries) {
      if (dropped.count(e.var.id)) continue;
      if (intersects(free_vars(e.type), dropped) ||
          (e.body && intersects(free_vars(*e.body), dropped))) {
        feasible = false;
        break;
      }
      kept.push(e);
    }
    if (!feasible || intersects(free_vars(info->type), dropped)) continue;
    Term ty = info->type;
    std::string hint = info->name.hint;
    MetaInfo& narrowed = st.metas.declare(fresh_meta_name(hint), std::move(kept), ty);
    Closure idc;
    for (const auto& e : narrowed.ctx.entries)
      if (!e.body) idc.push_back({e.var, mk_var(e.var)});
    commit(st, *st.metas.find(name), mk_meta(narrowed.name, idc), "unif-prune");
    out.changed = true;
  }
  return out;
}

bool same_meta(UnifState& st, const MetaName& alpha, const Closure& th1, const Closure& th2,
               const ReductionEnv& env) {
  if (!st.allow_solve || !st.fuel) return false;
  const MetaInfo* info = st.metas.find(alpha);
  if (!info || info->solution || info->frozen) return false;
  if (th1.size() != th2.size()) return false;
  std::vector<uint64_t> img1, img2;
  for (size_t i = 0; i < th1.size(); ++i) {
    Term a = nf(th1[i].term, env, st.metas, *st.fuel);
    Term b = nf(th2[i].term, env, st.metas, *st.fuel);
    const VarT* va = term_as<VarT>(strip_ann(a));
    const VarT* vb = term_as<VarT>(strip_ann(b));
    if (!va || !vb) return false;  // not variable renamings
    img1.push_back(va->var.id);
    img2.push_back(vb->var.id);
  }
  std::set<uint64_t> dropped;
  size_t di = 0;
  for (const auto& e : info->ctx.entries) {
    if (e.body) continue;
    if (di >= img1.size()) return false;
    if (img1[di] != img2[di]) dropped.insert(e.var.id);
    ++di;
  }
  if (di != th1.size() || dropped.empty()) return false;
  TypingContext kept;
  for (const auto& e : info->ctx.entries) {
    if (dropped.count(e.var.id)) continue;
    if (intersects(free_vars(e.type), dropped) ||
        (e.body && intersects(free_vars(*e.body), dropped))) {
      dropped.insert(e.var.id);  // dependent entry goes too
      continue;
    }
    kept.push(e);
  }
  if (intersects(free_vars(info->type), dropped)) return false;
  Term ty = info->type;
  std::string hint = info->name.hint;
  MetaInfo& narrowed = st.metas.declare(fresh_meta_name(hint), std::move(kept), ty);
  Closure idc;
  for (const auto& e : narrowed.ctx.entries)
    if (!e.body) idc.push_back({e.var, mk_var(e.var)});
  commit(st, *st.metas.find(alpha), mk_meta(narrowed.name, idc), "unif-prune-same");
  return true;
}

SolveRes solve_one(UnifState& st, Constraint& c, bool quick) {
  SolveRes res;
  if (!st.fuel) return res;
  Term l = strip_ann(c.lhs), r = strip_ann(c.rhs);
  const MetaT* lm = term_as<MetaT>(l);
  const MetaT* rm = term_as<MetaT>(r);
  if (lm && st.metas.solved(lm->name)) lm = nullptr;  // reduction will expand
  if (rm && st.metas.solved(rm->name)) rm = nullptr;
  if (lm && rm && lm->name == rm->name) {
    if (quick) return res;
    if (same_meta(st, lm->name, lm->delayed, rm->delayed, c.env)) {
      res.kind = SolveKind::Solved;  // agreement part discharges the equation
      return res;
    }
    res.kind = SolveKind::Postponed;
    res.blockers = {lm->name.id};
    return res;
  }
  for (int side = 0; side < 2; ++side) {
    const MetaT* m = side == 0 ? lm : rm;
    if (!m) continue;
    const Term& rest = side == 0 ? c.rhs : c.lhs;
    const MetaInfo* info = st.metas.find(m->name);
    if (!info) continue;
    if (info->frozen) {
      if (quick) continue;  // reduction may still discharge without solving
      res.kind = SolveKind::Failed;
      res.code = "frozen-meta";
      res.detail = meta_str(m->name) + " belongs to an earlier declaration and can no longer be solved";
      return res;
    }
    if (!st.allow_solve) {
      if (quick) continue;
      res.kind = SolveKind::Postponed;
      res.blockers = {m->name.id};
      return res;
    }
    Term rhs_p = quick ? quote(rest, c.env, st.metas) : nf(rest, c.env, st.metas, *st.fuel);
    Closure th;
    th.reserve(m->delayed.size());
    for (const auto& e : m->delayed)
      th.push_back({e.var, quick ? quote(e.term, c.env, st.metas)
                                 : nf(e.term, c.env, st.metas, *st.fuel)});
    if (!is_renaming(th)) {
      if (quick) continue;
      res.kind = SolveKind::Postponed;
      res.blockers = {m->name.id};
      for (const auto& e : th)
        for (uint64_t id : free_metas(e.term)) res.blockers.insert(id);
      return res;
    }
    std::set<uint64_t> img = renaming_img(th);
    if (!quick) {
      PruneOutcome po = prune(st, img, rhs_p);
      if (po.flex_failure) {
        res.kind = SolveKind::Postponed;
        res.blockers = free_metas(rhs_p);
        res.blockers.insert(m->name.id);
        return res;
      }
      if (po.changed) rhs_p = nf(rhs_p, c.env, st.metas, *st.fuel);
    }
    OccursVerdict ov = occurs(m->name, img, rhs_p);
    if (ov.kind == OccursVerdict::Kind::Fail) {
      if (quick) continue;
      res.kind = SolveKind::Failed;
      res.code = ov.code;
      res.detail = ov.detail + " in " + show(st, rhs_p);
      return res;
    }
    if (ov.kind == OccursVerdict::Kind::Blocked) {
      if (quick) continue;
      res.kind = SolveKind::Postponed;
      res.blockers = ov.blockers;
      return res;
    }
    std::optional<Term> sol = invert(th, rhs_p);
    if (!sol) {
      if (quick) continue;
      res.kind = SolveKind::Postponed;  // non-linear renaming: no pattern solution
      res.blockers = {m->name.id};
      return res;
    }
    if (st.recheck) {
      std::string why;
      if (!st.recheck(*st.metas.find(m->name), *sol, why)) {
        if (quick) continue;
        res.kind = SolveKind::Postponed;
        res.blockers = free_metas(*sol);
        res.blockers.insert(m->name.id);
        res.detail = why;
        return res;
      }
    }
    commit(st, *st.metas.find(m->name), *sol, "unif-solve");
    res.kind = SolveKind::Solved;
    return res;
  }
  return res;
}

namespace {

ConvResult conflict(UnifState& st, std::string code, std::string detail, Span span) {
  trace(st, code, detail);
  ConvResult r;
  r.status = ConvStatus::Conflict;
  r.code = std::move(code);
  r.detail = std::move(detail);
  r.span = span;
  return r;
}

void push_children(UnifState& st, const Constraint& parent,
                   std::vector<std::pair<Term, Term>> pairs) {
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
    Constraint child;
    child.id = st.next_id++;
    child.env = parent.env;
    child.lhs = it->first;
    child.rhs = it->second;
    child.span = parent.span;
    st.queue.push_front(std::move(child));
  }
}

void postpone(UnifState& st, Constraint c, std::set<uint64_t> blockers) {
  c.blockers = std::move(blockers);
  trace(st, "postpone", show_pair(st, c.lhs, c.rhs));
  st.postponed.push_back(std::move(c));
}

// Processes one constraint; returns a result only on conflict.
std::optional<ConvResult> process_one(UnifState& st, Constraint c) {
  if (!st.fuel->spend())
    throw eval_error("fuel-exhausted", "unification step budget exhausted", c.span);

  if (alpha_eq(c.lhs, c.rhs)) {
    trace(st, "conv-alpha", show_pair(st, c.lhs, c.rhs));
    return std::nullopt;
  }

  // Solve before reduce: cheap attempt on the unreduced terms.
  SolveRes q = solve_one(st, c, true);
  if (q.kind == SolveKind::Solved) return std::nullopt;
  if (q.kind == SolveKind::Failed) return conflict(st, q.code, q.detail, c.span);

  const TermData* l0 = c.lhs.raw();
  const TermData* r0 = c.rhs.raw();
  c.lhs = whnf(c.lhs, c.env, st.metas, *st.fuel);
  c.rhs = whnf(c.rhs, c.env, st.metas, *st.fuel);
  if (c.lhs.raw() != l0 || c.rhs.raw() != r0)
    trace(st, "conv-red", show_pair(st, c.lhs, c.rhs));

  if (alpha_eq(c.lhs, c.rhs)) {
    trace(st, "conv-alpha", show_pair(st, c.lhs, c.rhs));
    return std::nullopt;
  }

  SolveRes s = solve_one(st, c, false);
  if (s.kind == SolveKind::Solved) return std::nullopt;
  if (s.kind == SolveKind::Failed) return conflict(st, s.code, s.detail, c.span);
  if (s.kind == SolveKind::Postponed) {
    postpone(st, std::move(c), std::move(s.blockers));
    return std::nullopt;
  }

  Term l = strip_ann(c.lhs);
  Term r = strip_ann(c.rhs);

  std::set<uint64_t> hb;
  head_blockers(st, l, hb);
  head_blockers(st, r, hb);
  if (!hb.empty()) {
    postpone(st, std::move(c), std::move(hb));
    return std::nullopt;
  }

  TermKind kl = kind_of(l), kr = kind_of(r);
  if (kl == TermKind::Universe && kr == TermKind::Universe) {
    trace(st, "conv-type", "Type =? Type");
    return std::nullopt;
  }
  if (kl == TermKind::TyCtor && kr == TermKind::TyCtor) {
    const auto& a = term_get<TyCtorT>(l);
    const auto& b = term_get<TyCtorT>(r);
    if (a.name != b.name || a.args.size() != b.args.size())
      return conflict(st, "conv-tctor-bot",
                      "type constructors " + a.name + " and " + b.name + " differ", c.span);
    trace(st, "conv-tctor", show_pair(st, l, r));
    std::vector<std::pair<Term, Term>> pairs;
    for (size_t i = 0; i < a.args.size(); ++i) pairs.push_back({a.args[i].term, b.args[i].term});
    push_children(st, c, std::move(pairs));
    return std::nullopt;
  }
  if (kl == TermKind::Ctor && kr == TermKind::Ctor) {
    const auto& a = term_get<CtorT>(l);
    const auto& b = term_get<CtorT>(r);
    if (a.name != b.name || a.args.size() != b.args.size())
      return conflict(st, "conv-dctor-bot",
                      "constructors " + a.name + " and " + b.name + " differ", c.span);
    trace(st, "conv-dctor", show_pair(st, l, r));
    std::vector<std::pair<Term, Term>> pairs;
    for (size_t i = 0; i < a.args.size(); ++i) pairs.push_back({a.args[i].term, b.args[i].term});
    push_children(st, c, std::move(pairs));
    return std::nullopt;
  }
  if (kl == TermKind::Comatch && kr == TermKind::Comatch) {
    const auto& a = term_get<ComatchT>(l);
    const auto& b = term_get<ComatchT>(r);
    if (a.label != b.label || a.closure.size() != b.closure.size())
      return conflict(st, "conv-comatch-bot",
                      "comatches " + a.label.name + "/" + std::to_string(a.label.id) + " and " +
                          b.label.name + "/" + std::to_string(b.label.id) + " have different labels",
                      c.span);
    trace(st, "conv-comatch", show_pair(st, l, r));
    std::vector<std::pair<Term, Term>> pairs;
    for (size_t i = 0; i < a.closure.size(); ++i)
      pairs.push_back({a.closure[i].term, b.closure[i].term});
    push_children(st, c, std::move(pairs));
    return std::nullopt;
  }
  if (kl == TermKind::Dtor && kr == TermKind::Dtor) {
    const auto& a = term_get<DtorT>(l);
    const auto& b = term_get<DtorT>(r);
    if (a.name != b.name || a.args.size() != b.args.size())
      return conflict(st, "conv-dtor-bot",
                      "destructors " + a.name + " and " + b.name + " differ", c.span);
    trace(st, "conv-dtor", show_pair(st, l, r));
    std::vector<std::pair<Term, Term>> pairs;
    pairs.push_back({a.scrutinee, b.scrutinee});
    for (size_t i = 0; i < a.args.size(); ++i) pairs.push_back({a.args[i].term, b.args[i].term});
    push_children(st, c, std::move(pairs));
    return std::nullopt;
  }
  if (kl == TermKind::Match && kr == TermKind::Match) {
    const auto& a = term_get<MatchT>(l);
    const auto& b = term_get<MatchT>(r);
    if (a.label != b.label || a.closure.size() != b.closure.size())
      return conflict(st, "conv-match-bot",
                      "matches " + a.label.name + "/" + std::to_string(a.label.id) + " and " +
                          b.label.name + "/" + std::to_string(b.label.id) + " have different labels",
                      c.span);
    trace(st, "conv-match", show_pair(st, l, r));
    std::vector<std::pair<Term, Term>> pairs;
    pairs.push_back({a.scrutinee, b.scrutinee});
    for (size_t i = 0; i < a.closure.size(); ++i)
      pairs.push_back({a.closure[i].term, b.closure[i].term});
    // motives are return ascriptions; they do not separate terms
    push_children(st, c, std::move(pairs));
    return std::nullopt;
  }
  if (kl == TermKind::Var && kr == TermKind::Var) {
    const auto& a = term_get<VarT>(l);
    const auto& b = term_get<VarT>(r);
    return conflict(st, "conv-var-bot",
                    "variables " + a.var.name + " and " + b.var.name + " differ", c.span);
  }
  if (kl == TermKind::Meta || kr == TermKind::Meta) {
    // unregistered or otherwise unsolvable bare metavariable
    std::set<uint64_t> ids;
    if (kl == TermKind::Meta) ids.insert(term_get<MetaT>(l).name.id);
    if (kr == TermKind::Meta) ids.insert(term_get<MetaT>(r).name.id);
    postpone(st, std::move(c), std::move(ids));
    return std::nullopt;
  }
  if (kl == TermKind::Universe || kr == TermKind::Universe)
    return conflict(st, "conv-type-bot",
                    std::string(describe(kl)) + " vs " + describe(kr), c.span);
  return conflict(st, "conv-shape-bot",
                  std::string(describe(kl)) + " =? " + describe(kr) + ": " +
                      show_pair(st, l, r),
                  c.span);
}

ConvResult drain(UnifState& st) {
  while (!st.queue.empty()) {
    Constraint c = std::move(st.queue.front());
    st.queue.pop_front();
    if (auto r = process_one(st, std::move(c))) return *r;
  }
  return {};
}

}  // namespace

ConvResult conv(UnifState& st, const ReductionEnv& env, Term lhs, Term rhs, Span span) {
  assert(st.fuel);
  uint64_t watermark = st.next_id;
  Constraint root;
  root.id = st.next_id++;
  root.env = env;
  root.lhs = std::move(lhs);
  root.rhs = std::move(rhs);
  root.span = span;
  trace(st, "conv", show_pair(st, root.lhs, root.rhs));
  if (st.archive && st.allow_solve) st.archive->push_back(root);
  st.queue.push_back(std::move(root));
  ConvResult r = drain(st);
  if (!r.ok()) {
    st.queue.clear();
    return r;
  }
  ConvResult out;
  out.span = span;
  for (const auto& p : st.postponed) {
    if (p.id < watermark) continue;  // owned by an earlier conversion
    out.status = ConvStatus::Stuck;
    out.blockers.insert(p.blockers.begin(), p.blockers.end());
    if (out.detail.empty()) out.detail = show_pair(st, p.lhs, p.rhs);
  }
  if (out.status == ConvStatus::Stuck) out.code = "unsolved-constraints";
  return out;
}

ConvResult flush(UnifState& st) {
  assert(st.fuel);
  for (auto& p : st.postponed) st.queue.push_back(std::move(p));
  st.postponed.clear();
  ConvResult r = drain(st);
  if (!r.ok()) return r;
  if (st.postponed.empty()) return {};
  ConvResult out;
  out.status = ConvStatus::Stuck;
  out.code = "unsolved-constraints";
  for (const auto& p : st.postponed) {
    out.blockers.insert(p.blockers.begin(), p.blockers.end());
    if (out.detail.size() < 200) {
      if (!out.detail.empty()) out.detail += "; ";
      out.detail += show_pair(st, p.lhs, p.rhs);
    }
  }
  return out;
}

}  // namespace pol
