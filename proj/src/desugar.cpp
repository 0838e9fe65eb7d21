#include <algorithm>
#include <set>

#include "pol/common.hpp"
#include "pol/subst.hpp"
#include "pol/surface.hpp"

namespace pol::surface {

namespace {

struct Desugar {
  GlobalEnv& g;
  // Innermost binding at the back. Context order = front to back.
  std::vector<std::pair<std::string, VarRef>> locals;

  // Signature sources for the program being desugared, parallel to the
  // global declaration vectors (null/done for anything already built, e.g.
  // the prelude). Signatures are filled on first demand so they may refer
  // to each other in any order; see desugar_program below.
  std::vector<const SData*> data_src;
  std::vector<const SCodata*> codata_src;
  std::vector<const SDef*> def_src;
  std::vector<const SCodef*> codef_src;
  std::vector<bool> data_done, codata_done, def_done, codef_done;

  VarRef push_local(const std::string& name) {
    VarRef v = fresh_var(name);
    locals.emplace_back(name, v);
    return v;
  }
  void pop_local(size_t n) { locals.resize(locals.size() - n); }

  const VarRef* find_local(const std::string& n) const {
    for (auto it = locals.rbegin(); it != locals.rend(); ++it)
      if (it->first == n) return &it->second;
    return nullptr;
  }

  // --- argument filling ------------------------------------------------------

  // Places the given arguments into telescope positions. Named arguments bind
  // their positions first; the rest are filled in order. Giving exactly the
  // explicit arguments leaves holes (fresh metavariables) in the implicit
  // positions; giving one argument per position fills everything.
  ArgList fill_args(const std::vector<SArg>& given, const Telescope& tele, Span sp,
                    const std::string& what) {
    std::vector<std::optional<Term>> slot(tele.size());
    std::vector<Term> positional;
    for (const SArg& a : given) {
      Term v = expr(a.value);
      if (!a.name) {
        positional.push_back(v);
        continue;
      }
      bool placed = false;
      for (size_t i = 0; i < tele.size(); ++i) {
        if (tele[i].var.name == *a.name) {
          if (slot[i])
            throw type_error("arity", "argument '" + *a.name + "' of " + what + " given twice",
                             a.value->span);
          slot[i] = v;
          placed = true;
          break;
        }
      }
      if (!placed)
        throw type_error("arity", what + " has no parameter named '" + *a.name + "'",
                         a.value->span);
    }
    std::vector<size_t> open;
    size_t open_explicit = 0;
    for (size_t i = 0; i < tele.size(); ++i) {
      if (slot[i]) continue;
      open.push_back(i);
      if (!tele[i].implicit) ++open_explicit;
    }
    if (positional.size() == open.size()) {
      for (size_t k = 0; k < open.size(); ++k) slot[open[k]] = positional[k];
    } else if (positional.size() == open_explicit) {
      size_t k = 0;
      for (size_t i : open) {
        if (tele[i].implicit) {
          slot[i] = mk_meta(fresh_meta_name(tele[i].var.name), {}, sp);
        } else {
          slot[i] = positional[k++];
        }
      }
    } else {
      throw type_error("arity",
                       what + " expects " + std::to_string(tele.size()) + " argument(s) (" +
                           std::to_string(open_explicit + (tele.size() - open.size())) +
                           " explicit), got " + std::to_string(given.size()),
                       sp);
    }
    ArgList out;
    out.reserve(tele.size());
    for (size_t i = 0; i < tele.size(); ++i) out.push_back(Arg{*slot[i], tele[i].implicit});
    return out;
  }

  // Identity closure over the local variables the parts actually use, in
  // context order.
  Closure capture(const std::vector<Term>& parts) {
    std::set<uint64_t> fv;
    for (const Term& t : parts) {
      auto s = free_vars(t);
      fv.insert(s.begin(), s.end());
    }
    Closure c;
    std::set<uint64_t> seen;
    for (const auto& [name, var] : locals) {
      (void)name;
      if (fv.count(var.id) && seen.insert(var.id).second) c.push_back({var, mk_var(var)});
    }
    return c;
  }

  // --- terms -----------------------------------------------------------------

  Term expr(const SExprPtr& se) {
    const Span sp = se->span;
    return std::visit(
        [&](const auto& node) -> Term {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, SVar>) {
            return call(node.name, {}, false, sp);
          } else if constexpr (std::is_same_v<T, SCall>) {
            return call(node.name, node.args, true, sp);
          } else if constexpr (std::is_same_v<T, SNum>) {
            Term t = mk_ctor("Z", {}, sp);
            for (uint64_t i = 0; i < node.value; ++i) t = mk_ctor("S", {Arg{t, false}}, sp);
            return t;
          } else if constexpr (std::is_same_v<T, SHole>) {
            return mk_meta(fresh_meta_name("_"), {}, sp);
          } else if constexpr (std::is_same_v<T, SType>) {
            return mk_universe(sp);
          } else if constexpr (std::is_same_v<T, SAnn>) {
            Term b = expr(node.body);
            Term ty = expr(node.type);
            return mk_ann(b, ty, sp);
          } else if constexpr (std::is_same_v<T, SArrow>) {
            if (!g.find_data("Fun") && !g.find_codata("Fun"))
              throw type_error("unknown-name", "'->' needs a declaration of 'Fun' in scope", sp);
            Term a = expr(node.from);
            Term b = expr(node.to);
            return mk_tyctor("Fun", {Arg{a, false}, Arg{b, false}}, sp);
          } else if constexpr (std::is_same_v<T, SLetE>) {
            Term ty = node.type ? expr(*node.type) : mk_meta(fresh_meta_name(node.name), {}, sp);
            Term bound = expr(node.bound);
            VarRef v = push_local(node.name);
            Term body = expr(node.body);
            pop_local(1);
            return mk_let(v, ty, bound, body, sp);
          } else if constexpr (std::is_same_v<T, SDtorE>) {
            return dtor_or_defcall(node, sp);
          } else if constexpr (std::is_same_v<T, SMatchE>) {
            return match_expr(node, sp);
          } else if constexpr (std::is_same_v<T, SComatchE>) {
            return comatch_expr(node, sp);
          } else {
            static_assert(std::is_same_v<T, SLambda>);
            SComatchE cm;
            cm.cocases.push_back(SCocase{node.dtor, node.binders, node.body, sp});
            return comatch_expr(cm, sp, "fn");
          }
        },
        se->v);
  }

  Term call(const std::string& name, const std::vector<SArg>& args, bool has_parens, Span sp) {
    if (const VarRef* v = find_local(name)) {
      if (has_parens)
        throw type_error("bad-application", "variable '" + name + "' cannot take arguments", sp);
      return mk_var(*v, sp);
    }
    if (auto it = g.ctor_by_name.find(name); it != g.ctor_by_name.end())
      ensure_data(it->second.first);
    if (auto it = g.data_by_name.find(name); it != g.data_by_name.end()) ensure_data(it->second);
    if (auto it = g.codata_by_name.find(name); it != g.codata_by_name.end())
      ensure_codata(it->second);
    if (auto it = g.codef_by_name.find(name); it != g.codef_by_name.end())
      ensure_codef(it->second);
    const DataDecl* data_owner = nullptr;
    if (const CtorDecl* c = g.find_ctor(name, &data_owner))
      return mk_ctor(name, fill_args(args, c->args, sp, "constructor '" + name + "'"), sp);
    if (const DataDecl* d = g.find_data(name))
      return mk_tyctor(name, fill_args(args, d->indices, sp, "type '" + name + "'"), sp);
    if (const CodataDecl* d = g.find_codata(name))
      return mk_tyctor(name, fill_args(args, d->indices, sp, "type '" + name + "'"), sp);
    if (const CodefDecl* cd = g.find_codef(name)) {
      ArgList filled = fill_args(args, cd->params, sp, "codefinition '" + name + "'");
      Closure cl;
      for (size_t i = 0; i < cd->params.size(); ++i)
        cl.push_back({cd->params[i].var, filled[i].term});
      return mk_comatch(cd->label, std::move(cl), cd->cocases, sp);
    }
    if (const TopLet* l = g.find_let(name)) {
      if (has_parens)
        throw type_error("bad-application", "'" + name + "' is a let binding and cannot take arguments",
                         sp);
      return mk_var(l->var, sp);
    }
    if (g.find_def(name))
      throw type_error("bad-application",
                       "definition '" + name + "' is used as 'scrutinee." + name + "(...)'", sp);
    throw type_error("unknown-name", "unknown name '" + name + "'", sp);
  }

  Term dtor_or_defcall(const SDtorE& node, Span sp) {
    Term scrut = expr(node.scrutinee);
    if (auto it = g.def_by_name.find(node.name); it != g.def_by_name.end())
      ensure_def(it->second);
    if (auto it = g.dtor_by_name.find(node.name); it != g.dtor_by_name.end())
      ensure_codata(it->second.first);
    if (const DefDecl* d = g.find_def(node.name)) {
      ArgList filled = fill_args(node.args, d->params, sp, "definition '" + node.name + "'");
      Closure cl;
      for (size_t i = 0; i < d->params.size(); ++i)
        cl.push_back({d->params[i].var, filled[i].term});
      return mk_match(scrut, d->label, std::move(cl), fresh_var("z"), std::nullopt, d->cases, sp);
    }
    const CodataDecl* owner = nullptr;
    if (const DtorDecl* dt = g.find_dtor(node.name, &owner))
      return mk_dtor(scrut, node.name,
                     fill_args(node.args, dt->args, sp, "destructor '" + node.name + "'"), sp);
    throw type_error("unknown-name", "unknown destructor or definition '" + node.name + "'", sp);
  }

  // A pattern may spell only the explicit arguments; anonymous binders are
  // inserted at the implicit positions to restore the declared arity.
  std::vector<std::string> expand_binders(const Telescope* tele,
                                          const std::vector<std::string>& given) {
    if (!tele || given.size() == tele->size()) return given;
    size_t explicit_count = 0;
    for (const TeleEntry& e : *tele)
      if (!e.implicit) ++explicit_count;
    if (given.size() != explicit_count) return given;  // let the checker report arity
    std::vector<std::string> out;
    size_t k = 0;
    for (const TeleEntry& e : *tele) out.push_back(e.implicit ? "_" : given[k++]);
    return out;
  }

  const Telescope* ctor_tele(const std::string& name) {
    if (auto it = g.ctor_by_name.find(name); it != g.ctor_by_name.end())
      ensure_data(it->second.first);
    const CtorDecl* c = g.find_ctor(name);
    return c ? &c->args : nullptr;
  }
  const Telescope* dtor_tele(const std::string& name) {
    if (auto it = g.dtor_by_name.find(name); it != g.dtor_by_name.end())
      ensure_codata(it->second.first);
    const DtorDecl* d = g.find_dtor(name);
    return d ? &d->args : nullptr;
  }

  std::pair<std::vector<VarRef>, std::optional<Term>> clause_rhs(
      const std::vector<std::string>& binders, const std::optional<SExprPtr>& body) {
    std::vector<VarRef> bs;
    bs.reserve(binders.size());
    for (const std::string& b : binders) bs.push_back(push_local(b));
    std::optional<Term> t;
    if (body) t = expr(*body);
    pop_local(bs.size());
    return {std::move(bs), std::move(t)};
  }

  Term match_expr(const SMatchE& m, Span sp) {
    Term scrut = expr(m.scrutinee);
    CaseList cases;
    std::vector<Term> parts;
    for (const SCase& c : m.cases) {
      auto [bs, body] = clause_rhs(expand_binders(ctor_tele(c.name), c.binders), c.body);
      if (body) parts.push_back(*body);
      cases.push_back(Case{c.name, std::move(bs), std::move(body), c.span});
    }
    VarRef z = fresh_var(m.binder.value_or("z"));
    std::optional<Term> motive;
    if (m.binder) {
      locals.emplace_back(*m.binder, z);
      motive = expr(m.motive);
      pop_local(1);
      parts.push_back(*motive);
    }
    Closure cl = capture(parts);
    Label lab = fresh_label(m.label.value_or("m"));
    return mk_match(scrut, lab, std::move(cl), z, std::move(motive),
                    std::make_shared<CaseList>(std::move(cases)), sp);
  }

  Term comatch_expr(const SComatchE& cm, Span sp, const char* fallback = "cm") {
    Label lab = fresh_label(cm.label.value_or(fallback));
    CocaseList cocases;
    std::vector<Term> parts;
    // A named comatch can observe itself: its name is bound inside the
    // bodies to a variable sharing the label's identity, which evaluation
    // re-points at the object a destructor found it under.
    bool named = cm.label.has_value();
    if (named) locals.emplace_back(*cm.label, VarRef{lab.id, *cm.label});
    for (const SCocase& c : cm.cocases) {
      auto [bs, body] = clause_rhs(expand_binders(dtor_tele(c.name), c.binders), c.body);
      if (body) parts.push_back(*body);
      cocases.push_back(Cocase{c.name, std::move(bs), std::move(body), c.span});
    }
    if (named) pop_local(1);
    Closure cl = capture(parts);
    return mk_comatch(lab, std::move(cl), std::make_shared<CocaseList>(std::move(cocases)), sp);
  }

  // --- declarations ------------------------------------------------------------

  Telescope tele(const STele& st) {
    Telescope out;
    for (const STeleEntry& e : st) {
      Term ty = expr(e.type);
      VarRef v = push_local(e.name);
      out.push_back(TeleEntry{v, ty, e.implicit});
    }
    return out;
  }

  void require_free(const std::string& name, Span sp) {
    if (g.name_taken(name))
      throw type_error("duplicate-name", "name '" + name + "' is already declared", sp);
  }

  // Declarations are desugared in stages so signatures may refer forward:
  // names first, then type indices, constructor signatures, def/codef
  // headers, destructor signatures, and finally clause and let bodies. A
  // codata type whose destructors mention codefinitions of that same type
  // (and vice versa) resolves this way; anything needing a *value* early
  // (for example a let referring to a later let) still fails when checked.

  size_t register_shell(const SData& sd) {
    require_free(sd.name, sd.span);
    size_t idx = g.datas.size();
    DataDecl d{sd.name, {}, {}, sd.span};
    for (const SCtor& c : sd.ctors) {
      require_free(c.name, c.span);
      g.ctor_by_name[c.name] = {idx, d.ctors.size()};
      d.ctors.push_back(CtorDecl{c.name, {}, {}, c.span});
    }
    g.datas.push_back(std::move(d));
    g.data_by_name[sd.name] = idx;
    g.order.emplace_back(DeclKind::Data, idx);
    return idx;
  }

  size_t register_shell(const SCodata& sd) {
    require_free(sd.name, sd.span);
    size_t idx = g.codatas.size();
    CodataDecl d{sd.name, {}, {}, sd.span};
    for (const SDtorDecl& dt : sd.dtors) {
      require_free(dt.name, dt.span);
      if (dt.self_type != sd.name)
        throw type_error("bad-self-type",
                         "destructor self type must be '" + sd.name + "', got '" + dt.self_type +
                             "'",
                         dt.span);
      g.dtor_by_name[dt.name] = {idx, d.dtors.size()};
      d.dtors.push_back(DtorDecl{VarRef{}, {}, dt.name, {}, Term{}, dt.span});
    }
    g.codatas.push_back(std::move(d));
    g.codata_by_name[sd.name] = idx;
    g.order.emplace_back(DeclKind::Codata, idx);
    return idx;
  }

  size_t register_shell(const SDef& sd) {
    require_free(sd.name, sd.span);
    size_t idx = g.defs.size();
    Label label = fresh_label(sd.name);
    g.defs.push_back(DefDecl{label, VarRef{}, sd.self_type, {}, {}, Term{},
                             std::make_shared<CaseList>(), sd.span});
    g.def_by_name[sd.name] = idx;
    g.def_by_label[label.id] = idx;
    g.order.emplace_back(DeclKind::Def, idx);
    return idx;
  }

  size_t register_shell(const SCodef& sd) {
    require_free(sd.name, sd.span);
    size_t idx = g.codefs.size();
    Label label = fresh_label(sd.name);
    g.codefs.push_back(CodefDecl{label, {}, Term{}, std::make_shared<CocaseList>(), sd.span});
    g.codef_by_name[sd.name] = idx;
    g.codef_by_label[label.id] = idx;
    g.order.emplace_back(DeclKind::Codef, idx);
    return idx;
  }

  size_t register_shell(const SLetD& sd) {
    require_free(sd.name, sd.span);
    size_t idx = g.lets.size();
    g.lets.push_back(TopLet{fresh_var(sd.name), Term{}, Term{}, sd.span});
    g.let_by_name[sd.name] = idx;
    g.order.emplace_back(DeclKind::Let, idx);
    return idx;
  }

  void fill_indices(const SData& sd, size_t idx) {
    Telescope indices = tele(sd.indices);
    pop_local(indices.size());
    g.datas[idx].indices = std::move(indices);
  }

  void fill_indices(const SCodata& sd, size_t idx) {
    Telescope indices = tele(sd.indices);
    pop_local(indices.size());
    g.codatas[idx].indices = std::move(indices);
  }

  void fill_ctors(const SData& sd, size_t idx) {
    for (size_t i = 0; i < sd.ctors.size(); ++i) {
      const SCtor& c = sd.ctors[i];
      Telescope args = tele(c.args);
      ArgList result_args;
      if (c.result) {
        const SExpr& r = **c.result;
        const SCall* app = std::get_if<SCall>(&r.v);
        const SVar* bare = std::get_if<SVar>(&r.v);
        std::string rname = app ? app->name : bare ? bare->name : "";
        if (rname != sd.name)
          throw type_error("bad-result-type",
                           "constructor result must be an application of '" + sd.name + "'",
                           r.span);
        result_args = fill_args(app ? app->args : std::vector<SArg>{}, g.datas[idx].indices,
                                r.span, "type '" + sd.name + "'");
      } else if (!g.datas[idx].indices.empty()) {
        throw type_error("bad-result-type",
                         "constructor of indexed type '" + sd.name + "' needs a result annotation",
                         c.span);
      }
      pop_local(args.size());
      g.datas[idx].ctors[i].args = std::move(args);
      g.datas[idx].ctors[i].result_args = std::move(result_args);
    }
  }

  void fill_dtors(const SCodata& sd, size_t idx) {
    for (size_t i = 0; i < sd.dtors.size(); ++i) {
      const SDtorDecl& dt = sd.dtors[i];
      Telescope args = tele(dt.args);
      ArgList self_args =
          fill_args(dt.self_args, g.codatas[idx].indices, dt.span, "type '" + sd.name + "'");
      VarRef self = push_local(dt.self_name);
      Term ret = expr(dt.ret);
      pop_local(args.size() + 1);
      DtorDecl& out = g.codatas[idx].dtors[i];
      out.self_var = self;
      out.self_args = std::move(self_args);
      out.args = std::move(args);
      out.ret = ret;
    }
  }

  // A signature group is marked done on entry, not exit: a declaration may
  // mention its own constructors or type, and earlier items of the group
  // are usable by later ones. A genuinely circular signature reference
  // finds an unfinished telescope and fails with an arity error.
  void ensure_data(size_t i) {
    if (i >= data_done.size() || data_done[i]) return;
    data_done[i] = true;
    auto saved = std::exchange(locals, {});
    fill_indices(*data_src[i], i);
    fill_ctors(*data_src[i], i);
    locals = std::move(saved);
  }

  void ensure_codata(size_t i) {
    if (i >= codata_done.size() || codata_done[i]) return;
    codata_done[i] = true;
    auto saved = std::exchange(locals, {});
    fill_indices(*codata_src[i], i);
    fill_dtors(*codata_src[i], i);
    locals = std::move(saved);
  }

  void ensure_def(size_t i) {
    if (i >= def_done.size() || def_done[i]) return;
    def_done[i] = true;
    auto saved = std::exchange(locals, {});
    fill_header(*def_src[i], i);
    locals = std::move(saved);
  }

  void ensure_codef(size_t i) {
    if (i >= codef_done.size() || codef_done[i]) return;
    codef_done[i] = true;
    auto saved = std::exchange(locals, {});
    fill_header(*codef_src[i], i);
    locals = std::move(saved);
  }

  void fill_header(const SDef& sd, size_t idx) {
    if (auto it = g.data_by_name.find(sd.self_type); it != g.data_by_name.end())
      ensure_data(it->second);
    const DataDecl* data = g.find_data(sd.self_type);
    if (!data)
      throw type_error("unknown-type", "'" + sd.self_type + "' is not a data type", sd.span);
    Telescope params = tele(sd.params);
    ArgList self_args =
        fill_args(sd.self_args, data->indices, sd.span, "type '" + sd.self_type + "'");
    VarRef self = push_local(sd.self_name);
    Term ret = expr(sd.ret);
    pop_local(params.size() + 1);
    DefDecl& out = g.defs[idx];
    out.self_var = self;
    out.self_args = std::move(self_args);
    out.params = std::move(params);
    out.ret = ret;
  }

  void fill_header(const SCodef& sd, size_t idx) {
    Telescope params = tele(sd.params);
    Term ret = expr(sd.ret);
    pop_local(params.size());
    CodefDecl& out = g.codefs[idx];
    out.params = std::move(params);
    out.ret = ret;
  }

  void push_params(const Telescope& params) {
    for (const TeleEntry& e : params) locals.emplace_back(e.var.name, e.var);
  }

  void fill_bodies(const SDef& sd, size_t idx) {
    DefDecl& d = g.defs[idx];
    push_params(d.params);
    CaseList list;
    for (const SCase& c : sd.cases) {
      auto [bs, body] = clause_rhs(expand_binders(ctor_tele(c.name), c.binders), c.body);
      list.push_back(Case{c.name, std::move(bs), std::move(body), c.span});
    }
    *d.cases = std::move(list);
    pop_local(d.params.size());
  }

  void fill_bodies(const SCodef& sd, size_t idx) {
    CodefDecl& d = g.codefs[idx];
    push_params(d.params);
    CocaseList list;
    for (const SCocase& c : sd.cocases) {
      auto [bs, body] = clause_rhs(expand_binders(dtor_tele(c.name), c.binders), c.body);
      list.push_back(Cocase{c.name, std::move(bs), std::move(body), c.span});
    }
    *d.cocases = std::move(list);
    pop_local(d.params.size());
  }

  void fill_bodies(const SLetD& sd, size_t idx) {
    Term type = expr(sd.type);
    Term body = expr(sd.body);
    g.lets[idx].type = type;
    g.lets[idx].body = body;
  }
};

}  // namespace

// Staged desugaring: register every declaration's name first, then fill
// signatures on demand (so they may refer to one another in either
// direction), then desugar bodies. Checking still proceeds in declaration
// order; anything requiring a *value* forward (a let used before it is
// declared) fails there as unbound.
void desugar_program(GlobalEnv& globals, const SProgram& prog) {
  Desugar d{globals, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  d.data_src.assign(globals.datas.size(), nullptr);
  d.data_done.assign(globals.datas.size(), true);
  d.codata_src.assign(globals.codatas.size(), nullptr);
  d.codata_done.assign(globals.codatas.size(), true);
  d.def_src.assign(globals.defs.size(), nullptr);
  d.def_done.assign(globals.defs.size(), true);
  d.codef_src.assign(globals.codefs.size(), nullptr);
  d.codef_done.assign(globals.codefs.size(), true);

  std::vector<size_t> idx(prog.decls.size());
  for (size_t i = 0; i < prog.decls.size(); ++i) {
    idx[i] = std::visit(
        [&](const auto& sd) {
          using T = std::decay_t<decltype(sd)>;
          size_t k = d.register_shell(sd);
          if constexpr (std::is_same_v<T, SData>) {
            d.data_src.push_back(&sd);
            d.data_done.push_back(false);
          } else if constexpr (std::is_same_v<T, SCodata>) {
            d.codata_src.push_back(&sd);
            d.codata_done.push_back(false);
          } else if constexpr (std::is_same_v<T, SDef>) {
            d.def_src.push_back(&sd);
            d.def_done.push_back(false);
          } else if constexpr (std::is_same_v<T, SCodef>) {
            d.codef_src.push_back(&sd);
            d.codef_done.push_back(false);
          }
          return k;
        },
        prog.decls[i]);
  }

  for (size_t i = 0; i < prog.decls.size(); ++i) {
    std::visit(
        [&](const auto& sd) {
          using T = std::decay_t<decltype(sd)>;
          (void)sd;
          if constexpr (std::is_same_v<T, SData>) d.ensure_data(idx[i]);
          else if constexpr (std::is_same_v<T, SCodata>) d.ensure_codata(idx[i]);
          else if constexpr (std::is_same_v<T, SDef>) d.ensure_def(idx[i]);
          else if constexpr (std::is_same_v<T, SCodef>) d.ensure_codef(idx[i]);
        },
        prog.decls[i]);
  }

  for (size_t i = 0; i < prog.decls.size(); ++i) {
    std::visit(
        [&](const auto& sd) {
          using T = std::decay_t<decltype(sd)>;
          if constexpr (std::is_same_v<T, SDef> || std::is_same_v<T, SCodef> ||
                        std::is_same_v<T, SLetD>)
            d.fill_bodies(sd, idx[i]);
        },
        prog.decls[i]);
  }
}

Term desugar_expr_in(GlobalEnv& globals, const SExprPtr& e) {
  Desugar d{globals, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  return d.expr(e);
}

}  // namespace pol::surface
