#include "pol/print.hpp"

#include <cassert>
#include <set>
#include <sstream>

namespace pol {

namespace {

// Precedence contexts: Expr admits arrows and local lets, Postfix admits
// projection chains, Atom requires a self-delimited form.
enum class Prec { Expr = 0, Postfix = 1, Atom = 2 };

bool meta_has_hint(const MetaT& m) { return !m.name.hint.empty() && m.name.hint != "_"; }

struct Printer {
  const PrintOpts& opts;
  std::ostringstream out;
  // Guards against cyclic clause lists of recursive definitions.
  std::set<const void*> on_stack;

  explicit Printer(const PrintOpts& o) : opts(o) {}

  void term(const Term& t, Prec prec) {
    if (!t.valid()) {
      out << "<invalid>";
      return;
    }
    const TermData& d = t.data();
    switch (d.kind()) {
      case TermKind::Var:
        out << std::get<VarT>(d.v).var.name;
        return;
      case TermKind::Universe:
        out << "Type";
        return;
      case TermKind::Ann: {
        const auto& a = std::get<AnnT>(d.v);
        out << "(";
        term(a.body, Prec::Expr);
        out << " : ";
        term(a.type, Prec::Expr);
        out << ")";
        return;
      }
      case TermKind::Let: {
        const auto& l = std::get<LetT>(d.v);
        bool paren = prec != Prec::Expr;
        if (paren) out << "(";
        out << "let " << l.var.name << ": ";
        term(l.type, Prec::Expr);
        out << " := ";
        term(l.bound, Prec::Expr);
        out << "; ";
        term(l.body, Prec::Expr);
        if (paren) out << ")";
        return;
      }
      case TermKind::TyCtor: {
        const auto& c = std::get<TyCtorT>(d.v);
        if (opts.resugar_arrow && c.name == "Fun" && c.args.size() == 2 && !c.args[0].implicit &&
            !c.args[1].implicit) {
          bool paren = prec != Prec::Expr;
          if (paren) out << "(";
          term(c.args[0].term, Prec::Postfix);
          out << " -> ";
          term(c.args[1].term, Prec::Expr);
          if (paren) out << ")";
          return;
        }
        call(c.name, c.args, nullptr);
        return;
      }
      case TermKind::Ctor: {
        const auto& c = std::get<CtorT>(d.v);
        if (opts.resugar_nat) {
          uint64_t n = 0;
          if (nat_literal(t, n)) {
            out << n;
            return;
          }
        }
        const Telescope* tele = nullptr;
        if (opts.env) {
          if (const CtorDecl* cd = opts.env->find_ctor(c.name)) tele = &cd->args;
        }
        call(c.name, c.args, tele);
        return;
      }
      case TermKind::Dtor: {
        const auto& dt = std::get<DtorT>(d.v);
        term(dt.scrutinee, Prec::Postfix);
        out << "." << dt.name;
        const Telescope* tele = nullptr;
        if (opts.env) {
          if (const DtorDecl* dd = opts.env->find_dtor(dt.name))
            tele = &dd->args;
          else if (const DefDecl* df = opts.env->find_def(dt.name))
            tele = &df->params;
        }
        args_suffix(dt.args, tele);
        return;
      }
      case TermKind::Match: {
        const auto& m = std::get<MatchT>(d.v);
        const DefDecl* def = opts.env ? opts.env->find_def_label(m.label) : nullptr;
        if (def) {
          // Expansion of a top-level definition: print as the original call.
          term(m.scrutinee, Prec::Postfix);
          out << "." << def->label.name;
          ArgList as;
          for (size_t i = 0; i < m.closure.size(); ++i) {
            bool imp = i < def->params.size() ? def->params[i].implicit : false;
            as.push_back({m.closure[i].term, imp});
          }
          args_suffix(as, nullptr, /*flags_final=*/true);
          return;
        }
        term(m.scrutinee, Prec::Postfix);
        out << ".match " << m.label.name;
        if (opts.show_closures) closure(m.closure);
        if (m.motive) {
          out << " as " << m.motive_binder.name << " return ";
          term(*m.motive, Prec::Postfix);
        }
        out << " {";
        if (m.cases && on_stack.insert(m.cases.get()).second) {
          bool first = true;
          for (const auto& c : *m.cases) {
            out << (first ? " " : ", ");
            first = false;
            out << c.ctor;
            binder_list(c.binders);
            if (c.body) {
              out << " => ";
              term(*c.body, Prec::Expr);
            } else {
              out << " absurd";
            }
          }
          on_stack.erase(m.cases.get());
          out << " }";
        } else {
          out << " ... }";  // cyclic clause list without an enclosing definition
        }
        return;
      }
      case TermKind::Comatch: {
        const auto& c = std::get<ComatchT>(d.v);
        const CodefDecl* codef = opts.env ? opts.env->find_codef_label(c.label) : nullptr;
        if (codef) {
          ArgList as;
          for (size_t i = 0; i < c.closure.size(); ++i) {
            bool imp = i < codef->params.size() ? codef->params[i].implicit : false;
            as.push_back({c.closure[i].term, imp});
          }
          call(codef->label.name, as, nullptr, /*flags_final=*/true);
          return;
        }
        out << "comatch " << c.label.name;
        if (opts.show_closures) closure(c.closure);
        out << " {";
        if (c.cocases && on_stack.insert(c.cocases.get()).second) {
          bool first = true;
          for (const auto& cc : *c.cocases) {
            out << (first ? " " : ", ");
            first = false;
            out << "." << cc.dtor;
            binder_list(cc.binders);
            if (cc.body) {
              out << " => ";
              term(*cc.body, Prec::Expr);
            } else {
              out << " absurd";
            }
          }
          on_stack.erase(c.cocases.get());
          out << " }";
        } else {
          out << " ... }";
        }
        return;
      }
      case TermKind::Meta: {
        const auto& m = std::get<MetaT>(d.v);
        if (m.delayed.empty() && !opts.show_meta_subst) {
          out << "_";
          return;
        }
        out << "?" << (meta_has_hint(m) ? m.name.hint : "") << m.name.id;
        if (opts.show_meta_subst) closure(m.delayed);
        return;
      }
    }
  }

  // True when t is a closed S^n(Z) numeral.
  bool nat_literal(const Term& t, uint64_t& n) {
    const Term* cur = &t;
    uint64_t acc = 0;
    while (true) {
      const CtorT* c = term_as<CtorT>(strip_ann(*cur));
      if (!c) return false;
      if (c->name == "Z" && c->args.empty()) {
        n = acc;
        return true;
      }
      if (c->name == "S" && c->args.size() == 1 && !c->args[0].implicit) {
        ++acc;
        cur = &c->args[0].term;
        continue;
      }
      return false;
    }
  }

  void call(const std::string& name, const ArgList& args, const Telescope* tele,
            bool flags_final = false) {
    out << name;
    args_suffix(args, tele, flags_final);
  }

  // Prints "(a, b)" honoring implicitness; omits "()" entirely.
  void args_suffix(const ArgList& args, const Telescope* tele, bool flags_final = false,
                   bool force_show = false) {
    std::vector<const Term*> shown;
    for (size_t i = 0; i < args.size(); ++i) {
      bool imp = args[i].implicit;
      if (tele && i < tele->size() && !flags_final) imp = (*tele)[i].implicit;
      if (imp && !opts.show_implicit && !force_show) continue;
      shown.push_back(&args[i].term);
    }
    if (shown.empty()) return;
    out << "(";
    for (size_t i = 0; i < shown.size(); ++i) {
      if (i) out << ", ";
      term(*shown[i], Prec::Expr);
    }
    out << ")";
  }

  void binder_list(const std::vector<VarRef>& bs) {
    if (bs.empty()) return;
    out << "(";
    for (size_t i = 0; i < bs.size(); ++i) {
      if (i) out << ", ";
      out << bs[i].name;
    }
    out << ")";
  }

  void closure(const Closure& c) {
    out << " [";
    for (size_t i = 0; i < c.size(); ++i) {
      if (i) out << ", ";
      out << c[i].var.name << " := ";
      term(c[i].term, Prec::Expr);
    }
    out << "]";
  }

  void telescope(const Telescope& tele) {
    if (tele.empty()) return;
    out << "(";
    for (size_t i = 0; i < tele.size(); ++i) {
      if (i) out << ", ";
      if (tele[i].implicit) out << "implicit ";
      out << tele[i].var.name << ": ";
      term(tele[i].type, Prec::Expr);
    }
    out << ")";
  }
};

}  // namespace

std::string print_term(const Term& t, const PrintOpts& opts) {
  Printer p(opts);
  p.term(t, Prec::Expr);
  return p.out.str();
}

std::string print_telescope(const Telescope& tele, const PrintOpts& opts) {
  Printer p(opts);
  p.telescope(tele);
  return p.out.str();
}

std::string print_subst(const ContextSubst& s, const PrintOpts& opts) {
  Printer p(opts);
  p.out << "[";
  for (size_t i = 0; i < s.entries.size(); ++i) {
    if (i) p.out << ", ";
    p.out << s.entries[i].var.name << " := ";
    p.term(s.entries[i].term, Prec::Expr);
  }
  p.out << "]";
  return p.out.str();
}

std::string print_context(const TypingContext& ctx, const PrintOpts& opts) {
  Printer p(opts);
  p.out << "(";
  for (size_t i = 0; i < ctx.entries.size(); ++i) {
    if (i) p.out << ", ";
    const CtxEntry& e = ctx.entries[i];
    p.out << e.var.name << ": ";
    p.term(e.type, Prec::Expr);
    if (e.body) {
      p.out << " := ";
      p.term(*e.body, Prec::Expr);
    }
  }
  p.out << ")";
  return p.out.str();
}

std::string print_program(const GlobalEnv& env, const PrintOpts& opts) {
  Printer p(opts);
  auto& out = p.out;
  for (size_t oi = opts.skip_decls; oi < env.order.size(); ++oi) {
    const auto& [kind, idx] = env.order[oi];
    switch (kind) {
      case DeclKind::Data: {
        const DataDecl& d = env.datas[idx];
        out << "data " << d.name;
        p.telescope(d.indices);
        out << " {";
        for (size_t i = 0; i < d.ctors.size(); ++i) {
          const CtorDecl& c = d.ctors[i];
          out << (i ? ",\n  " : "\n  ") << c.name;
          p.telescope(c.args);
          out << ": " << d.name;
          p.args_suffix(c.result_args, nullptr, true, true);
        }
        out << (d.ctors.empty() ? "}" : ",\n}") << "\n\n";
        break;
      }
      case DeclKind::Codata: {
        const CodataDecl& d = env.codatas[idx];
        out << "codata " << d.name;
        p.telescope(d.indices);
        out << " {";
        for (size_t i = 0; i < d.dtors.size(); ++i) {
          const DtorDecl& dt = d.dtors[i];
          out << (i ? ",\n  " : "\n  ");
          out << "(" << dt.self_var.name << ": " << d.name;
          p.args_suffix(dt.self_args, nullptr, true, true);
          out << ")." << dt.name;
          p.telescope(dt.args);
          out << ": ";
          p.term(dt.ret, Prec::Expr);
        }
        out << (d.dtors.empty() ? "}" : ",\n}") << "\n\n";
        break;
      }
      case DeclKind::Def: {
        const DefDecl& d = env.defs[idx];
        out << "def (" << d.self_var.name << ": " << d.self_type;
        p.args_suffix(d.self_args, nullptr, true, true);
        out << ")." << d.label.name;
        p.telescope(d.params);
        out << ": ";
        p.term(d.ret, Prec::Expr);
        out << " {";
        bool first = true;
        for (const auto& c : *d.cases) {
          out << (first ? "\n  " : ",\n  ");
          first = false;
          out << c.ctor;
          p.binder_list(c.binders);
          if (c.body) {
            out << " => ";
            p.term(*c.body, Prec::Expr);
          } else {
            out << " absurd";
          }
        }
        out << (d.cases->empty() ? "}" : ",\n}") << "\n\n";
        break;
      }
      case DeclKind::Codef: {
        const CodefDecl& d = env.codefs[idx];
        out << "codef " << d.label.name;
        p.telescope(d.params);
        out << ": ";
        p.term(d.ret, Prec::Expr);
        out << " {";
        bool first = true;
        for (const auto& cc : *d.cocases) {
          out << (first ? "\n  " : ",\n  ");
          first = false;
          out << "." << cc.dtor;
          p.binder_list(cc.binders);
          if (cc.body) {
            out << " => ";
            p.term(*cc.body, Prec::Expr);
          } else {
            out << " absurd";
          }
        }
        out << (d.cocases->empty() ? "}" : ",\n}") << "\n\n";
        break;
      }
      case DeclKind::Let: {
        const TopLet& l = env.lets[idx];
        out << "let " << l.var.name << ": ";
        p.term(l.type, Prec::Expr);
        out << " {\n  ";
        p.term(l.body, Prec::Expr);
        out << "\n}\n\n";
        break;
      }
    }
  }
  return out.str();
}

}  // namespace pol
