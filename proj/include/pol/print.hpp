#pragma once

#include <string>

#include "pol/decls.hpp"
#include "pol/syntax.hpp"

namespace pol {

struct PrintOpts {
  bool show_implicit = false;  // print arguments at implicit positions
  bool resugar_nat = true;     // S(S(Z)) chains print as numerals
  bool resugar_arrow = true;   // Fun(a, b) prints as a -> b
  bool show_closures = false;  // debug: print (co)match closures inline
  bool show_meta_subst = false;  // debug: print delayed substitutions on metas
  size_t skip_decls = 0;           // program printing starts after this many decls
  const GlobalEnv* env = nullptr;  // enables def/codef call resugaring
};

std::string print_term(const Term& t, const PrintOpts& opts = {});
std::string print_telescope(const Telescope& tele, const PrintOpts& opts = {});
std::string print_program(const GlobalEnv& env, const PrintOpts& opts = {});
std::string print_context(const TypingContext& ctx, const PrintOpts& opts = {});
std::string print_subst(const ContextSubst& s, const PrintOpts& opts = {});

}  // namespace pol
