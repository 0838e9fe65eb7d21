#pragma once

#include <optional>
#include <set>
#include <vector>

#include "pol/syntax.hpp"

namespace pol {

// Occurrence rigidity. Strongly rigid positions survive any metavariable
// instantiation and any reduction (constructor arguments and comatch closures
// reachable from the root through such positions only). Rigid additionally
// covers neutral spines: heads, destructor arguments and match closures under
// a neutral head, and match return types. Flexible occurrences sit inside a
// delayed substitution (or under a blocked head) and may disappear once the
// surrounding metavariable is solved.
enum class OccClass { StronglyRigid, Rigid, Flexible };

struct VarOccurrence {
  VarRef var;
  OccClass cls;
  std::vector<int> path;  // child indices from the root
  std::optional<MetaName> inside_meta;  // innermost delayed subst containing it
};

struct MetaOccurrence {
  MetaName name;
  OccClass cls;
  std::vector<int> path;
};

struct OccSummary {
  std::vector<VarOccurrence> vars;
  std::vector<MetaOccurrence> metas;

  std::set<uint64_t> fv_srig, fv_rig, fv_all;

  bool meta_occurs(const MetaName& n) const {
    for (const auto& m : metas)
      if (m.name == n) return true;
    return false;
  }
  std::optional<OccClass> strongest_meta_occ(const MetaName& n) const;
};

// Classifies every variable and metavariable occurrence of a term in normal
// form. Does not reduce; (co)match bodies are not traversed (their free
// variables appear in closures, and body-only metavariable occurrences are
// deliberately invisible, which is what lets comatch-typed equations have
// self-referential solutions guarded by their label).
OccSummary classify(const Term& e);

}  // namespace pol
