#pragma once

#include <deque>
#include <map>
#include <optional>

#include "pol/syntax.hpp"

namespace pol {

// One registered metavariable: its creation context, its type (scoped over
// that context), and a write-once solution. Solutions are scoped over the
// non-let-bound entries of ctx; frozen metas may no longer be solved.
struct MetaInfo {
  MetaName name;
  TypingContext ctx;
  Term type;
  std::optional<Term> solution;
  bool frozen = false;
};

// Insertion-ordered metavariable store. A deque keeps MetaInfo references
// stable while the solver declares narrowed metavariables mid-rule.
struct MetaMap {
  std::deque<MetaInfo> infos;
  std::map<uint64_t, size_t> by_id;

  MetaInfo& declare(MetaName name, TypingContext ctx, Term type) {
    by_id[name.id] = infos.size();
    infos.push_back(MetaInfo{std::move(name), std::move(ctx), std::move(type), std::nullopt});
    return infos.back();
  }
  const MetaInfo* find(const MetaName& n) const {
    auto it = by_id.find(n.id);
    return it == by_id.end() ? nullptr : &infos[it->second];
  }
  MetaInfo* find(const MetaName& n) {
    auto it = by_id.find(n.id);
    return it == by_id.end() ? nullptr : &infos[it->second];
  }
  bool solved(const MetaName& n) const {
    const MetaInfo* i = find(n);
    return i && i->solution.has_value();
  }
  static const MetaMap& empty() {
    static const MetaMap m;
    return m;
  }
};

// Replaces every solved metavariable occurrence by its solution with the
// delayed substitution applied, recursively, including inside (co)match
// bodies. Shared clause lists are rewritten once (memoized), which also keeps
// the traversal finite on cyclic definition expansions. Keep one Zonker alive
// per freeze pass so every field of a declaration sees the same rewritten
// clause lists.
struct Zonker {
  const MetaMap& metas;
  std::map<const TermData*, Term> term_memo;
  std::map<const void*, std::shared_ptr<CaseList>> case_memo;
  std::map<const void*, std::shared_ptr<CocaseList>> cocase_memo;

  explicit Zonker(const MetaMap& m) : metas(m) {}

  Term term(const Term& t);
  std::shared_ptr<const CaseList> cases(const std::shared_ptr<const CaseList>& cs);
  std::shared_ptr<const CocaseList> cocases(const std::shared_ptr<const CocaseList>& cs);
};

Term zonk(const Term& t, const MetaMap& metas);

}  // namespace pol
