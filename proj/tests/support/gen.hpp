#pragma once

// Random generators and enumerators shared by the property tests and the
// acceptance suite: first-order index problems over the Nat/Bool signature,
// closed-term enumeration for conflict confirmation, normal-form shapes for
// occurrence classification, and planted pattern unification problems.

#include <algorithm>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pol/subst.hpp"
#include "pol/syntax.hpp"

namespace pol::testsupport {

inline Term nat_ty() { return mk_tyctor("Nat", {}); }
inline Term bool_ty() { return mk_tyctor("Bool", {}); }

inline Term nat_lit(uint64_t n) {
  Term t = mk_ctor("Z", {});
  for (uint64_t i = 0; i < n; ++i) t = mk_ctor("S", {{t, false}});
  return t;
}

// A typed variable pool living in one shared context.
struct VarPool {
  std::vector<VarRef> nats, bools;
  std::shared_ptr<TypingContext> ctx = std::make_shared<TypingContext>();

  void add_nat(const std::string& name) {
    VarRef v = fresh_var(name);
    nats.push_back(v);
    ctx->push(CtxEntry{v, nat_ty(), std::nullopt, false});
  }
  void add_bool(const std::string& name) {
    VarRef v = fresh_var(name);
    bools.push_back(v);
    ctx->push(CtxEntry{v, bool_ty(), std::nullopt, false});
  }
};

// First-order terms over Z/S/T/F and the pool's variables.
struct IdxGen {
  std::mt19937_64 rng;
  const VarPool& pool;

  explicit IdxGen(uint64_t seed, const VarPool& p) : rng(seed), pool(p) {}

  uint64_t pick(uint64_t n) { return std::uniform_int_distribution<uint64_t>(0, n - 1)(rng); }

  Term gen_nat(int depth) {
    // At depth 0 only leaves; otherwise bias toward structure.
    uint64_t c = pick(depth <= 0 ? 2 : 5);
    if (depth > 0 && c >= 2) return mk_ctor("S", {{gen_nat(depth - 1), false}});
    if (c == 0 || pool.nats.empty()) return mk_ctor("Z", {});
    return mk_var(pool.nats[pick(pool.nats.size())]);
  }

  Term gen_bool(int) {
    uint64_t c = pick(pool.bools.empty() ? 2 : 3);
    if (c == 0) return mk_ctor("T", {});
    if (c == 1) return mk_ctor("F", {});
    return mk_var(pool.bools[pick(pool.bools.size())]);
  }

  // One unification problem: a pair of same-typed terms. Half the pairs are
  // independent (conflicts likely), half are renamed/instantiated copies
  // (unifiable by construction).
  std::pair<Term, Term> problem(int depth) {
    bool nat = pick(4) != 0;  // bools have little structure, use them sparingly
    Term lhs = nat ? gen_nat(depth) : gen_bool(depth);
    if (pick(2) == 0) {
      Term rhs = nat ? gen_nat(depth) : gen_bool(depth);
      return {lhs, rhs};
    }
    // Instantiate some variables of lhs to fresh terms of their type.
    ContextSubst sub;
    for (const auto& v : pool.nats)
      if (pick(2) == 0) sub.push(v, gen_nat(depth - 1));
    for (const auto& v : pool.bools)
      if (pick(2) == 0) sub.push(v, gen_bool(0));
    return {lhs, subst_apply(lhs, sub)};
  }
};

// All closed Nat terms S^k(Z) with k <= depth.
inline std::vector<Term> enum_closed_nat(int depth) {
  std::vector<Term> out;
  for (int k = 0; k <= depth; ++k) out.push_back(nat_lit(static_cast<uint64_t>(k)));
  return out;
}

inline std::vector<Term> enum_closed_bool() { return {mk_ctor("T", {}), mk_ctor("F", {})}; }

// Enumerates every assignment of closed terms (depth bound as above) to the
// pool's variables and calls fn with the resulting substitution. Returns
// false if fn ever returns false ("stop: witness found").
template <class Fn>
bool for_each_assignment(const VarPool& pool, int depth, Fn&& fn) {
  std::vector<Term> nat_terms = enum_closed_nat(depth);
  std::vector<Term> bool_terms = enum_closed_bool();
  size_t n = pool.nats.size(), b = pool.bools.size();
  std::vector<size_t> idx(n + b, 0);
  for (;;) {
    ContextSubst sub;
    for (size_t i = 0; i < n; ++i) sub.push(pool.nats[i], nat_terms[idx[i]]);
    for (size_t i = 0; i < b; ++i) sub.push(pool.bools[i], bool_terms[idx[n + i]]);
    if (!fn(sub)) return false;
    size_t j = 0;
    for (; j < idx.size(); ++j) {
      size_t lim = j < n ? nat_terms.size() : bool_terms.size();
      if (++idx[j] < lim) break;
      idx[j] = 0;
    }
    if (j == idx.size()) return true;
  }
}

// Random normal-form-shaped terms exercising every occurrence class: rigid
// constructor spines, strongly rigid heads, match scrutinees, comatch
// closures and metavariable substitutions (flexible positions).
struct ShapeGen {
  std::mt19937_64 rng;
  const VarPool& pool;

  explicit ShapeGen(uint64_t seed, const VarPool& p) : rng(seed), pool(p) {}

  uint64_t pick(uint64_t n) { return std::uniform_int_distribution<uint64_t>(0, n - 1)(rng); }

  VarRef var() {
    if (pool.bools.empty() || pick(2) == 0) return pool.nats[pick(pool.nats.size())];
    return pool.bools[pick(pool.bools.size())];
  }

  Term gen(int depth) {
    if (depth <= 0) return mk_var(var());
    switch (pick(7)) {
      case 0:
        return mk_var(var());
      case 1:
        return mk_ctor("S", {{gen(depth - 1), false}});
      case 2:
        return mk_tyctor("Vec", {{gen(depth - 1), false}, {gen(depth - 1), true}});
      case 3: {  // stuck match on a variable
        auto cases = std::make_shared<CaseList>();
        VarRef b = fresh_var("b");
        cases->push_back(Case{"S", {b}, mk_var(b), {}});
        return mk_match(mk_var(var()), fresh_label("m"), {{var(), gen(depth - 1)}},
                        fresh_var("z"), std::nullopt, cases, {});
      }
      case 4: {  // comatch: closure images are flexible occurrences
        auto cocases = std::make_shared<CocaseList>();
        VarRef b = fresh_var("y");
        cocases->push_back(Cocase{"ap", {b}, mk_var(b), {}});
        return mk_comatch(fresh_label("c"), {{var(), gen(depth - 1)}}, cocases, {});
      }
      case 5: {  // metavariable with a delayed substitution
        return mk_meta(fresh_meta_name("g"), {{var(), gen(depth - 1)}}, {});
      }
      default: {  // stuck destructor spine
        return mk_dtor(mk_var(var()), "hd", {{gen(depth - 1), false}}, {});
      }
    }
  }
};

// A planted pattern problem: alpha[theta] = rhs where theta is an injective
// renaming of alpha's context onto pool variables and rhs was built by
// renaming a known solution. The unique pattern solution is the planted term.
struct PlantedProblem {
  MetaName alpha;
  TypingContext meta_ctx;  // alpha's context (fresh nat variables)
  Closure theta;
  Term rhs;
  Term solution;  // scoped over meta_ctx
};

struct PlantGen {
  std::mt19937_64 rng;
  const VarPool& pool;  // only nats are used

  explicit PlantGen(uint64_t seed, const VarPool& p) : rng(seed), pool(p) {}

  uint64_t pick(uint64_t n) { return std::uniform_int_distribution<uint64_t>(0, n - 1)(rng); }

  PlantedProblem make(int depth) {
    PlantedProblem p;
    size_t k = 1 + pick(std::min<size_t>(pool.nats.size(), 3));
    // Choose k distinct pool variables as the renaming image.
    std::vector<VarRef> image = pool.nats;
    std::shuffle(image.begin(), image.end(), rng);
    image.resize(k);

    std::vector<VarRef> dom;
    for (size_t i = 0; i < k; ++i) {
      VarRef x = fresh_var("x" + std::to_string(i));
      dom.push_back(x);
      p.meta_ctx.push(CtxEntry{x, nat_ty(), std::nullopt, false});
      p.theta.push_back({x, mk_var(image[i])});
    }
    p.alpha = fresh_meta_name("p");

    // Solution over the domain variables.
    VarPool dom_pool;
    dom_pool.nats = dom;
    IdxGen g(rng(), dom_pool);
    p.solution = g.gen_nat(depth);

    ContextSubst ren;
    for (size_t i = 0; i < k; ++i) ren.push(dom[i], mk_var(image[i]));
    p.rhs = subst_apply(p.solution, ren);
    return p;
  }
};

}  // namespace pol::testsupport
