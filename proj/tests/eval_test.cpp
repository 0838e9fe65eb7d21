#include <catch2/catch_amalgamated.hpp>

#include "pol/eval.hpp"
#include "pol/subst.hpp"
#include "support/naive_reduce.hpp"
#include "support/gen.hpp"

using namespace pol;
using testsupport::NaiveReducer;
using testsupport::nat_lit;
using testsupport::nat_ty;

namespace {

Term step_rule(const Term& t, ReductionEnv& env, const char* expect) {
  auto r = step(t, env, MetaMap::empty());
  REQUIRE(r.has_value());
  CHECK(std::string(r->rule) == expect);
  return r->term;
}

std::shared_ptr<CaseList> nat_cases(Term z_body, VarRef s_binder, Term s_body) {
  auto cases = std::make_shared<CaseList>();
  cases->push_back(Case{"Z", {}, std::move(z_body), {}});
  cases->push_back(Case{"S", {std::move(s_binder)}, std::move(s_body), {}});
  return cases;
}

}  // namespace

TEST_CASE("variable lookup distinguishes machine bindings from context lets") {
  VarRef x = fresh_var("x");

  SECTION("machine binding") {
    ReductionEnv env;
    env.binds.push_back({x, nat_lit(1), false});
    Term r = step_rule(mk_var(x), env, "env1");
    CHECK(alpha_eq(r, nat_lit(1)));
  }

  SECTION("context let body") {
    auto ctx = std::make_shared<TypingContext>();
    ctx->push(CtxEntry{x, nat_ty(), nat_lit(2), false});
    ReductionEnv env = ReductionEnv::over(ctx);
    Term r = step_rule(mk_var(x), env, "env2");
    CHECK(alpha_eq(r, nat_lit(2)));
  }

  SECTION("context variable without body is inert") {
    auto ctx = std::make_shared<TypingContext>();
    ctx->push(CtxEntry{x, nat_ty(), std::nullopt, false});
    ReductionEnv env = ReductionEnv::over(ctx);
    CHECK(!step(mk_var(x), env, MetaMap::empty()).has_value());
  }

  SECTION("comatch binding unfolds when the variable itself is the redex") {
    auto cocases = std::make_shared<CocaseList>();
    cocases->push_back(Cocase{"hd", {}, nat_lit(0), {}});
    Term cm = mk_comatch(fresh_label("c"), {}, cocases);
    ReductionEnv env;
    env.binds.push_back({x, cm, true});
    Term r = step_rule(mk_var(x), env, "env-comatch");
    CHECK(kind_of(r) == TermKind::Comatch);
  }
}

TEST_CASE("let installs a binding under a fresh name") {
  VarRef x = fresh_var("x");
  Term t = mk_let(x, nat_ty(), nat_lit(1), mk_ctor("S", {{mk_var(x), false}}));
  ReductionEnv env;
  Term r = step_rule(t, env, "let");
  REQUIRE(env.binds.size() == 1);
  CHECK(env.binds[0].var.id != x.id);  // freshened
  // Body was renamed to the fresh binding.
  const auto& c = term_get<CtorT>(r);
  CHECK(term_get<VarT>(c.args[0].term).var == env.binds[0].var);

  Fuel fuel;
  CHECK(alpha_eq(nf(t, {}, MetaMap::empty(), fuel), nat_lit(2)));
}

TEST_CASE("match dispatches on the constructor and binds clause variables") {
  VarRef b = fresh_var("b");
  auto cases = nat_cases(nat_lit(7), b, mk_var(b));
  Term t = mk_match(nat_lit(3), fresh_label("m"), {}, fresh_var("z"), std::nullopt, cases);
  ReductionEnv env;
  Term r = step_rule(t, env, "match");
  Fuel fuel;
  CHECK(alpha_eq(whnf(r, env, MetaMap::empty(), fuel), nat_lit(2)));

  SECTION("match congruence reduces the scrutinee") {
    VarRef x = fresh_var("x");
    auto ctx = std::make_shared<TypingContext>();
    ctx->push(CtxEntry{x, nat_ty(), nat_lit(0), false});
    ReductionEnv env2 = ReductionEnv::over(ctx);
    Term stuck = mk_match(mk_var(x), fresh_label("m"), {}, fresh_var("z"), std::nullopt, cases);
    step_rule(stuck, env2, "cng1");
  }

  SECTION("missing case and absurd case raise evaluation errors") {
    auto only_z = std::make_shared<CaseList>();
    only_z->push_back(Case{"Z", {}, nat_lit(0), {}});
    Term missing =
        mk_match(nat_lit(1), fresh_label("m"), {}, fresh_var("z"), std::nullopt, only_z);
    ReductionEnv env3;
    try {
      step(missing, env3, MetaMap::empty());
      FAIL("expected missing-case");
    } catch (const EvalError& e) {
      CHECK(e.diag.code == "missing-case");
    }

    auto absurd_s = std::make_shared<CaseList>();
    absurd_s->push_back(Case{"S", {fresh_var("b")}, std::nullopt, {}});
    Term stuck_absurd =
        mk_match(nat_lit(1), fresh_label("m"), {}, fresh_var("z"), std::nullopt, absurd_s);
    try {
      step(stuck_absurd, env3, MetaMap::empty());
      FAIL("expected stuck-absurd");
    } catch (const EvalError& e) {
      CHECK(e.diag.code == "stuck-absurd");
    }
  }
}

TEST_CASE("destructor on a comatch names the comatch, then enters the cocase") {
  // comatch c { hd => 5, dup => c.hd }
  Label c = fresh_label("c");
  auto cocases = std::make_shared<CocaseList>();
  cocases->push_back(Cocase{"hd", {}, nat_lit(5), {}});
  cocases->push_back(
      Cocase{"dup", {}, mk_dtor(mk_var(VarRef{c.id, c.name}), "hd", {}), {}});
  Term cm = mk_comatch(c, {}, cocases);

  ReductionEnv env;
  Term named = step_rule(mk_dtor(cm, "dup", {}), env, "comatch1");
  REQUIRE(env.binds.size() == 1);
  CHECK(env.binds[0].comatch_bind);

  Term body = step_rule(named, env, "comatch2");
  // The self-reference c.hd now points at the environment binding.
  const auto& dt = term_get<DtorT>(body);
  CHECK(term_get<VarT>(dt.scrutinee).var == env.binds[0].var);

  Fuel fuel;
  CHECK(alpha_eq(whnf(body, env, MetaMap::empty(), fuel), nat_lit(5)));

  SECTION("destructor congruence reduces the scrutinee") {
    ReductionEnv env2;
    Term t = mk_dtor(mk_let(fresh_var("x"), nat_ty(), nat_lit(0), cm), "hd", {});
    step_rule(t, env2, "cng2");
  }
}

TEST_CASE("annotations reduce under a congruence and never block dispatch") {
  VarRef x = fresh_var("x");
  ReductionEnv env;
  env.binds.push_back({x, nat_lit(1), false});
  Term t = mk_ann(mk_var(x), nat_ty());
  Term r = step_rule(t, env, "cng3");
  CHECK(kind_of(r) == TermKind::Ann);

  // An annotated constructor still dispatches the match.
  auto cases = nat_cases(nat_lit(0), fresh_var("b"), nat_lit(9));
  Term m = mk_match(mk_ann(nat_lit(2), nat_ty()), fresh_label("m"), {}, fresh_var("z"),
                    std::nullopt, cases);
  ReductionEnv env2;
  step_rule(m, env2, "match");
}

TEST_CASE("solved metavariables expand through their delayed substitution") {
  MetaMap metas;
  VarRef x = fresh_var("x");
  TypingContext mctx;
  mctx.push(CtxEntry{x, nat_ty(), std::nullopt, false});
  MetaName alpha = fresh_meta_name("a");
  metas.declare(alpha, mctx, nat_ty()).solution = mk_ctor("S", {{mk_var(x), false}});

  Term use = mk_meta(alpha, {{x, nat_lit(3)}});
  ReductionEnv env;
  auto r = step(use, env, metas);
  REQUIRE(r.has_value());
  CHECK(std::string(r->rule) == "env-meta");
  Fuel fuel;
  CHECK(alpha_eq(nf(use, {}, metas, fuel), nat_lit(4)));

  SECTION("unsolved metavariables are blocked") {
    MetaMap unsolved;
    unsolved.declare(fresh_meta_name("b"), {}, nat_ty());
    Term u = mk_meta(unsolved.infos.back().name, {});
    ReductionEnv env2;
    CHECK(!step(u, env2, unsolved).has_value());
    WhnfInfo w = classify_whnf(u, env2, unsolved);
    CHECK(w.cls == WhnfClass::Blocked);
    REQUIRE(w.blocker.has_value());
    CHECK(w.blocker->id == unsolved.infos.back().name.id);
  }
}

TEST_CASE("whnf classification: values, neutrals, blocked") {
  ReductionEnv env;
  CHECK(classify_whnf(nat_lit(0), env, MetaMap::empty()).cls == WhnfClass::Value);
  CHECK(classify_whnf(mk_universe(), env, MetaMap::empty()).cls == WhnfClass::Value);
  CHECK(classify_whnf(mk_tyctor("Nat", {}), env, MetaMap::empty()).cls == WhnfClass::Value);

  VarRef x = fresh_var("x");
  CHECK(classify_whnf(mk_var(x), env, MetaMap::empty()).cls == WhnfClass::Neutral);
  // A match stuck on a neutral scrutinee is neutral; stuck on a meta, blocked.
  auto cases = std::make_shared<CaseList>();
  cases->push_back(Case{"Z", {}, nat_lit(0), {}});
  Term stuck =
      mk_match(mk_var(x), fresh_label("m"), {}, fresh_var("z"), std::nullopt, cases);
  CHECK(classify_whnf(stuck, env, MetaMap::empty()).cls == WhnfClass::Neutral);

  MetaMap metas;
  metas.declare(fresh_meta_name("a"), {}, nat_ty());
  Term blocked = mk_match(mk_meta(metas.infos.back().name, {}), fresh_label("m"), {},
                          fresh_var("z"), std::nullopt, cases);
  CHECK(classify_whnf(blocked, env, metas).cls == WhnfClass::Blocked);
}

TEST_CASE("fuel exhaustion is reported, at any budget") {
  // (comatch l { d => l.d }).d spins forever.
  Label l = fresh_label("l");
  auto cocases = std::make_shared<CocaseList>();
  cocases->push_back(Cocase{"d", {}, mk_dtor(mk_var(VarRef{l.id, l.name}), "d", {}), {}});
  Term spin = mk_dtor(mk_comatch(l, {}, cocases), "d", {});

  for (uint64_t budget : {1ull, 10ull, 1000ull}) {
    ReductionEnv env;
    Fuel fuel{budget};
    try {
      whnf(spin, env, MetaMap::empty(), fuel);
      FAIL("expected fuel-exhausted");
    } catch (const EvalError& e) {
      CHECK(e.diag.code == "fuel-exhausted");
    }
  }
}

TEST_CASE("quotation resolves bindings transitively without entering bodies") {
  // let y := 42; comatch x (y) { ap(z) => y }   reduces to
  // comatch x (42) { ap(z) => y }: the closure image is resolved through the
  // machine environment, the cocase body is left untouched.
  VarRef y = fresh_var("y");
  VarRef z = fresh_var("z");
  Label x = fresh_label("x");
  auto cocases = std::make_shared<CocaseList>();
  cocases->push_back(Cocase{"ap", {z}, mk_var(y), {}});
  Term cm = mk_comatch(x, {{y, mk_var(y)}}, cocases);
  Term t = mk_let(y, nat_ty(), nat_lit(42), cm);

  Fuel fuel;
  Term r = normalize(t, {}, MetaMap::empty(), fuel);

  const auto& out = term_get<ComatchT>(r);
  CHECK(out.label == x);
  REQUIRE(out.closure.size() == 1);
  CHECK(out.closure[0].var.name == "y");
  CHECK(alpha_eq(out.closure[0].term, nat_lit(42)));
  // Bodies are shared, not copied, and still mention the closure variable.
  CHECK(out.cocases.get() == cocases.get());
  CHECK(term_get<VarT>(*(*out.cocases)[0].body).var == y);

  SECTION("context variables are not resolved by quotation") {
    VarRef v = fresh_var("v");
    auto ctx = std::make_shared<TypingContext>();
    ctx->push(CtxEntry{v, nat_ty(), nat_lit(9), false});
    ReductionEnv env = ReductionEnv::over(ctx);
    Term q = quote(mk_ctor("S", {{mk_var(v), false}}), env, MetaMap::empty());
    CHECK(term_get<VarT>(term_get<CtorT>(q).args[0].term).var == v);
  }
}

TEST_CASE("machine normalization agrees with the substitution oracle") {
  VarRef n = fresh_var("n");
  VarRef b = fresh_var("b");

  // let n := 2 in match n { Z => 7, S(b) => S(S(b)) }
  auto cases = nat_cases(nat_lit(7), b, mk_ctor("S", {{mk_ctor("S", {{mk_var(b), false}}), false}}));
  Term t1 = mk_let(n, nat_ty(), nat_lit(2), mk_match(mk_var(n), fresh_label("m"), {},
                                                     fresh_var("z"), std::nullopt, cases));

  // Bounded corecursion: comatch take { run(k) => match k { Z => 0, S(b) => S(take.run(b)) } }
  Label take = fresh_label("take");
  VarRef k = fresh_var("k");
  VarRef b2 = fresh_var("b2");
  Term self = mk_var(VarRef{take.id, take.name});
  auto run_cases = nat_cases(
      nat_lit(0), b2, mk_ctor("S", {{mk_dtor(self, "run", {{mk_var(b2), false}}), false}}));
  Term body = mk_match(mk_var(k), fresh_label("m2"), {}, fresh_var("z"), std::nullopt, run_cases);
  auto cocases = std::make_shared<CocaseList>();
  cocases->push_back(Cocase{"run", {k}, body, {}});
  Term t2 = mk_dtor(mk_comatch(take, {}, cocases), "run", {{nat_lit(3), false}});

  // Closure flowing into a nested clause body.
  VarRef w = fresh_var("w");
  auto inner = nat_cases(mk_var(w), fresh_var("i"), mk_var(w));
  Term t3 = mk_let(
      w, nat_ty(), nat_lit(5),
      mk_match(nat_lit(1), fresh_label("m3"), {{w, mk_var(w)}}, fresh_var("z"), std::nullopt,
               inner));

  for (const Term& t : {t1, t2, t3}) {
    Fuel fuel;
    Term machine = nf(t, {}, MetaMap::empty(), fuel);
    NaiveReducer naive;
    Term reference = naive.nf(t);
    INFO("machine and oracle normal forms must be alpha-equal");
    CHECK(alpha_eq(machine, reference));
  }
}
