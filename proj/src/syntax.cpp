#include "pol/syntax.hpp"

namespace pol {

namespace {
template <class T>
Term make(T v, Span span) {
  auto data = std::make_shared<TermData>();
  data->v = std::move(v);
  data->span = span;
  return Term(std::move(data));
}
}  // namespace

Term mk_var(VarRef v, Span span) { return make(VarT{std::move(v)}, span); }

Term mk_ann(Term body, Term type, Span span) {
  return make(AnnT{std::move(body), std::move(type)}, span);
}

Term mk_let(VarRef v, Term type, Term bound, Term body, Span span) {
  return make(LetT{std::move(v), std::move(type), std::move(bound), std::move(body)}, span);
}

Term mk_universe(Span span) { return make(UniverseT{}, span); }

Term mk_tyctor(std::string name, ArgList args, Span span) {
  return make(TyCtorT{std::move(name), std::move(args)}, span);
}

Term mk_ctor(std::string name, ArgList args, Span span) {
  return make(CtorT{std::move(name), std::move(args)}, span);
}

Term mk_match(Term scrutinee, Label label, Closure closure, VarRef motive_binder,
              std::optional<Term> motive, std::shared_ptr<const CaseList> cases, Span span) {
  return make(MatchT{std::move(scrutinee), std::move(label), std::move(closure),
                     std::move(motive_binder), std::move(motive), std::move(cases)},
              span);
}

Term mk_dtor(Term scrutinee, std::string name, ArgList args, Span span) {
  return make(DtorT{std::move(scrutinee), std::move(name), std::move(args)}, span);
}

Term mk_comatch(Label label, Closure closure, std::shared_ptr<const CocaseList> cocases,
                Span span) {
  return make(ComatchT{std::move(label), std::move(closure), std::move(cocases)}, span);
}

Term mk_meta(MetaName name, Closure delayed, Span span) {
  return make(MetaT{std::move(name), std::move(delayed)}, span);
}

const Term& strip_ann(const Term& t) {
  const Term* cur = &t;
  while (const AnnT* a = term_as<AnnT>(*cur)) cur = &a->body;
  return *cur;
}

}  // namespace pol
