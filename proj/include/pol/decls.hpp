#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pol/syntax.hpp"

namespace pol {

struct CtorDecl {
  std::string name;
  Telescope args;
  ArgList result_args;  // indices of the result type, scoped over args
  Span span;
};

struct DataDecl {
  std::string name;
  Telescope indices;
  std::vector<CtorDecl> ctors;
  Span span;
};

struct DtorDecl {
  VarRef self_var;
  ArgList self_args;  // indices of the self type, scoped over args
  std::string name;
  Telescope args;
  Term ret;  // scoped over args and self_var
  Span span;
};

struct CodataDecl {
  std::string name;
  Telescope indices;
  std::vector<DtorDecl> dtors;
  Span span;
};

// Top-level pattern-matching definition `def (x: T ρ).name(Ξ): t { cases }`.
// Calls are expanded into match terms sharing `label` and `cases`.
struct DefDecl {
  Label label;  // label.name == surface name
  VarRef self_var;
  std::string self_type;
  ArgList self_args;  // scoped over params
  Telescope params;
  Term ret;  // scoped over params and self_var
  std::shared_ptr<CaseList> cases;
  Span span;
};

// Top-level copattern definition `codef L(Ξ): T ρ { cocases }`.
struct CodefDecl {
  Label label;
  Telescope params;
  Term ret;  // the annotated codata type, scoped over params
  std::shared_ptr<CocaseList> cocases;
  Span span;
};

struct TopLet {
  VarRef var;
  Term type;
  Term body;
  Span span;
};

enum class DeclKind { Data, Codata, Def, Codef, Let };

// Global declarations in order, with lookup tables. Constructor, destructor,
// definition and type names share one global namespace each and must be
// unique program-wide.
struct GlobalEnv {
  std::vector<DataDecl> datas;
  std::vector<CodataDecl> codatas;
  std::vector<DefDecl> defs;
  std::vector<CodefDecl> codefs;
  std::vector<TopLet> lets;

  // Declaration order across all five vectors: (kind, index into its vector).
  std::vector<std::pair<DeclKind, size_t>> order;

  std::map<std::string, size_t> data_by_name;
  std::map<std::string, size_t> codata_by_name;
  std::map<std::string, std::pair<size_t, size_t>> ctor_by_name;  // (data idx, ctor idx)
  std::map<std::string, std::pair<size_t, size_t>> dtor_by_name;  // (codata idx, dtor idx)
  std::map<std::string, size_t> def_by_name;
  std::map<std::string, size_t> codef_by_name;
  std::map<std::string, size_t> let_by_name;
  std::map<uint64_t, size_t> def_by_label;
  std::map<uint64_t, size_t> codef_by_label;

  const DataDecl* find_data(const std::string& n) const;
  const CodataDecl* find_codata(const std::string& n) const;
  const CtorDecl* find_ctor(const std::string& n, const DataDecl** owner = nullptr) const;
  const DtorDecl* find_dtor(const std::string& n, const CodataDecl** owner = nullptr) const;
  const DefDecl* find_def(const std::string& n) const;
  const CodefDecl* find_codef(const std::string& n) const;
  const DefDecl* find_def_label(const Label& l) const;
  const CodefDecl* find_codef_label(const Label& l) const;
  const TopLet* find_let(const std::string& n) const;

  // True if the name is taken in any global namespace.
  bool name_taken(const std::string& n) const;
};

}  // namespace pol
