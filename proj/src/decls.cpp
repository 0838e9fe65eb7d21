#include "pol/decls.hpp"

namespace pol {

const DataDecl* GlobalEnv::find_data(const std::string& n) const {
  auto it = data_by_name.find(n);
  return it == data_by_name.end() ? nullptr : &datas[it->second];
}

const CodataDecl* GlobalEnv::find_codata(const std::string& n) const {
  auto it = codata_by_name.find(n);
  return it == codata_by_name.end() ? nullptr : &codatas[it->second];
}

const CtorDecl* GlobalEnv::find_ctor(const std::string& n, const DataDecl** owner) const {
  auto it = ctor_by_name.find(n);
  if (it == ctor_by_name.end()) return nullptr;
  const DataDecl& d = datas[it->second.first];
  if (owner) *owner = &d;
  return &d.ctors[it->second.second];
}

const DtorDecl* GlobalEnv::find_dtor(const std::string& n, const CodataDecl** owner) const {
  auto it = dtor_by_name.find(n);
  if (it == dtor_by_name.end()) return nullptr;
  const CodataDecl& d = codatas[it->second.first];
  if (owner) *owner = &d;
  return &d.dtors[it->second.second];
}

const DefDecl* GlobalEnv::find_def(const std::string& n) const {
  auto it = def_by_name.find(n);
  return it == def_by_name.end() ? nullptr : &defs[it->second];
}

const CodefDecl* GlobalEnv::find_codef(const std::string& n) const {
  auto it = codef_by_name.find(n);
  return it == codef_by_name.end() ? nullptr : &codefs[it->second];
}

const DefDecl* GlobalEnv::find_def_label(const Label& l) const {
  auto it = def_by_label.find(l.id);
  return it == def_by_label.end() ? nullptr : &defs[it->second];
}

const CodefDecl* GlobalEnv::find_codef_label(const Label& l) const {
  auto it = codef_by_label.find(l.id);
  return it == codef_by_label.end() ? nullptr : &codefs[it->second];
}

const TopLet* GlobalEnv::find_let(const std::string& n) const {
  auto it = let_by_name.find(n);
  return it == let_by_name.end() ? nullptr : &lets[it->second];
}

bool GlobalEnv::name_taken(const std::string& n) const {
  return data_by_name.count(n) || codata_by_name.count(n) || ctor_by_name.count(n) ||
         dtor_by_name.count(n) || def_by_name.count(n) || codef_by_name.count(n) ||
         let_by_name.count(n);
}

}  // namespace pol
