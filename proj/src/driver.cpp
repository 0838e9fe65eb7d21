#include "pol/driver.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "pol/eval.hpp"
#include "pol/print.hpp"
#include "pol/surface.hpp"
#include "pol/unify.hpp"

namespace pol {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The prelude ships next to the binary's repo checkout; look in the working
// directory first, then walk up from the executable.
std::string find_prelude(const DriverConfig& cfg) {
  if (!cfg.prelude_path.empty()) return cfg.prelude_path;
  if (fs::exists("std/prelude.pol")) return "std/prelude.pol";
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    for (fs::path dir = exe.parent_path(); !dir.empty(); dir = dir.parent_path()) {
      fs::path cand = dir / "std" / "prelude.pol";
      if (fs::exists(cand)) return cand.string();
      if (dir == dir.root_path()) break;
    }
  }
  return "std/prelude.pol";
}

json diag_json(const Diag& d, const std::vector<std::string>& files) {
  json j;
  j["severity"] = d.severity == Severity::Error ? "error" : "warning";
  j["code"] = d.code;
  j["message"] = d.message;
  if (d.span.known()) {
    j["file"] = d.span.file < files.size() ? files[d.span.file] : "<unknown>";
    j["line"] = d.span.line;
    j["col"] = d.span.col;
  }
  if (!d.notes.empty()) j["notes"] = d.notes;
  return j;
}

void emit_diags(const Pipeline& p, const DriverConfig& cfg, std::ostream& err) {
  if (cfg.json) {
    json arr = json::array();
    for (const Diag& d : p.state.diags) arr.push_back(diag_json(d, p.file_names));
    err << arr.dump(2) << "\n";
    return;
  }
  for (const Diag& d : p.state.diags) err << render_diag(d, p.file_names, false) << "\n";
}

void emit_traces(const Pipeline& p, const DriverConfig& cfg, std::ostream& err) {
  if (!cfg.explain_conv && !cfg.explain_unify) return;
  auto wanted = [&](const TraceEvent& e) {
    bool is_conv = e.rule.rfind("conv", 0) == 0;
    return is_conv ? cfg.explain_conv : cfg.explain_unify;
  };
  if (cfg.trace_json) {
    json arr = json::array();
    for (const TraceEvent& e : p.state.trace)
      if (wanted(e)) arr.push_back(json{{"rule", e.rule}, {"detail", e.text}});
    err << arr.dump(2) << "\n";
    return;
  }
  for (const TraceEvent& e : p.state.trace)
    if (wanted(e)) err << "[" << e.rule << "] " << e.text << "\n";
}

// Loads prelude + user files, returns false on IO failure.
bool load_sources(const DriverConfig& cfg,
                  std::vector<std::pair<std::string, std::string>>& sources,
                  size_t& prelude_count, std::ostream& err) {
  prelude_count = 0;
  if (!cfg.no_prelude) {
    std::string pre = find_prelude(cfg);
    fs::path pre_canon = fs::weakly_canonical(pre);
    // Skip the implicit prelude when it is also passed explicitly.
    bool listed = false;
    for (const std::string& f : cfg.files)
      if (fs::weakly_canonical(f) == pre_canon) listed = true;
    if (!listed) {
      auto text = read_file(pre);
      if (!text) {
        err << "error: cannot read prelude '" << pre << "' (use --no-prelude to skip)\n";
        return false;
      }
      sources.emplace_back(pre, std::move(*text));
      prelude_count = 1;
    }
  }
  for (const std::string& f : cfg.files) {
    auto text = read_file(f);
    if (!text) {
      err << "error: cannot read '" << f << "'\n";
      return false;
    }
    sources.emplace_back(f, std::move(*text));
  }
  return true;
}

}  // namespace

std::string render_diag(const Diag& d, const std::vector<std::string>& files, bool as_json) {
  if (as_json) return diag_json(d, files).dump();
  std::ostringstream out;
  if (d.span.known()) {
    out << (d.span.file < files.size() ? files[d.span.file] : "<unknown>") << ":" << d.span.line
        << ":" << d.span.col << ": ";
  }
  out << (d.severity == Severity::Error ? "error" : "warning") << "[" << d.code
      << "]: " << d.message;
  for (const std::string& n : d.notes) out << "\n  note: " << n;
  return out.str();
}

void process_sources(Pipeline& p, const std::vector<std::pair<std::string, std::string>>& sources,
                     uint64_t fuel, size_t prelude_count) {
  p.state.fuel_budget = fuel;
  bool front_ok = true;
  for (size_t i = 0; i < sources.size(); ++i) {
    p.file_names.push_back(sources[i].first);
    try {
      auto toks = surface::lex(sources[i].second, static_cast<uint32_t>(i));
      surface::SProgram prog = surface::parse_program(toks);
      surface::desugar_program(p.globals, prog);
    } catch (const TypeError& e) {
      p.state.diags.push_back(e.diag);
      front_ok = false;
      break;  // later files would only produce cascaded scope errors
    }
    if (i + 1 == prelude_count) p.prelude_decls = p.globals.order.size();
  }
  if (!front_ok) {
    p.ok = false;
    return;
  }
  p.ok = wf_program(p.state);
}

int cmd_check(const DriverConfig& cfg, std::ostream&, std::ostream& err) {
  std::vector<std::pair<std::string, std::string>> sources;
  size_t prelude_count = 0;
  if (!load_sources(cfg, sources, prelude_count, err)) return 2;
  Pipeline p;
  process_sources(p, sources, cfg.fuel, prelude_count);
  emit_diags(p, cfg, err);
  emit_traces(p, cfg, err);
  return p.ok ? 0 : 1;
}

int cmd_run(const DriverConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, std::string>> sources;
  size_t prelude_count = 0;
  if (!load_sources(cfg, sources, prelude_count, err)) return 2;
  Pipeline p;
  process_sources(p, sources, cfg.fuel, prelude_count);
  emit_diags(p, cfg, err);
  emit_traces(p, cfg, err);
  if (!p.ok) return 1;
  const TopLet* target = p.globals.find_let(cfg.run_target);
  if (!target) {
    err << "error: no top-level let named '" << cfg.run_target << "'\n";
    return 2;
  }
  try {
    Fuel fuel{cfg.fuel};
    ReductionEnv env = ReductionEnv::over(p.state.base_ctx);
    Term result = nf(target->body, env, p.state.metas, fuel);
    PrintOpts popts;
    popts.env = &p.globals;
    out << print_term(result, popts) << "\n";
  } catch (const EvalError& e) {
    err << render_diag(e.diag, p.file_names, cfg.json) << "\n";
    return 1;
  }
  return 0;
}

int cmd_elaborate(const DriverConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, std::string>> sources;
  size_t prelude_count = 0;
  if (!load_sources(cfg, sources, prelude_count, err)) return 2;
  Pipeline p;
  process_sources(p, sources, cfg.fuel, prelude_count);
  emit_diags(p, cfg, err);
  emit_traces(p, cfg, err);
  if (!p.ok) return 1;
  PrintOpts popts;
  popts.show_implicit = true;
  popts.skip_decls = p.prelude_decls;
  popts.env = &p.globals;
  out << print_program(p.globals, popts);
  return 0;
}

}  // namespace pol
