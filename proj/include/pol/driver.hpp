#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pol/common.hpp"
#include "pol/decls.hpp"
#include "pol/typecheck.hpp"

namespace pol {

struct DriverConfig {
  std::vector<std::string> files;   // user files, in order
  std::string run_target;           // `run` only: the top-level let to evaluate
  uint64_t fuel = Fuel::kDefault;
  bool json = false;          // machine-readable diagnostics on stderr
  bool explain_conv = false;  // conversion trace on stderr
  bool explain_unify = false; // solver trace on stderr
  bool trace_json = false;    // traces rendered as JSON
  bool no_prelude = false;
  std::string prelude_path;  // empty: resolve automatically
};

// One loaded and checked program. Diagnostics from every phase land in
// `diags`; `ok` is true when all declarations checked.
struct Pipeline {
  GlobalEnv globals;
  CheckState state;
  std::vector<std::string> file_names;  // index = Span::file
  size_t prelude_decls = 0;             // leading entries of globals.order
  bool ok = false;

  Pipeline() : state(globals) {}
  Pipeline(const Pipeline&) = delete;
};

// Parses, desugars and checks `sources` in order (each pair is display name +
// contents); the first `prelude_count` sources count as prelude.
void process_sources(Pipeline& p, const std::vector<std::pair<std::string, std::string>>& sources,
                     uint64_t fuel, size_t prelude_count);

// Subcommand entry points; write program output to `out` and diagnostics and
// traces to `err`. Return the process exit code (0 ok, 1 diagnostics, 2 usage
// or IO failure).
int cmd_check(const DriverConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_run(const DriverConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_elaborate(const DriverConfig& cfg, std::ostream& out, std::ostream& err);

// Renders one diagnostic as plain text or a JSON object.
std::string render_diag(const Diag& d, const std::vector<std::string>& files, bool json);

}  // namespace pol
