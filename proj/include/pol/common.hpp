#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pol {

// Source location. file is an index into the driver's file table; 0 = unknown.
struct Span {
  uint32_t file = 0;
  uint32_t line = 0;
  uint32_t col = 0;

  bool known() const { return line != 0; }
};

// Variables are identified by a globally unique id; the name is display-only.
// Ids are never reused within a process, which keeps every environment
// binding distinct (Barendregt convention by construction).
struct VarRef {
  uint64_t id = 0;
  std::string name;

  friend bool operator==(const VarRef& a, const VarRef& b) { return a.id == b.id; }
  friend bool operator!=(const VarRef& a, const VarRef& b) { return a.id != b.id; }
};

// (Co)match labels. Globally unique per source position; top-level def/codef
// expansion re-uses one label for every call site of that definition.
struct Label {
  uint64_t id = 0;
  std::string name;

  friend bool operator==(const Label& a, const Label& b) { return a.id == b.id; }
  friend bool operator!=(const Label& a, const Label& b) { return a.id != b.id; }
};

struct MetaName {
  uint64_t id = 0;
  std::string hint;  // display hint, usually the implicit parameter's name

  friend bool operator==(const MetaName& a, const MetaName& b) { return a.id == b.id; }
  friend bool operator!=(const MetaName& a, const MetaName& b) { return a.id != b.id; }
};

uint64_t fresh_id();
VarRef fresh_var(const std::string& name);
Label fresh_label(const std::string& name);
MetaName fresh_meta_name(const std::string& hint);

// Step budget shared along one top-level operation (one declaration check,
// one `run` evaluation, one unification problem).
struct Fuel {
  uint64_t remaining = 1'000'000;

  static constexpr uint64_t kDefault = 1'000'000;

  // Returns false when exhausted.
  bool spend() {
    if (remaining == 0) return false;
    --remaining;
    return true;
  }
};

enum class Severity { Error, Warning, Note };

struct Diag {
  Severity severity = Severity::Error;
  std::string code;  // stable machine-readable code, see docs/diagnostics.md
  std::string message;
  Span span;
  std::vector<std::string> notes;
};

// Typechecking failure; carries the diagnostic. Caught per declaration.
struct TypeError : std::runtime_error {
  Diag diag;
  explicit TypeError(Diag d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

// Evaluation failure (fuel exhausted, missing case, stuck absurd branch).
struct EvalError : std::runtime_error {
  Diag diag;
  explicit EvalError(Diag d) : std::runtime_error(d.message), diag(std::move(d)) {}
};

inline TypeError type_error(std::string code, std::string msg, Span span = {},
                            std::vector<std::string> notes = {}) {
  return TypeError(Diag{Severity::Error, std::move(code), std::move(msg), span, std::move(notes)});
}

inline EvalError eval_error(std::string code, std::string msg, Span span = {}) {
  return EvalError(Diag{Severity::Error, std::move(code), std::move(msg), span, {}});
}

}  // namespace pol
