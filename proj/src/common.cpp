#include "pol/common.hpp"

#include <atomic>

namespace pol {

namespace {
std::atomic<uint64_t> g_counter{1};
}

uint64_t fresh_id() { return g_counter.fetch_add(1, std::memory_order_relaxed); }

VarRef fresh_var(const std::string& name) { return VarRef{fresh_id(), name}; }

Label fresh_label(const std::string& name) { return Label{fresh_id(), name}; }

MetaName fresh_meta_name(const std::string& hint) { return MetaName{fresh_id(), hint}; }

}  // namespace pol
