#include "geneaperc/error.hpp"

namespace geneaperc {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::missing_root: return "missing-root";
    case Errc::ancestor_gap: return "ancestor-gap";
    case Errc::child_gap: return "child-gap";
    case Errc::duplicate_vertex: return "duplicate-vertex";
    case Errc::vertex_not_found: return "vertex-not-found";
    case Errc::budget_invalid: return "budget-invalid";
    case Errc::type_out_of_range: return "type-out-of-range";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_vector: return "invalid-vector";
    case Errc::no_convergence: return "no-convergence";
    case Errc::index_mismatch: return "index-mismatch";
    case Errc::too_large: return "too-large";
    case Errc::encoding_mismatch: return "encoding-mismatch";
    case Errc::observable_mismatch: return "observable-mismatch";
    case Errc::bracket_failure: return "bracket-failure";
    case Errc::plan_invalid: return "plan-invalid";
    case Errc::io_failure: return "io-failure";
    case Errc::parse_error: return "parse-error";
    case Errc::bad_config: return "bad-config";
    case Errc::unknown_model: return "unknown-model";
    case Errc::unknown_suite: return "unknown-suite";
  }
  return "unknown";
}

}  // namespace geneaperc
