#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geneaperc {

enum class Errc {
  missing_root,
  ancestor_gap,
  child_gap,
  duplicate_vertex,
  vertex_not_found,
  budget_invalid,
  type_out_of_range,
  invalid_argument,
  invalid_vector,
  no_convergence,
  index_mismatch,
  too_large,
  encoding_mismatch,
  observable_mismatch,
  bracket_failure,
  plan_invalid,
  io_failure,
  parse_error,
  bad_config,
  unknown_model,
  unknown_suite,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace geneaperc
