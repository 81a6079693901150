#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace geneaperc::cli {

struct CheckResult {
  std::string suite;
  std::string check;
  bool pass = false;
  std::string detail;
};

const std::vector<std::string>& suite_names();

/// Runs one named suite, or every suite for "all". Throws
/// Errc::unknown_suite for other names.
std::vector<CheckResult> run_suite(const std::string& name, const Json& config);

}  // namespace geneaperc::cli
