#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "geneaperc/branching.hpp"
#include "geneaperc/coloring.hpp"
#include "geneaperc/genealogy.hpp"
#include "geneaperc/mc.hpp"
#include "geneaperc/oracle.hpp"

namespace geneaperc::cli {

using Json = nlohmann::json;

/// Layers, lowest precedence first: config file, GENEAPERC_* environment,
/// --set overrides (last wins).
Json load_config(const std::string& path, const std::vector<std::string>& overrides,
                 const std::map<std::string, std::string>& environment);

/// GENEAPERC_SURVIVAL_DEPTH -> "survivalDepth".
std::string env_key(const std::string& variable);
/// Sets a dotted key ("law.p") to a value parsed as JSON, or as a string
/// when it is not valid JSON.
void apply_override(Json& config, const std::string& assignment);

OffspringLaw parse_law(const Json& spec);
std::vector<double> parse_grid(const Json& spec);
Tree build_configured_tree(const Json& config, const OffspringLaw& law, Seed seed);
ExperimentPlan build_plan(const Json& config);

template <class T>
T get_or(const Json& config, const char* key, T fallback) {
  const auto it = config.find(key);
  return it == config.end() || it->is_null() ? fallback : it->get<T>();
}

/// Reads numbers or strings such as "1/3" exactly.
Rational exact_value(const Json& value);
double numeric_value(const Json& value);

}  // namespace geneaperc::cli
