#include "config.hpp"

#include <cctype>
#include <fstream>

#include "geneaperc/error.hpp"

namespace geneaperc::cli {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::bad_config, what); }

}  // namespace

std::string env_key(const std::string& variable) {
  static const std::string prefix = "GENEAPERC_";
  std::string rest = variable.substr(prefix.size());
  std::string out;
  bool upper = false;
  for (char c : rest) {
    if (c == '_') {
      upper = true;
      continue;
    }
    const auto lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out += upper ? static_cast<char>(std::toupper(static_cast<unsigned char>(lc))) : lc;
    upper = false;
  }
  return out;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) bad("override '" + assignment + "' is not of the form KEY=VALUE");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) bad("override key '" + key + "' has an empty component");
    if (!node->is_object()) *node = Json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

Json load_config(const std::string& path, const std::vector<std::string>& overrides,
                 const std::map<std::string, std::string>& environment) {
  Json config = Json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) bad("cannot open config '" + path + "'");
    config = Json::parse(in, nullptr, false);
    if (config.is_discarded() || !config.is_object()) bad("config '" + path + "' is not a JSON object");
  }
  for (const auto& [name, value] : environment) apply_override(config, env_key(name) + "=" + value);
  for (const auto& o : overrides) apply_override(config, o);
  return config;
}

Rational exact_value(const Json& value) {
  if (value.is_string()) return parse_rational(value.get<std::string>());
  if (value.is_number_integer()) return Rational(value.get<long long>());
  if (value.is_number()) return to_rational(value.get<double>());
  bad("expected a number, got " + value.dump());
}

double numeric_value(const Json& value) { return to_double(exact_value(value)); }

OffspringLaw parse_law(const Json& spec) {
  if (spec.is_null()) return OffspringLaw::uniform(1, 3);
  if (spec.is_string()) {
    const auto name = spec.get<std::string>();
    if (name == "fig1") return OffspringLaw::uniform(1, 3);
    bad("unknown law shorthand '" + name + "'");
  }
  if (!spec.is_object()) bad("law must be a string or an object");
  const std::string kind = get_or<std::string>(spec, "kind", "finite");
  if (kind == "finite") {
    const auto it = spec.find("pmf");
    if (it == spec.end()) bad("finite law needs a pmf");
    std::vector<double> pmf;
    if (it->is_array()) {
      for (const auto& x : *it) pmf.push_back(numeric_value(x));
      return OffspringLaw::finite(pmf);
    }
    if (it->is_object()) {
      std::map<std::uint32_t, double> table;
      for (const auto& [k, v] : it->items()) table[static_cast<std::uint32_t>(std::stoul(k))] = numeric_value(v);
      return OffspringLaw::finite(table);
    }
    bad("pmf must be an array or an object");
  }
  if (kind == "uniform") return OffspringLaw::uniform(spec.at("lo").get<std::uint32_t>(), spec.at("hi").get<std::uint32_t>());
  if (kind == "point") return OffspringLaw::point_mass(spec.at("k").get<std::uint32_t>());
  if (kind == "binomial") return OffspringLaw::binomial(spec.at("n").get<std::uint32_t>(), numeric_value(spec.at("p")));
  if (kind == "poisson") return OffspringLaw::poisson(numeric_value(spec.at("lambda")));
  if (kind == "geometric") return OffspringLaw::geometric(numeric_value(spec.at("p")));
  bad("unknown law kind '" + kind + "'");
}

std::vector<double> parse_grid(const Json& spec) {
  std::vector<double> grid;
  if (spec.is_null()) return grid;
  if (spec.is_array()) {
    for (const auto& x : spec) grid.push_back(numeric_value(x));
    return grid;
  }
  if (spec.is_object()) {
    const Rational from = exact_value(spec.at("from"));
    const Rational to = exact_value(spec.at("to"));
    const Rational step = exact_value(spec.at("step"));
    if (step <= 0) bad("grid step must be positive");
    for (Rational x = from; x <= to; x += step) grid.push_back(to_double(x));
    return grid;
  }
  bad("grid must be an array or {from, to, step}");
}

Tree build_configured_tree(const Json& config, const OffspringLaw& law, Seed seed) {
  const Json spec = config.contains("tree") ? config.at("tree") : Json::object();
  const std::string kind = get_or<std::string>(spec, "kind", "bgw");
  if (kind == "complete") return complete_tree(spec.at("arity").get<std::uint32_t>(), spec.at("depth").get<std::uint32_t>());
  if (kind == "star") return star_tree(spec.at("leaves").get<std::uint32_t>());
  if (kind == "path") return path_tree(spec.at("length").get<std::uint32_t>());
  if (kind == "preorder") return Tree::from_preorder_counts(spec.at("counts").get<std::vector<std::uint32_t>>());
  if (kind == "listing") {
    std::ifstream in(spec.at("path").get<std::string>());
    if (!in) bad("cannot open tree listing");
    return read_listing(in);
  }
  if (kind == "bgw") {
    GrowthBudget budget;
    budget.max_generation = get_or<std::uint32_t>(config, "depth", 4);
    budget.max_vertices = get_or<std::uint64_t>(config, "maxVertices", 1'000'000);
    return sample_bgw_tree(law, budget, seed).tree;
  }
  bad("unknown tree kind '" + kind + "'");
}

ExperimentPlan build_plan(const Json& config) {
  ExperimentPlan plan;
  const std::string model = get_or<std::string>(config, "model", "bernoulli");
  plan.model = parse_model(model == "bgw" ? "bernoulli" : model);
  plan.law = parse_law(config.contains("law") ? config.at("law") : Json());
  plan.d = get_or<std::uint32_t>(config, "d", 2);
  if (config.contains("a")) {
    for (const auto& x : config.at("a")) plan.color_weights.push_back(numeric_value(x));
    if (!config.contains("d")) plan.d = static_cast<std::uint32_t>(plan.color_weights.size());
  }
  if (config.contains("rootColor")) plan.root_color = config.at("rootColor").get<Color>();
  plan.grid = parse_grid(config.contains("grid") ? config.at("grid") : Json());
  plan.replicates = get_or<std::uint64_t>(config, "replicates", plan.replicates);
  plan.depth = get_or<std::uint32_t>(config, "survivalDepth", plan.depth);
  plan.vertex_cap = get_or<std::uint64_t>(config, "vertexCap", plan.vertex_cap);
  plan.master_seed = get_or<Seed>(config, "seed", plan.master_seed);
  plan.confidence = get_or<double>(config, "confidence", plan.confidence);
  plan.condition_on_survival = get_or<bool>(config, "conditionOnSurvival", plan.condition_on_survival);
  if (config.contains("tauLow")) plan.tau_low = numeric_value(config.at("tauLow"));
  if (config.contains("tauHigh")) plan.tau_high = numeric_value(config.at("tauHigh"));
  plan.chunk = get_or<std::uint64_t>(config, "chunk", plan.chunk);
  plan.workers = get_or<unsigned>(config, "workers", 1);
  plan.validate();
  return plan;
}

}  // namespace geneaperc::cli
