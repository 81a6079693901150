// geneaperc command-line front end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "config.hpp"
#include "geneaperc/error.hpp"
#include "geneaperc/percolation.hpp"
#include "verify.hpp"

extern char** environ;

namespace fs = std::filesystem;
using namespace geneaperc;
using namespace geneaperc::cli;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kRuntime = 3 };

struct Options {
  std::string config_path;
  std::string out = "geneaperc-out";
  std::optional<Seed> seed;
  std::optional<unsigned> workers;
  std::vector<std::string> overrides;
  std::string suite;
  bool suite_given = false;
  std::string input;
};

std::map<std::string, std::string> geneaperc_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (entry.rfind("GENEAPERC_", 0) == 0 && eq != std::string::npos && eq > 10) {
      env[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
  }
  return env;
}

Json effective_config(const Options& o) {
  Json config = load_config(o.config_path, o.overrides, geneaperc_environment());
  if (o.seed) config["seed"] = *o.seed;
  if (o.workers) config["workers"] = *o.workers;
  return config;
}

fs::path prepare_out(const Options& o) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create output directory " + o.out + ": " + ec.message());
  return o.out;
}

void write_manifest(const fs::path& dir, const std::string& command, const Json& config) {
  Json manifest;
  manifest["command"] = command;
  manifest["version"] = kVersion;
  manifest["seed"] = get_or<Seed>(config, "seed", 1);
  manifest["config"] = config;
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::string listing_text(const Tree& t) {
  std::ostringstream os;
  write_listing(t, os);
  return os.str();
}

int simulate(const Options& o) {
  const Json config = effective_config(o);
  const fs::path dir = prepare_out(o);
  const Seed seed = get_or<Seed>(config, "seed", 1);
  const std::string model_name = get_or<std::string>(config, "model", "bgw");
  const OffspringLaw law = parse_law(config.contains("law") ? config.at("law") : Json());
  const Model model = parse_model(model_name == "bgw" ? "bernoulli" : model_name);

  Json summary;
  summary["model"] = model_name;
  summary["seed"] = seed;

  Tree tree;
  std::optional<ColoredConfig> colored;
  if (model == Model::mdm || model == Model::mim) {
    GrowthBudget budget;
    budget.max_generation = get_or<std::uint32_t>(config, "depth", 4);
    budget.max_vertices = get_or<std::uint64_t>(config, "maxVertices", 1'000'000);
    MutationParams params{numeric_value(config.value("r", Json(0.5))), get_or<std::uint32_t>(config, "d", 2), law};
    const Color root = get_or<Color>(config, "rootColor", 1);
    auto sample = model == Model::mdm ? mdm_sample(budget, params, root, seed) : mim_sample(budget, params, root, seed);
    tree = std::move(sample.tree);
    ColoredConfig cc;
    cc.edges = EdgeConfig(sample.clone, 1.0 - params.r);
    cc.coloring = std::move(sample.types);
    cc.root_color = root;
    colored = std::move(cc);
    summary["truncated"] = sample.truncated;
  } else {
    tree = build_configured_tree(config, law, derive_seed(seed, 0));
    const Seed draw = derive_seed(seed, 1);
    if (model_name == "bgw") {
      // Genealogy only.
    } else if (model == Model::bernoulli) {
      const double p = numeric_value(config.value("p", Json(0.5)));
      const EdgeConfig edges = percolate(tree, p, draw);
      std::ostringstream bits;
      write_edge_config(tree, edges, bits);
      write_atomic(dir / "edges.txt", bits.str());
      const auto partition = clusters(tree, edges);
      write_atomic(dir / "clusters.json",
                   cluster_stats_json(p, seed, partition, get_or<double>(config, "giantFraction", 0.5)) + "\n");
      summary["clusters"] = partition.cluster_count();
      summary["rootClusterSize"] = partition.root_cluster_size();
      write_atomic(dir / "tree.dot", to_dot(tree, {}, [&](EdgeIndex e) {
                     return edges.open(e) ? std::string() : std::string("style=dashed");
                   }));
    } else if (model == Model::dac) {
      const std::uint32_t d = get_or<std::uint32_t>(config, "d", 2);
      std::vector<double> a;
      if (config.contains("a")) {
        for (const auto& x : config.at("a")) a.push_back(numeric_value(x));
      }
      const auto colors = a.empty() ? ColorDistribution::uniform(d) : ColorDistribution(a);
      std::optional<Color> root;
      if (config.contains("rootColor")) root = config.at("rootColor").get<Color>();
      colored = dac_color(tree, numeric_value(config.value("p", Json(0.5))), colors, draw, root);
    } else if (model == Model::restricted_dac) {
      std::optional<Color> root;
      if (config.contains("rootColor")) root = config.at("rootColor").get<Color>();
      colored = restricted_dac_color(tree, numeric_value(config.value("p", Json(0.5))),
                                     get_or<std::uint32_t>(config, "d", 2), root, draw);
    } else if (model == Model::infinite_alleles) {
      colored = infinite_alleles_color(tree, numeric_value(config.value("r", Json(0.5))), draw);
    }
  }

  write_atomic(dir / "tree.tsv", listing_text(tree));
  if (colored) {
    write_atomic(dir / "tree.dot", coloring_dot(tree, colored->coloring, &colored->edges));
    write_atomic(dir / "coloring.json", coloring_json(tree, colored->coloring) + "\n");
    write_atomic(dir / "alleles.csv", allelic_partition_csv(colored->coloring));
    summary["colorClasses"] = colored->coloring.distinct();
    summary["rootColor"] = colored->root_color;
    if (model == Model::infinite_alleles) summary["alleleCount"] = colored->coloring.distinct();
    summary["sameTypeRootComponent"] = same_type_root_component_size(tree, colored->coloring);
  } else if (!fs::exists(dir / "tree.dot") || model_name == "bgw") {
    write_atomic(dir / "tree.dot", to_dot(tree));
  }
  summary["vertices"] = tree.size();
  summary["height"] = tree.height();
  summary["treeHash"] = tree.hash();
  write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  write_manifest(dir, "simulate", config);
  std::cout << summary.dump() << "\n";
  return kOk;
}

void write_plot_data(const fs::path& path, const std::vector<EstimateRecord>& records) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,ciLow,ciHigh\n";
  for (const auto& r : records) os << r.parameter << ',' << r.estimate << ',' << r.ci.low << ',' << r.ci.high << '\n';
  write_atomic(path, os.str());
}

int estimate(const Options& o, bool sweep) {
  const Json config = effective_config(o);
  const ExperimentPlan plan = build_plan(config);
  if (sweep && plan.grid.empty() && !config.contains("grid")) {
    throw Error(Errc::bad_config, "sweep needs a grid");
  }
  const fs::path dir = prepare_out(o);
  const RunSummary run = run_plan(plan, dir);
  if (sweep) write_plot_data(dir / "plot.csv", run.records);
  if (config.contains("tol")) {
    const auto b = locate_critical(plan, numeric_value(config.at("tol")), run.outcomes);
    Json critical{{"low", b.low},           {"high", b.high},         {"status", std::string(to_string(b.status))},
                  {"used", b.used},         {"discarded", b.discarded}, {"capHits", b.cap_hits}};
    write_atomic(dir / "critical.json", critical.dump(2) + "\n");
    std::cerr << "critical: " << critical.dump() << "\n";
  }
  std::cout << estimates_csv(run.records);
  return kOk;
}

Observable parse_observable(const std::string& name) {
  for (Observable obs : {Observable::full, Observable::root_component_size, Observable::root_component_shape,
                         Observable::partition, Observable::child_types}) {
    if (to_string(obs) == name) return obs;
  }
  throw Error(Errc::bad_config, "unknown observable '" + name + "'");
}

int oracle(const Options& o) {
  Json config = effective_config(o);
  if (!config.contains("tree")) config["tree"] = Json{{"kind", "complete"}, {"arity", 2}, {"depth", 1}};
  const Tree tree = build_configured_tree(config, parse_law(config.value("law", Json())), get_or<Seed>(config, "seed", 1));
  const std::string model_name = get_or<std::string>(config, "model", "bernoulli");
  const Model model = parse_model(model_name);
  ColoringLawParams params;
  params.p = exact_value(config.value("p", Json("1/2")));
  params.r = exact_value(config.value("r", Json("1/2")));
  params.d = get_or<std::uint32_t>(config, "d", 2);
  if (config.contains("a")) {
    for (const auto& x : config.at("a")) params.a.push_back(exact_value(x));
  }
  if (config.contains("rootColor")) params.root_color = config.at("rootColor").get<Color>();
  const Observable obs = parse_observable(get_or<std::string>(config, "observable", "root-component-size"));
  const ExactLaw law = exact_coloring_law(tree, model, params, obs, get_or<unsigned>(config, "workers", 1),
                                          get_or<std::uint64_t>(config, "maxOutcomes", 100'000'000));
  const fs::path dir = prepare_out(o);
  write_atomic(dir / "law.csv", law.to_csv());
  write_atomic(dir / "law.json", law.to_json() + "\n");
  write_manifest(dir, "oracle", config);
  std::cout << law.to_csv();
  return kOk;
}

int export_artifacts(const Options& o) {
  if (o.input.empty()) throw Error(Errc::bad_config, "export needs --input");
  const fs::path in = o.input;
  const fs::path dir = prepare_out(o);
  if (fs::is_directory(in)) {
    std::ifstream listing(in / "tree.tsv");
    if (!listing) throw Error(Errc::io_failure, "no tree.tsv in " + in.string());
    const Tree tree = read_listing(listing);
    std::string dot = to_dot(tree);
    if (std::ifstream colors(in / "coloring.json"); colors) {
      const Json records = Json::parse(colors);
      Coloring col;
      col.values.resize(tree.size());
      for (const auto& rec : records) {
        col.values[tree.at(Label::parse(rec.at("vertex").get<std::string>()))] = rec.at("colorOrAllele").get<Color>();
      }
      dot = coloring_dot(tree, col);
    }
    write_atomic(dir / "export.dot", dot);
    std::cout << (dir / "export.dot").string() << "\n";
    return kOk;
  }
  if (in.extension() == ".csv") {
    std::ifstream csv(in);
    if (!csv) throw Error(Errc::io_failure, "cannot open " + in.string());
    std::string line;
    std::getline(csv, line);
    if (line.rfind("parameter,estimate,ci_low,ci_high", 0) != 0) {
      throw Error(Errc::parse_error, in.string() + " is not an estimates archive");
    }
    std::ostringstream os;
    os << "x,y,ciLow,ciHigh\n";
    while (std::getline(csv, line)) {
      std::istringstream fields(line);
      std::string x, y, lo, hi;
      std::getline(fields, x, ',');
      std::getline(fields, y, ',');
      std::getline(fields, lo, ',');
      std::getline(fields, hi, ',');
      os << x << ',' << y << ',' << lo << ',' << hi << '\n';
    }
    write_atomic(dir / "plot.csv", os.str());
    std::cout << (dir / "plot.csv").string() << "\n";
    return kOk;
  }
  throw Error(Errc::bad_config, "cannot export " + in.string());
}

int verify(const Options& o) {
  const Json config = effective_config(o);
  std::string suite = o.suite_given ? o.suite : get_or<std::string>(config, "suite", "");
  if (suite.empty()) {
    std::cerr << "verify: a suite is required (one of:";
    for (const auto& s : suite_names()) std::cerr << ' ' << s;
    std::cerr << ")\n";
    return kUsage;
  }
  const auto results = run_suite(suite, config);
  Json report = Json::array();
  bool all = true;
  for (const auto& r : results) {
    Json line{{"suite", r.suite}, {"check", r.check}, {"pass", r.pass}, {"detail", r.detail}};
    std::cout << line.dump() << "\n";
    report.push_back(line);
    all = all && r.pass;
  }
  if (!o.out.empty() && o.out != "-") {
    const fs::path dir = prepare_out(o);
    write_atomic(dir / "report.json", report.dump(2) + "\n");
  }
  return all ? kOk : kCheckFailed;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--seed", o.seed, "master seed");
  app->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--set", o.overrides, "override KEY=VALUE (repeatable, last wins)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Galton-Watson trees, percolation, divide-and-color and mutation models"};
  app.require_subcommand(1);
  Options o;
  auto* sim = app.add_subcommand("simulate", "sample a tree and its percolation or coloring");
  auto* est = app.add_subcommand("estimate", "survival estimates over a grid (and a critical bracket with tol)");
  auto* ver = app.add_subcommand("verify", "run a verification suite");
  auto* swp = app.add_subcommand("sweep", "survival sweep with plot data");
  auto* orc = app.add_subcommand("oracle", "exact law by enumeration");
  auto* exp = app.add_subcommand("export", "DOT or plot data from earlier artifacts");
  for (auto* sub : {sim, est, ver, swp, orc, exp}) add_common(sub, o);
  ver->add_option("--suite", o.suite, "correspondences, prop4.1, haggstrom, thm5.1, thm5.2, extinction, all")
      ->each([&](const std::string&) { o.suite_given = true; });
  exp->add_option("--input", o.input, "artifact directory or estimates.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return simulate(o);
    if (*est) return estimate(o, false);
    if (*swp) return estimate(o, true);
    if (*orc) return oracle(o);
    if (*exp) return export_artifacts(o);
    if (*ver) return verify(o);
  } catch (const Error& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
    switch (e.code()) {
      case Errc::bad_config:
      case Errc::unknown_model:
      case Errc::unknown_suite:
      case Errc::plan_invalid:
      case Errc::parse_error:
      case Errc::invalid_argument:
        return kUsage;
      default:
        return kRuntime;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
