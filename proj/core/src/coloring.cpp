#include "geneaperc/coloring.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "geneaperc/error.hpp"
#include "json.hpp"

namespace geneaperc {

namespace {

void check_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(Errc::invalid_argument, std::string(what) + " must lie in [0, 1]");
}

// Uniform color on [d] \ {excluded}.
Color other_color(Color excluded, std::uint32_t d, Rng& rng) {
  const auto k = static_cast<Color>(rng.below(d - 1)) + 1;
  return k < excluded ? k : k + 1;
}

Color uniform_color(std::uint32_t d, Rng& rng) { return static_cast<Color>(rng.below(d)) + 1; }

std::vector<double> edge_uniforms(const Tree& t, Rng& rng) {
  std::vector<double> u(t.edge_count());
  for (auto& x : u) x = rng.uniform();
  return u;
}

EdgeConfig threshold(const std::vector<double>& u, double p) {
  std::vector<std::uint8_t> open(u.size());
  for (std::size_t e = 0; e < u.size(); ++e) open[e] = u[e] <= p ? 1 : 0;
  return EdgeConfig(std::move(open), p);
}

double multinomial(std::span<const std::uint32_t> v) {
  double out = 1.0;
  std::uint32_t n = 0;
  for (std::uint32_t x : v) {
    for (std::uint32_t j = 1; j <= x; ++j) out = out * static_cast<double>(n + j) / j;
    n += x;
  }
  return out;
}

double binomial(std::uint32_t n, std::uint32_t k) {
  double out = 1.0;
  for (std::uint32_t j = 1; j <= k; ++j) out = out * static_cast<double>(n - k + j) / j;
  return out;
}

void check_vector(const MutationParams& params, Color mother_type, std::span<const std::uint32_t> v) {
  params.validate(true);
  if (v.size() != params.d) {
    throw Error(Errc::invalid_vector, "count vector has " + std::to_string(v.size()) +
                                          " entries, expected " + std::to_string(params.d));
  }
  if (mother_type < 1 || mother_type > params.d) {
    throw Error(Errc::type_out_of_range, "mother type " + std::to_string(mother_type) + " out of range");
  }
}

MutationSample grow_mutation(Model model, const GrowthBudget& budget, const MutationParams& params,
                             Color root_type, Seed seed) {
  budget.validate();
  params.validate(true);
  if (root_type < 1 || root_type > params.d) {
    throw Error(Errc::type_out_of_range, "root type " + std::to_string(root_type) + " out of range");
  }
  Rng rng(seed);
  std::vector<std::uint32_t> counts;
  std::vector<Color> types{root_type};
  std::vector<std::uint8_t> clone{1};
  MutationSample out;

  std::size_t begin = 0, end = 1;
  std::uint32_t generation = 0;
  bool stopped = false;
  while (begin < end && !stopped) {
    if (generation == budget.max_generation) {
      out.truncated = true;
      out.stop = StopReason::generation_limit;
      break;
    }
    for (std::size_t v = begin; v < end; ++v) {
      const auto children = sample_mutation_event(model, params, types[v], rng);
      if (types.size() + children.size() > budget.max_vertices) {
        out.truncated = true;
        out.stop = StopReason::vertex_limit;
        stopped = true;
        break;
      }
      counts.push_back(static_cast<std::uint32_t>(children.size()));
      for (const auto& c : children) {
        types.push_back(c.type);
        clone.push_back(c.clone ? 1 : 0);
      }
    }
    begin = end;
    end = types.size();
    ++generation;
  }
  counts.resize(types.size(), 0);

  std::vector<VertexId> to_pre;
  out.tree = Tree::from_breadth_first_counts(counts, &to_pre);
  out.types.values.assign(types.size(), 0);
  out.clone.assign(out.tree.edge_count(), 0);
  for (std::size_t b = 0; b < types.size(); ++b) {
    out.types.values[to_pre[b]] = types[b];
    if (b != 0) out.clone[edge_of(to_pre[b])] = clone[b];
  }
  return out;
}

template <class Pmf>
TypedOffspringLaw typed_law(const MutationParams& params, std::uint32_t max_children, Pmf&& pmf) {
  params.validate(true);
  const std::uint32_t top = params.base.max_support().value_or(max_children);
  std::vector<std::vector<TypedOutcome>> per_type(params.d);
  for (Color i = 1; i <= params.d; ++i) {
    for (std::uint32_t n = 0; n <= top; ++n) {
      if (params.base.pmf(n) == 0.0) continue;
      for (auto& v : compositions(n, params.d)) {
        const double p = pmf(params, i, v);
        if (p > 0.0) per_type[i - 1].push_back({std::move(v), p});
      }
    }
    // Renormalize the cut tail of unbounded laws.
    double total = 0.0;
    for (const auto& o : per_type[i - 1]) total += o.probability;
    for (auto& o : per_type[i - 1]) o.probability /= total;
  }
  return TypedOffspringLaw(std::move(per_type));
}

}  // namespace

std::string_view to_string(Model model) noexcept {
  switch (model) {
    case Model::bernoulli: return "bernoulli";
    case Model::dac: return "dac";
    case Model::restricted_dac: return "restricted-dac";
    case Model::infinite_alleles: return "infinite-alleles";
    case Model::mdm: return "mdm";
    case Model::mim: return "mim";
  }
  return "?";
}

Model parse_model(std::string_view name) {
  static const std::map<std::string_view, Model> names{
      {"bernoulli", Model::bernoulli},         {"percolation", Model::bernoulli},
      {"dac", Model::dac},                     {"restricted-dac", Model::restricted_dac},
      {"restrictedDac", Model::restricted_dac}, {"restricted_dac", Model::restricted_dac},
      {"infinite-alleles", Model::infinite_alleles}, {"infiniteAlleles", Model::infinite_alleles},
      {"infinite_alleles", Model::infinite_alleles}, {"mdm", Model::mdm}, {"mim", Model::mim}};
  const auto it = names.find(name);
  if (it == names.end()) throw Error(Errc::unknown_model, "unknown model '" + std::string(name) + "'");
  return it->second;
}

ColorDistribution::ColorDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw Error(Errc::invalid_argument, "color distribution needs at least one color");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(Errc::invalid_argument, "color weights must lie in [0, 1]");
    total += w;
    cdf_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(Errc::invalid_argument, "color weights must sum to 1");
  cdf_.back() = 1.0;
  uniform_ = std::all_of(weights_.begin(), weights_.end(),
                         [&](double w) { return w == weights_.front(); });
}

ColorDistribution ColorDistribution::uniform(std::uint32_t d) {
  if (d == 0) throw Error(Errc::invalid_argument, "color distribution needs at least one color");
  return ColorDistribution(std::vector<double>(d, 1.0 / d));
}

double ColorDistribution::weight(Color c) const {
  if (c < 1 || c > colors()) throw Error(Errc::type_out_of_range, "color " + std::to_string(c) + " out of range");
  return weights_[c - 1];
}

Color ColorDistribution::sample(Rng& rng) const {
  if (uniform_) return uniform_color(colors(), rng);
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<Color>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1)) + 1;
}

void MutationParams::validate(bool finite_types) const {
  check_probability(r, "mutation probability");
  if (finite_types && d < 2) throw Error(Errc::invalid_argument, "finite-allele models need d >= 2");
}

ColoredConfig dac_color(const Tree& t, double p, const ColorDistribution& colors, Seed seed,
                        std::optional<Color> root_color) {
  check_probability(p, "retention");
  if (root_color && (*root_color < 1 || *root_color > colors.colors())) {
    throw Error(Errc::type_out_of_range, "root color out of range");
  }
  Rng rng(seed);
  ColoredConfig out;
  out.edges = threshold(edge_uniforms(t, rng), p);
  out.coloring.values.resize(t.size());
  // Preorder visits cluster roots in lexicographic order, and every
  // non-root member after its parent.
  for (VertexId v = 0; v < t.size(); ++v) {
    if (v == 0) out.coloring.values[v] = root_color ? *root_color : colors.sample(rng);
    else out.coloring.values[v] = out.edges.open(edge_of(v)) ? out.coloring.values[t.parent(v)] : colors.sample(rng);
  }
  out.root_color = out.coloring.values[0];
  return out;
}

ColoredConfig restricted_dac_color(const Tree& t, double p, std::uint32_t d,
                                   std::optional<Color> root_color, Seed seed) {
  check_probability(p, "retention");
  if (d < 2) throw Error(Errc::invalid_argument, "restricted DaC needs d >= 2");
  if (root_color && (*root_color < 1 || *root_color > d)) {
    throw Error(Errc::type_out_of_range, "root color out of range");
  }
  Rng rng(seed);
  ColoredConfig out;
  out.edges = threshold(edge_uniforms(t, rng), p);
  out.coloring.values.resize(t.size());
  out.coloring.values[0] = root_color ? *root_color : uniform_color(d, rng);
  for (VertexId v = 1; v < t.size(); ++v) {
    const Color mother = out.coloring.values[t.parent(v)];
    out.coloring.values[v] = out.edges.open(edge_of(v)) ? mother : other_color(mother, d, rng);
  }
  out.root_color = out.coloring.values[0];
  return out;
}

ColoredConfig infinite_alleles_color(const Tree& t, double r, Seed seed) {
  check_probability(r, "mutation probability");
  Rng rng(seed);
  ColoredConfig out;
  out.edges = threshold(edge_uniforms(t, rng), 1.0 - r);
  out.coloring.values.resize(t.size());
  Color next = 1;
  for (VertexId v = 1; v < t.size(); ++v) {
    out.coloring.values[v] = out.edges.open(edge_of(v)) ? out.coloring.values[t.parent(v)] : next++;
  }
  return out;
}

ColoredConfig mutation_color(const Tree& t, Model model, double r, std::uint32_t d,
                             Color root_type, Seed seed) {
  if (model != Model::mdm && model != Model::mim) {
    throw Error(Errc::unknown_model, "mutation_color handles mdm and mim only");
  }
  check_probability(r, "mutation probability");
  if (d < 2) throw Error(Errc::invalid_argument, "finite-allele models need d >= 2");
  if (root_type < 1 || root_type > d) throw Error(Errc::type_out_of_range, "root type out of range");
  Rng rng(seed);
  ColoredConfig out;
  out.edges = threshold(edge_uniforms(t, rng), 1.0 - r);
  out.coloring.values.resize(t.size());
  out.coloring.values[0] = root_type;
  for (VertexId v = 1; v < t.size(); ++v) {
    const Color mother = out.coloring.values[t.parent(v)];
    if (out.edges.open(edge_of(v))) out.coloring.values[v] = mother;
    else out.coloring.values[v] = model == Model::mdm ? other_color(mother, d, rng) : uniform_color(d, rng);
  }
  out.root_color = root_type;
  return out;
}

std::vector<MutantChild> sample_mutation_event(Model model, const MutationParams& params,
                                               Color mother_type, Rng& rng) {
  if (model != Model::mdm && model != Model::mim) {
    throw Error(Errc::unknown_model, "mutation events exist for mdm and mim only");
  }
  const std::uint32_t k = params.base.sample(rng);
  std::vector<MutantChild> children(k);
  for (auto& c : children) {
    c.clone = rng.uniform() <= 1.0 - params.r;
    if (c.clone) c.type = mother_type;
    else c.type = model == Model::mdm ? other_color(mother_type, params.d, rng) : uniform_color(params.d, rng);
  }
  return children;
}

MutationSample mdm_sample(const GrowthBudget& budget, const MutationParams& params, Color root_type,
                          Seed seed) {
  return grow_mutation(Model::mdm, budget, params, root_type, seed);
}

MutationSample mim_sample(const GrowthBudget& budget, const MutationParams& params, Color root_type,
                          Seed seed) {
  return grow_mutation(Model::mim, budget, params, root_type, seed);
}

double mdm_offspring_pmf(const MutationParams& params, Color mother_type,
                         std::span<const std::uint32_t> v) {
  check_vector(params, mother_type, v);
  const std::uint32_t n = std::accumulate(v.begin(), v.end(), 0U);
  const std::uint32_t same = v[mother_type - 1];
  const double other = params.r / (params.d - 1);
  return params.base.pmf(n) * multinomial(v) * std::pow(1.0 - params.r, same) * std::pow(other, n - same);
}

double mim_offspring_pmf(const MutationParams& params, Color mother_type,
                         std::span<const std::uint32_t> v) {
  check_vector(params, mother_type, v);
  const std::uint32_t n = std::accumulate(v.begin(), v.end(), 0U);
  const std::uint32_t same = v[mother_type - 1];
  std::vector<std::uint32_t> mutants(v.begin(), v.end());
  double sum = 0.0;
  for (std::uint32_t k = 0; k <= same; ++k) {
    mutants[mother_type - 1] = same - k;
    sum += binomial(n, k) * std::pow(1.0 - params.r, k) * std::pow(params.r, n - k) *
           multinomial(mutants) * std::pow(1.0 / params.d, n - k);
  }
  return params.base.pmf(n) * sum;
}

TypedOffspringLaw mdm_typed_law(const MutationParams& params, std::uint32_t max_children) {
  return typed_law(params, max_children, mdm_offspring_pmf);
}

TypedOffspringLaw mim_typed_law(const MutationParams& params, std::uint32_t max_children) {
  return typed_law(params, max_children, mim_offspring_pmf);
}

std::vector<std::vector<std::uint32_t>> compositions(std::uint32_t total, std::uint32_t parts) {
  if (parts == 0) throw Error(Errc::invalid_argument, "compositions need at least one part");
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> v(parts, 0);
  // Lexicographic order with the first coordinate varying slowest.
  auto rec = [&](auto&& self, std::uint32_t pos, std::uint32_t left) -> void {
    if (pos + 1 == parts) {
      v[pos] = left;
      out.push_back(v);
      return;
    }
    for (std::uint32_t x = 0; x <= left; ++x) {
      v[pos] = x;
      self(self, pos + 1, left - x);
    }
  };
  rec(rec, 0, total);
  return out;
}

std::vector<std::uint8_t> same_type_root_mask(const Tree& t, const Coloring& col) {
  if (col.size() != t.size()) throw Error(Errc::index_mismatch, "coloring size differs from tree size");
  std::vector<std::uint8_t> in(t.size(), 0);
  in[0] = 1;
  for (VertexId v = 1; v < t.size(); ++v) in[v] = in[t.parent(v)] && col[v] == col[0];
  return in;
}

Tree same_type_root_component(const Tree& t, const Coloring& col) {
  const auto in = same_type_root_mask(t, col);
  std::vector<std::uint32_t> counts;
  for (VertexId v = 0; v < t.size(); ++v) {
    if (!in[v]) continue;
    std::uint32_t k = 0;
    for (VertexId c : t.children(v)) k += in[c];
    counts.push_back(k);
  }
  return Tree::from_preorder_counts(std::move(counts));
}

std::uint32_t same_type_root_component_size(const Tree& t, const Coloring& col) {
  const auto in = same_type_root_mask(t, col);
  return static_cast<std::uint32_t>(std::count(in.begin(), in.end(), 1));
}

double effective_retention(double p, double a_root) {
  check_probability(p, "retention");
  check_probability(a_root, "root color weight");
  return 1.0 - (1.0 - p) * (1.0 - a_root);
}

DacCritical dac_critical_bgw(double m, double a_root) {
  if (!(m > 1.0)) throw Error(Errc::invalid_argument, "mean must exceed 1");
  if (!(a_root >= 0.0 && a_root < 1.0)) throw Error(Errc::invalid_argument, "root color weight must lie in [0, 1)");
  if (m * a_root >= 1.0) return {0.0, true};
  return {(1.0 - m * a_root) / (m * (1.0 - a_root)), false};
}

std::string coloring_dot(const Tree& t, const Coloring& col, const EdgeConfig* edges) {
  if (col.size() != t.size()) throw Error(Errc::index_mismatch, "coloring size differs from tree size");
  static constexpr const char* kPalette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                             "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  auto node = [&](VertexId v) {
    std::ostringstream os;
    os << "color_value=" << col[v] << ", style=filled, fillcolor=\"" << kPalette[col[v] % 8] << '"';
    return os.str();
  };
  std::function<std::string(EdgeIndex)> edge;
  if (edges != nullptr) {
    edge = [edges](EdgeIndex e) { return edges->open(e) ? std::string() : std::string("style=dashed"); };
  }
  return to_dot(t, node, edge);
}

std::string coloring_json(const Tree& t, const Coloring& col) {
  if (col.size() != t.size()) throw Error(Errc::index_mismatch, "coloring size differs from tree size");
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (VertexId v = 0; v < t.size(); ++v) {
    records.push_back({{"vertex", t.label(v).to_string()}, {"colorOrAllele", col[v]}});
  }
  return records.dump();
}

std::string allelic_partition_csv(const Coloring& col) {
  std::map<Color, std::size_t> blocks;
  for (Color c : col.values) ++blocks[c];
  std::ostringstream os;
  os << "alleleId,blockSize\n";
  for (const auto& [id, size] : blocks) os << id << ',' << size << '\n';
  return os.str();
}

}  // namespace geneaperc
