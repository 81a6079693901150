#include "geneaperc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "geneaperc/error.hpp"
#include "json.hpp"

namespace geneaperc {

namespace {

void check_retention(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "retention must lie in [0, 1]");
}

void check_aligned(const Tree& tree, const EdgeConfig& config) {
  if (config.size() != tree.edge_count()) {
    throw Error(Errc::index_mismatch, "configuration has " + std::to_string(config.size()) +
                                          " edges, tree has " + std::to_string(tree.edge_count()));
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  VertexId find(VertexId v) {
    VertexId r = v;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[v] != r) {
      const VertexId next = parent_[v];
      parent_[v] = r;
      v = next;
    }
    return r;
  }

  // The smaller representative wins, which keeps every set named by its
  // rootmost vertex.
  void unite(VertexId a, VertexId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<VertexId> parent_;
};

ClusterPartition summarize(DisjointSets& sets, std::size_t n) {
  ClusterPartition out;
  out.cluster_of.resize(n);
  std::vector<std::uint32_t> slot(n, 0);
  for (VertexId v = 0; v < n; ++v) {
    const VertexId r = sets.find(v);
    out.cluster_of[v] = r;
    if (r == v) {
      slot[v] = static_cast<std::uint32_t>(out.roots.size());
      out.roots.push_back(v);
      out.sizes.push_back(0);
    }
    ++out.sizes[slot[r]];
  }
  return out;
}

}  // namespace

EdgeConfig::EdgeConfig(std::vector<std::uint8_t> open, double retention)
    : open_(std::move(open)), retention_(retention) {
  for (auto& bit : open_) bit = bit ? 1 : 0;
}

EdgeConfig EdgeConfig::uniform_state(std::size_t edges, bool open, double retention) {
  return EdgeConfig(std::vector<std::uint8_t>(edges, open ? 1 : 0), retention);
}

std::size_t EdgeConfig::open_count() const noexcept {
  return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), 1));
}

UniformEdgeNoise sample_noise(const Tree& tree, Seed seed) {
  Rng rng(seed);
  UniformEdgeNoise noise;
  noise.values.resize(tree.edge_count());
  for (auto& u : noise.values) u = rng.uniform();
  return noise;
}

EdgeConfig threshold_noise(const UniformEdgeNoise& noise, double p) {
  check_retention(p);
  std::vector<std::uint8_t> open(noise.values.size());
  for (std::size_t e = 0; e < open.size(); ++e) open[e] = noise.values[e] <= p ? 1 : 0;
  return EdgeConfig(std::move(open), p);
}

EdgeConfig percolate(const Tree& tree, double p, Seed seed) {
  return threshold_noise(sample_noise(tree, seed), p);
}

std::uint32_t ClusterPartition::size_of(VertexId cluster_root) const {
  const auto it = std::lower_bound(roots.begin(), roots.end(), cluster_root);
  if (it == roots.end() || *it != cluster_root) {
    throw Error(Errc::vertex_not_found, "vertex " + std::to_string(cluster_root) + " names no cluster");
  }
  return sizes[static_cast<std::size_t>(it - roots.begin())];
}

ClusterPartition clusters(const Tree& tree, const EdgeConfig& config) {
  check_aligned(tree, config);
  DisjointSets sets(tree.size());
  for (EdgeIndex e = 0; e < config.size(); ++e) {
    if (config.open(e)) sets.unite(tree.parent(child_of(e)), child_of(e));
  }
  return summarize(sets, tree.size());
}

ClusterPartition clusters(const Tree& tree, const EdgeConfig& config,
                          std::span<const EdgeIndex> merge_order) {
  check_aligned(tree, config);
  DisjointSets sets(tree.size());
  for (EdgeIndex e : merge_order) {
    if (e >= config.size()) throw Error(Errc::index_mismatch, "edge index out of range");
    if (config.open(e)) sets.unite(tree.parent(child_of(e)), child_of(e));
  }
  // Edges absent from merge_order are still merged so that the result never
  // depends on the order given.
  for (EdgeIndex e = 0; e < config.size(); ++e) {
    if (config.open(e)) sets.unite(tree.parent(child_of(e)), child_of(e));
  }
  return summarize(sets, tree.size());
}

Tree root_cluster_tree(const Tree& tree, const EdgeConfig& config) {
  check_aligned(tree, config);
  std::vector<std::uint8_t> inside(tree.size(), 0);
  inside[0] = 1;
  std::vector<std::uint32_t> counts;
  for (VertexId v = 0; v < tree.size(); ++v) {
    if (v != 0) inside[v] = inside[tree.parent(v)] && config.open(edge_of(v));
    if (!inside[v]) continue;
    std::uint32_t open_children = 0;
    for (VertexId c : tree.children(v)) open_children += config.open(edge_of(c)) ? 1 : 0;
    counts.push_back(open_children);
  }
  return Tree::from_preorder_counts(std::move(counts));
}

std::uint32_t root_cluster_size(const Tree& tree, const EdgeConfig& config) {
  check_aligned(tree, config);
  std::vector<std::uint8_t> inside(tree.size(), 0);
  inside[0] = 1;
  std::uint32_t size = 1;
  for (VertexId v = 1; v < tree.size(); ++v) {
    inside[v] = inside[tree.parent(v)] && config.open(edge_of(v));
    size += inside[v];
  }
  return size;
}

double critical_dary(std::uint32_t arity) {
  if (arity < 2) throw Error(Errc::invalid_argument, "the d-ary tree needs d >= 2");
  return 1.0 / arity;
}

double critical_bgw(double mean) {
  if (!(mean > 1.0)) {
    throw Error(Errc::invalid_argument, "a BGW tree with mean <= 1 is finite almost surely");
  }
  return 1.0 / mean;
}

bool is_giant(const ClusterPartition& partition, double r) {
  if (!(r > 0.0 && r < 1.0)) throw Error(Errc::invalid_argument, "giant fraction must lie in (0, 1)");
  const auto largest = *std::max_element(partition.sizes.begin(), partition.sizes.end());
  return static_cast<double>(largest) >= r * static_cast<double>(partition.cluster_of.size());
}

std::vector<std::uint32_t> largest_clusters(const ClusterPartition& partition, std::size_t n) {
  std::vector<std::size_t> order(partition.roots.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return partition.sizes[a] > partition.sizes[b];
  });
  order.resize(std::min(n, order.size()));
  std::vector<std::uint32_t> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(partition.sizes[i]);
  return out;
}

SupercriticalCheck epsilon_supercritical(const Tree& tree, double p, double eps,
                                         std::optional<double> threshold_size,
                                         std::size_t replicates, Seed seed) {
  check_retention(p);
  if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::invalid_argument, "eps must lie in (0, 1)");
  if (replicates == 0) throw Error(Errc::invalid_argument, "need at least one replicate");
  SupercriticalCheck out;
  const double n = static_cast<double>(tree.size());
  out.size_condition = n >= 2.0 / (eps * eps * eps);
  const double target = eps * threshold_size.value_or(n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < replicates; ++k) {
    const auto partition = clusters(tree, percolate(tree, (1.0 - eps) * p, derive_seed(seed, k)));
    const auto largest = *std::max_element(partition.sizes.begin(), partition.sizes.end());
    if (static_cast<double>(largest) >= target) ++hits;
  }
  out.probability = static_cast<double>(hits) / static_cast<double>(replicates);
  out.supercritical = out.size_condition && out.probability >= eps;
  return out;
}

void write_edge_config(const Tree& tree, const EdgeConfig& config, std::ostream& os) {
  check_aligned(tree, config);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(tree.hash()));
  char p[32];
  std::snprintf(p, sizeof p, "%.17g", config.retention());
  os << "# geneaperc-edges v1 tree=" << hash << " p=" << p << " edges=" << config.size() << '\n';
  std::string bits(config.size(), '0');
  for (std::size_t e = 0; e < config.size(); ++e) bits[e] = config.open(static_cast<EdgeIndex>(e)) ? '1' : '0';
  os << bits << '\n';
}

EdgeConfig read_edge_config(const Tree& tree, std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error(Errc::parse_error, "missing edge configuration header");
  std::istringstream fields(header);
  std::string pound, name, ver, tree_kv, p_kv, edges_kv;
  fields >> pound >> name >> ver >> tree_kv >> p_kv >> edges_kv;
  if (pound != "#" || name != "geneaperc-edges" || ver != "v1" || tree_kv.rfind("tree=", 0) != 0 ||
      p_kv.rfind("p=", 0) != 0 || edges_kv.rfind("edges=", 0) != 0) {
    throw Error(Errc::parse_error, "bad edge configuration header");
  }
  const std::uint64_t hash = std::stoull(tree_kv.substr(5), nullptr, 16);
  const double p = std::stod(p_kv.substr(2));
  const std::size_t edges = std::stoull(edges_kv.substr(6));
  if (hash != tree.hash() || edges != tree.edge_count()) {
    throw Error(Errc::index_mismatch, "edge configuration was written for a different tree");
  }
  std::string bits;
  std::getline(is, bits);
  if (!bits.empty() && bits.back() == '\r') bits.pop_back();
  if (bits.size() != edges) throw Error(Errc::parse_error, "bitstring length does not match header");
  std::vector<std::uint8_t> open(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    if (bits[e] != '0' && bits[e] != '1') throw Error(Errc::parse_error, "bitstring holds non-binary digit");
    open[e] = bits[e] == '1';
  }
  return EdgeConfig(std::move(open), p);
}

std::string cluster_stats_json(double p, Seed seed, const ClusterPartition& partition,
                               double giant_fraction) {
  nlohmann::ordered_json record;
  record["p"] = p;
  record["seed"] = seed;
  record["rootClusterSize"] = partition.root_cluster_size();
  const auto top = largest_clusters(partition, 1);
  record["largest"] = top.empty() ? 0U : top.front();
  record["giantFlag"] = is_giant(partition, giant_fraction);
  return record.dump();
}

}  // namespace geneaperc
