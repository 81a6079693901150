#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geneaperc/genealogy.hpp"
#include "geneaperc/random.hpp"

namespace geneaperc {

/// Open/closed state of every edge of a tree, indexed by EdgeIndex.
class EdgeConfig {
 public:
  EdgeConfig() = default;
  EdgeConfig(std::vector<std::uint8_t> open, double retention);

  static EdgeConfig uniform_state(std::size_t edges, bool open, double retention);

  std::size_t size() const noexcept { return open_.size(); }
  bool open(EdgeIndex e) const { return open_[e] != 0; }
  std::size_t open_count() const noexcept;
  /// The parameter p the configuration was drawn at.
  double retention() const noexcept { return retention_; }
  std::span<const std::uint8_t> bits() const noexcept { return open_; }

  friend bool operator==(const EdgeConfig& a, const EdgeConfig& b) { return a.open_ == b.open_; }

 private:
  std::vector<std::uint8_t> open_;
  double retention_ = 0.0;
};

/// One U(0, 1] value per edge. Thresholding at p gives a Bernoulli(p)
/// configuration, and the open sets are nested in p.
struct UniformEdgeNoise {
  std::vector<double> values;
};

UniformEdgeNoise sample_noise(const Tree& tree, Seed seed);
/// Edge e is open iff values[e] <= p.
EdgeConfig threshold_noise(const UniformEdgeNoise& noise, double p);

/// Independent Bernoulli(p) bond percolation; equals
/// threshold_noise(sample_noise(tree, seed), p).
EdgeConfig percolate(const Tree& tree, double p, Seed seed);

/// Clusters of the open subgraph. Each cluster is named by its rootmost
/// (lexicographically smallest) vertex, so the root's cluster is 0.
struct ClusterPartition {
  std::vector<VertexId> cluster_of;
  std::vector<VertexId> roots;        // ascending
  std::vector<std::uint32_t> sizes;   // sizes[i] belongs to roots[i]

  std::size_t cluster_count() const noexcept { return roots.size(); }
  std::uint32_t size_of(VertexId cluster_root) const;
  std::uint32_t root_cluster_size() const { return sizes.front(); }

  friend bool operator==(const ClusterPartition&, const ClusterPartition&) = default;
};

ClusterPartition clusters(const Tree& tree, const EdgeConfig& config);
/// Same partition, with the open edges merged in the given order.
ClusterPartition clusters(const Tree& tree, const EdgeConfig& config,
                          std::span<const EdgeIndex> merge_order);

/// The open cluster of the root as a relabeled tree.
Tree root_cluster_tree(const Tree& tree, const EdgeConfig& config);
std::uint32_t root_cluster_size(const Tree& tree, const EdgeConfig& config);

/// p_c of the complete d-ary tree, 1/d.
double critical_dary(std::uint32_t arity);
/// p_c of a BGW tree with mean m > 1, given non-extinction: 1/m.
double critical_bgw(double mean);

/// True when the largest cluster holds at least a fraction r of the vertices.
bool is_giant(const ClusterPartition& partition, double r);
/// The n largest cluster sizes, decreasing; ties go to the smaller cluster id.
std::vector<std::uint32_t> largest_clusters(const ClusterPartition& partition, std::size_t n);

/// Finite-graph supercriticality at parameter p: |V| >= 2 eps^-3 and
/// P_{(1-eps)p}(|K_1| >= eps * threshold_size) >= eps. The probability is a
/// Monte Carlo estimate; threshold_size defaults to |V|.
struct SupercriticalCheck {
  bool size_condition = false;
  double probability = 0.0;
  bool supercritical = false;
};
SupercriticalCheck epsilon_supercritical(const Tree& tree, double p, double eps,
                                         std::optional<double> threshold_size,
                                         std::size_t replicates, Seed seed);

/// Text format: one header line
///   # geneaperc-edges v1 tree=<16 hex digits> p=<retention> edges=<count>
/// followed by one line of '0'/'1' characters in edge order.
void write_edge_config(const Tree& tree, const EdgeConfig& config, std::ostream& os);
/// Throws Errc::index_mismatch when the header does not match `tree`.
EdgeConfig read_edge_config(const Tree& tree, std::istream& is);

/// {"p", "seed", "rootClusterSize", "largest", "giantFlag"} on one line.
std::string cluster_stats_json(double p, Seed seed, const ClusterPartition& partition,
                               double giant_fraction);

}  // namespace geneaperc
