#include <sstream>

#include "doctest.h"
#include "geneaperc/branching.hpp"
#include "geneaperc/error.hpp"
#include "geneaperc/percolation.hpp"

using namespace geneaperc;

TEST_CASE("percolate extremes") {
  const Tree t = complete_tree(2, 4);
  CHECK(percolate(t, 1.0, 3).open_count() == t.edge_count());
  CHECK(percolate(t, 0.0, 3).open_count() == 0);
  CHECK(percolate(t, 0.5, 3) == percolate(t, 0.5, 3));
  CHECK_THROWS_AS(percolate(t, 1.5, 3), Error);
}

TEST_CASE("percolate open fraction" * doctest::test_suite("statistical")) {
  const Tree t = star_tree(100'000);
  const double fraction = static_cast<double>(percolate(t, 0.5, 17).open_count()) / t.edge_count();
  CHECK(std::abs(fraction - 0.5) < 0.006);
}

TEST_CASE("noise thresholds") {
  const Tree t = complete_tree(3, 4);
  const auto noise = sample_noise(t, 8);
  CHECK(noise.values.size() == t.edge_count());
  CHECK(threshold_noise(noise, 0.0).open_count() == 0);
  CHECK(threshold_noise(noise, 1.0).open_count() == t.edge_count());
  CHECK(threshold_noise(noise, 0.37) == percolate(t, 0.37, 8));
  std::uint32_t last = 0;
  for (int i = 1; i <= 9; ++i) {
    const auto size = root_cluster_size(t, threshold_noise(noise, i / 10.0));
    CHECK(size >= last);
    last = size;
  }
}

TEST_CASE("clusters") {
  const Tree t = complete_tree(2, 2);
  const auto all = clusters(t, EdgeConfig::uniform_state(t.edge_count(), true, 1.0));
  CHECK(all.cluster_count() == 1);
  CHECK(all.root_cluster_size() == t.size());
  const auto none = clusters(t, EdgeConfig::uniform_state(t.edge_count(), false, 0.0));
  CHECK(none.cluster_count() == t.size());
  CHECK(none.root_cluster_size() == 1);

  // Path with its first edge open and the second closed.
  const Tree path = path_tree(2);
  const auto p = clusters(path, EdgeConfig({1, 0}, 0.5));
  CHECK(p.cluster_count() == 2);
  CHECK(p.root_cluster_size() == 2);
  CHECK(p.cluster_of == std::vector<VertexId>{0, 0, 2});
  CHECK(p.size_of(2) == 1);

  CHECK_THROWS_AS(clusters(t, EdgeConfig({1, 0}, 0.5)), Error);
  const std::vector<EdgeIndex> order{5, 0, 3};
  CHECK(clusters(t, EdgeConfig({1, 1, 0, 1, 0, 1}, 0.5), order) == clusters(t, EdgeConfig({1, 1, 0, 1, 0, 1}, 0.5)));
  const std::vector<EdgeIndex> bad{9};
  CHECK_THROWS_AS(clusters(t, EdgeConfig({1, 1, 0, 1, 0, 1}, 0.5), bad), Error);
}

TEST_CASE("root cluster tree") {
  const Tree t = complete_tree(2, 2);
  CHECK(root_cluster_tree(t, EdgeConfig::uniform_state(6, true, 1.0)) == t);
  CHECK(root_cluster_tree(t, EdgeConfig::uniform_state(6, false, 0.0)).size() == 1);
  // Preorder edges: 1, 11, 12, 2, 21, 22. Open 1 and 12 and 2.
  const Tree r = root_cluster_tree(t, EdgeConfig({1, 0, 1, 1, 0, 0}, 0.5));
  CHECK(r == Tree::from_preorder_counts({2, 1, 0, 0}));

  // Enumerate the four configurations on the depth-1 binary tree.
  const Tree d1 = complete_tree(2, 1);
  std::map<std::uint32_t, int> counts;
  for (int mask = 0; mask < 4; ++mask) {
    ++counts[root_cluster_size(d1, EdgeConfig({std::uint8_t(mask & 1), std::uint8_t(mask >> 1)}, 0.5))];
  }
  CHECK(counts == std::map<std::uint32_t, int>{{1, 1}, {2, 2}, {3, 1}});
}

TEST_CASE("critical values") {
  CHECK(critical_dary(2) == 0.5);
  CHECK(critical_dary(10) == doctest::Approx(0.1));
  CHECK_THROWS_AS(critical_dary(1), Error);
  CHECK(critical_bgw(2.0) == 0.5);
  CHECK(critical_bgw(1.25) == doctest::Approx(0.8));
  CHECK_THROWS_AS(critical_bgw(1.0), Error);
  CHECK(critical_bgw(OffspringLaw::uniform(1, 3).mean()) == 0.5);
}

TEST_CASE("giant clusters and ranking") {
  const Tree t = complete_tree(2, 2);
  CHECK(is_giant(clusters(t, EdgeConfig::uniform_state(6, true, 1.0)), 0.5));
  CHECK_FALSE(is_giant(clusters(t, EdgeConfig::uniform_state(6, false, 0.0)), 0.5));
  CHECK_THROWS_AS(is_giant(clusters(t, EdgeConfig::uniform_state(6, true, 1.0)), 1.5), Error);

  ClusterPartition fig6;
  fig6.roots = {0, 2, 5, 7};
  fig6.sizes = {3, 4, 1, 2};
  CHECK(largest_clusters(fig6, 4) == std::vector<std::uint32_t>{4, 3, 2, 1});
  CHECK(largest_clusters(fig6, 2) == std::vector<std::uint32_t>{4, 3});
}

TEST_CASE("epsilon supercritical") {
  const Tree t = complete_tree(2, 10);
  const auto hi = epsilon_supercritical(t, 1.0, 0.1, std::nullopt, 200, 1);
  CHECK(hi.size_condition);
  CHECK(hi.supercritical);
  const auto lo = epsilon_supercritical(t, 0.2, 0.1, std::nullopt, 200, 1);
  CHECK_FALSE(lo.supercritical);
}

TEST_CASE("edge config text round trip") {
  const Tree t = complete_tree(3, 3);
  const auto c = percolate(t, 0.3, 4);
  std::stringstream ss;
  write_edge_config(t, c, ss);
  CHECK(read_edge_config(t, ss) == c);
  std::stringstream again;
  write_edge_config(t, c, again);
  CHECK_THROWS_AS(read_edge_config(complete_tree(2, 3), again), Error);
  const std::string json = cluster_stats_json(0.3, 4, clusters(t, c), 0.5);
  CHECK(json.find("rootClusterSize") != std::string::npos);
}
