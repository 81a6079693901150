#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "geneaperc/genealogy.hpp"
#include "geneaperc/random.hpp"

namespace testutil {

// Random finite tree built level by level from the given generator.
inline geneaperc::Tree random_tree(geneaperc::Rng& rng, std::uint32_t max_children, std::uint32_t max_vertices) {
  std::vector<std::uint32_t> bfs{static_cast<std::uint32_t>(rng.below(max_children + 1))};
  std::uint64_t pending = bfs.back();
  std::uint64_t total = 1;
  while (pending > 0) {
    --pending;
    ++total;
    std::uint32_t k = total + pending >= max_vertices ? 0 : static_cast<std::uint32_t>(rng.below(max_children + 1));
    if (total + pending + k > max_vertices) k = 0;
    bfs.push_back(k);
    pending += k;
  }
  return geneaperc::Tree::from_breadth_first_counts(bfs);
}

// Calls f(bits) for every 0/1 vector of length n.
inline void for_each_bits(std::size_t n, const std::function<void(const std::vector<std::uint8_t>&)>& f) {
  std::vector<std::uint8_t> bits(n, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) bits[i] = (mask >> i) & 1;
    f(bits);
  }
}

}  // namespace testutil
