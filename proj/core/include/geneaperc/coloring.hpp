#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geneaperc/branching.hpp"
#include "geneaperc/genealogy.hpp"
#include "geneaperc/percolation.hpp"
#include "geneaperc/random.hpp"

namespace geneaperc {

enum class Model { bernoulli, dac, restricted_dac, infinite_alleles, mdm, mim };

std::string_view to_string(Model model) noexcept;
/// Accepts the names printed by to_string plus a few spellings
/// ("restrictedDac", "infiniteAlleles", "percolation"). Throws Errc::unknown_model.
Model parse_model(std::string_view name);

/// Color law a = (a_1, ..., a_d); colors are 1-based.
class ColorDistribution {
 public:
  explicit ColorDistribution(std::vector<double> weights);
  static ColorDistribution uniform(std::uint32_t d);

  std::uint32_t colors() const noexcept { return static_cast<std::uint32_t>(weights_.size()); }
  double weight(Color c) const;
  std::span<const double> weights() const noexcept { return weights_; }
  bool is_uniform() const noexcept { return uniform_; }
  Color sample(Rng& rng) const;

 private:
  std::vector<double> weights_;
  std::vector<double> cdf_;
  bool uniform_ = false;
};

struct MutationParams {
  double r = 0.0;
  std::uint32_t d = 2;
  OffspringLaw base = OffspringLaw::point_mass(0);

  /// Throws Errc::invalid_argument; `finite_types` additionally requires d >= 2.
  void validate(bool finite_types) const;
};

/// Edge states and vertex colors from one draw. For the mutation models an
/// open edge is a clone and a closed edge a mutation.
struct ColoredConfig {
  EdgeConfig edges;
  Coloring coloring;
  Color root_color = 0;
};

/// Percolate at p with the same draws as percolate(t, p, seed), then give
/// each cluster, in lexicographic order of cluster roots, an independent
/// color from `colors`. A given `root_color` conditions on the root's color.
ColoredConfig dac_color(const Tree& t, double p, const ColorDistribution& colors, Seed seed,
                        std::optional<Color> root_color = std::nullopt);

/// Percolate at p; the root cluster gets `root_color` (uniform on [d] when
/// absent); every other cluster takes a uniform color different from the
/// color of its root's parent.
ColoredConfig restricted_dac_color(const Tree& t, double p, std::uint32_t d,
                                   std::optional<Color> root_color, Seed seed);

/// Clone iff the edge uniform is <= 1 - r, so the edges coincide with
/// percolate(t, 1 - r, seed). Root allele 0, new alleles numbered in
/// lexicographic vertex order.
ColoredConfig infinite_alleles_color(const Tree& t, double r, Seed seed);

/// MDM or MIM types on a fixed genealogy. Edge uniforms are drawn first as in
/// percolate(t, 1 - r, seed), then one type per mutant in vertex order.
ColoredConfig mutation_color(const Tree& t, Model model, double r, std::uint32_t d,
                             Color root_type, Seed seed);

struct MutantChild {
  Color type = 0;
  bool clone = false;
};

/// Children of one mother of type `mother_type`, in birth order.
std::vector<MutantChild> sample_mutation_event(Model model, const MutationParams& params,
                                               Color mother_type, Rng& rng);

struct MutationSample {
  Tree tree;
  Coloring types;
  std::vector<std::uint8_t> clone;  // per edge
  bool truncated = false;
  StopReason stop = StopReason::extinct;
};

/// Grows the genealogy child by child: the number of children comes from
/// params.base, each child is a clone with probability 1 - r and otherwise
/// a mutant. Children keep their birth order.
MutationSample mdm_sample(const GrowthBudget& budget, const MutationParams& params,
                          Color root_type, Seed seed);
MutationSample mim_sample(const GrowthBudget& budget, const MutationParams& params,
                          Color root_type, Seed seed);

/// mu(|v|) multinomial(|v|; v) (1 - r)^{v_i} (r / (d - 1))^{|v| - v_i}.
double mdm_offspring_pmf(const MutationParams& params, Color mother_type,
                         std::span<const std::uint32_t> v);
/// mu(|v|) sum_{k=0}^{v_i} C(|v|, k) (1 - r)^k r^{|v|-k}
///   multinomial(|v| - k; v - k e_i) d^{-(|v|-k)}.
double mim_offspring_pmf(const MutationParams& params, Color mother_type,
                         std::span<const std::uint32_t> v);

/// Full typed laws for a base law of bounded support (or cut at
/// max_children for unbounded laws).
TypedOffspringLaw mdm_typed_law(const MutationParams& params, std::uint32_t max_children = 32);
TypedOffspringLaw mim_typed_law(const MutationParams& params, std::uint32_t max_children = 32);

/// Every vector in N_0^d with the given total, in lexicographic order.
std::vector<std::vector<std::uint32_t>> compositions(std::uint32_t total, std::uint32_t parts);

/// Vertices sharing the root's color along an unbroken same-color line.
std::vector<std::uint8_t> same_type_root_mask(const Tree& t, const Coloring& col);
Tree same_type_root_component(const Tree& t, const Coloring& col);
std::uint32_t same_type_root_component_size(const Tree& t, const Coloring& col);

/// 1 - (1 - p)(1 - a_root).
double effective_retention(double p, double a_root);

struct DacCritical {
  double value = 0.0;
  bool always_supercritical = false;
};
/// (1 - m a) / (m (1 - a)), clamped to 0 with the flag set when m a >= 1.
DacCritical dac_critical_bgw(double m, double a_root);

std::string coloring_dot(const Tree& t, const Coloring& col, const EdgeConfig* edges = nullptr);
/// [{"vertex": "<label>", "colorOrAllele": n}, ...]
std::string coloring_json(const Tree& t, const Coloring& col);
/// "alleleId,blockSize" rows in increasing allele id.
std::string allelic_partition_csv(const Coloring& col);

}  // namespace geneaperc
