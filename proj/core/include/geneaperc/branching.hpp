#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geneaperc/genealogy.hpp"
#include "geneaperc/random.hpp"

namespace geneaperc {

/// Vertex type, color or allele identifier. Finite-type models use 1..d,
/// the infinite-alleles model numbers alleles from 0 (the root's allele).
using Color = std::uint32_t;

/// One value per vertex, indexed like the tree it colors.
struct Coloring {
  std::vector<Color> values;

  std::size_t size() const noexcept { return values.size(); }
  Color operator[](VertexId v) const { return values[v]; }
  /// Number of distinct values present.
  std::size_t distinct() const;
  friend bool operator==(const Coloring&, const Coloring&) = default;
};

/// Offspring distribution on the non-negative integers.
class OffspringLaw {
 public:
  enum class Kind { finite, binomial, poisson, geometric };

  /// pmf[k] = mu(k). Entries must lie in [0, 1] and sum to 1 within 1e-12.
  static OffspringLaw finite(std::vector<double> pmf);
  static OffspringLaw finite(const std::map<std::uint32_t, double>& pmf);
  static OffspringLaw point_mass(std::uint32_t k);
  /// Uniform on {lo, ..., hi}.
  static OffspringLaw uniform(std::uint32_t lo, std::uint32_t hi);
  static OffspringLaw binomial(std::uint32_t n, double p);
  static OffspringLaw poisson(double lambda);
  /// mu(k) = p (1 - p)^k, k >= 0.
  static OffspringLaw geometric(double p);

  Kind kind() const noexcept { return kind_; }
  std::uint32_t trials() const noexcept { return n_; }
  double parameter() const noexcept { return param_; }

  double pmf(std::uint32_t k) const;
  double mean() const;
  double variance() const;
  /// f(s) = sum_k mu(k) s^k.
  double pgf(double s) const;
  /// Largest k with mu(k) > 0, or nullopt for unbounded support.
  std::optional<std::uint32_t> max_support() const;
  /// mu(0) + mu(1) < 1 and no atom of mass one.
  bool non_degenerate() const;

  /// Smallest k with F(k) >= u, for u in (0, 1].
  std::uint32_t quantile(double u) const;
  std::uint32_t sample(Rng& rng) const { return quantile(rng.uniform()); }

  /// Probabilities mu(0..max_support); unbounded laws are cut where the
  /// remaining tail is below 1e-17.
  std::vector<double> table() const { return pmf_; }

  std::string describe() const;

 private:
  OffspringLaw(Kind kind, std::uint32_t n, double param);
  void build_tables();

  Kind kind_ = Kind::finite;
  std::uint32_t n_ = 0;
  double param_ = 0.0;
  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

struct TypedOutcome {
  std::vector<std::uint32_t> counts;  // counts[j - 1] children of type j
  double probability = 0.0;
};

/// Per-mother-type joint offspring laws mu_1, ..., mu_d on N_0^d.
class TypedOffspringLaw {
 public:
  /// per_type[i - 1] lists the finite support of mu_i. Duplicate vectors are
  /// merged; outcomes are kept in lexicographic order of their counts.
  explicit TypedOffspringLaw(std::vector<std::vector<TypedOutcome>> per_type);

  /// The d = 1 embedding of a finite-support law.
  static TypedOffspringLaw single_type(const OffspringLaw& law);

  std::size_t types() const noexcept { return per_type_.size(); }
  std::span<const TypedOutcome> outcomes(Color type) const;
  const TypedOutcome& sample(Color type, Rng& rng) const;
  /// Law of the total number of children of a type-`type` mother.
  OffspringLaw total_count_law(Color type) const;

 private:
  void check_type(Color type) const;

  std::vector<std::vector<TypedOutcome>> per_type_;
  std::vector<std::vector<double>> cdf_;
};

struct GrowthBudget {
  std::uint32_t max_generation = 50;
  std::uint64_t max_vertices = 1'000'000;

  /// Throws Errc::budget_invalid.
  void validate() const;
};

enum class StopReason { extinct, generation_limit, vertex_limit };
std::string_view to_string(StopReason reason) noexcept;

struct SampledTree {
  Tree tree;
  bool truncated = false;
  StopReason stop = StopReason::extinct;
};

struct SampledTypedTree {
  Tree tree;
  Coloring types;
  bool truncated = false;
  StopReason stop = StopReason::extinct;
};

/// Grows a BGW tree generation by generation. Vertices at max_generation are
/// left unexpanded; once max_vertices would be exceeded growth stops and
/// every unexpanded vertex stays a leaf.
SampledTree sample_bgw_tree(const OffspringLaw& law, const GrowthBudget& budget, Seed seed);

/// Multi-type BGW tree from a root of type `root_type` (1-based). Siblings are
/// placed type by type: all type-1 children first, then type 2, and so on.
SampledTypedTree sample_multitype_tree(const TypedOffspringLaw& law, Color root_type,
                                       const GrowthBudget& budget, Seed seed);

/// Smallest root of f(s) = s by monotone iteration s <- f(s) from s = 0.
/// Returns exactly 1 for non-degenerate laws with mean <= 1 once the iterate
/// settles. Throws Errc::no_convergence after max_iter steps otherwise.
double extinction_probability(const OffspringLaw& law, double tol = 1e-12,
                              std::uint64_t max_iter = 1'000'000);

class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t dim, double fill = 0.0) : dim_(dim), data_(dim * dim, fill) {}
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SquareMatrix identity(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// m_ij = E[number of type-j children of a type-i mother] (0-based indices).
SquareMatrix mean_matrix(const TypedOffspringLaw& law);

struct PerronResult {
  double rho = 0.0;
  /// The nonzero pattern is not strongly connected; the trichotomy is not
  /// claimed in that case.
  bool reducible = false;
  std::uint64_t iterations = 0;
};

/// Spectral radius of a nonnegative matrix by power iteration on M + I,
/// stopped when the Collatz-Wielandt bounds are within tol.
PerronResult perron_root(const SquareMatrix& m, double tol = 1e-12,
                         std::uint64_t max_iter = 1'000'000);

enum class Criticality { subcritical, critical, supercritical };
std::string_view to_string(Criticality c) noexcept;

inline constexpr double kCriticalityTolerance = 1e-9;

Criticality classify(double growth_rate);
Criticality classify(const OffspringLaw& law);
Criticality classify(const SquareMatrix& mean);

}  // namespace geneaperc
