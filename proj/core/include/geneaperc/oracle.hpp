#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geneaperc/branching.hpp"
#include "geneaperc/coloring.hpp"
#include "geneaperc/genealogy.hpp"

namespace geneaperc {

using Rational = boost::multiprecision::cpp_rational;

/// "3", "-2", "0.25", "1/3", "2.5e-3" parsed exactly.
Rational parse_rational(std::string_view text);
/// Best rational with denominator <= 10^12 within 1e-15 (relative) of x, or
/// the exact binary value of x when there is none.
Rational to_rational(double x);
double to_double(const Rational& q);
/// Exact when the expansion terminates within `digits` places, rounded
/// toward zero otherwise.
std::string to_decimal(const Rational& q, unsigned digits = 40);

/// Orders outcome encodings with digit runs compared numerically, so
/// "2" < "10" and "1,10" > "1,9".
struct OutcomeLess {
  using is_transparent = void;
  bool operator()(std::string_view a, std::string_view b) const;
};

/// Exact law on a finite set of encoded outcomes. `kind` names the encoding;
/// laws of different kinds are not comparable.
class ExactLaw {
 public:
  using Map = std::map<std::string, Rational, OutcomeLess>;

  ExactLaw() = default;
  explicit ExactLaw(std::string kind) : kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }
  const Map& outcomes() const noexcept { return probs_; }
  std::size_t support_size() const noexcept { return probs_.size(); }

  /// Adds mass to an outcome; zero masses are not stored.
  void add(const std::string& outcome, const Rational& mass);
  Rational probability(std::string_view outcome) const;
  Rational total() const;

  /// Pushes the law forward along `f`, under a new kind name.
  template <class F>
  ExactLaw map(std::string kind, F&& f) const {
    ExactLaw out(std::move(kind));
    for (const auto& [o, q] : probs_) out.add(f(o), q);
    return out;
  }

  std::string to_csv() const;
  std::string to_json() const;

  friend bool operator==(const ExactLaw& a, const ExactLaw& b) {
    return a.kind_ == b.kind_ && a.probs_ == b.probs_;
  }

 private:
  std::string kind_;
  Map probs_;
};

/// Counts of encoded outcomes from a sampler.
struct EmpiricalLaw {
  std::string kind;
  std::map<std::string, std::uint64_t, OutcomeLess> counts;
  std::uint64_t total = 0;

  void add(const std::string& outcome, std::uint64_t n = 1) {
    counts[outcome] += n;
    total += n;
  }
};

/// Half the L1 distance. Throws Errc::encoding_mismatch when kinds differ.
Rational tv_distance(const ExactLaw& lhs, const ExactLaw& rhs);
double tv_distance(const ExactLaw& lhs, const EmpiricalLaw& rhs);
double tv_distance(const EmpiricalLaw& lhs, const EmpiricalLaw& rhs);

/// TV radius that an empirical law of n draws on k outcomes exceeds with
/// probability at most alpha: 0.5 sqrt(2 (k ln 2 + ln(1/alpha)) / n).
double tv_threshold(std::size_t support, std::uint64_t n, double alpha);

struct TruncationSpec {
  std::uint32_t max_depth = 2;
  std::uint32_t max_children = 8;
  std::uint64_t max_outcomes = 100'000'000;
};

/// Observable read off one enumerated configuration.
enum class Observable {
  full,                  // per-vertex colors (edge bits for bernoulli)
  root_component_size,   // |component of the root in its own color|
  root_component_shape,  // preorder child counts of that component
  partition,             // color classes, numbered by first vertex
  child_types,           // number of root children of each color 1..d
};
std::string_view to_string(Observable o) noexcept;

/// Encodes `observable` for one configuration. `col` holds colors, allele
/// ids, or (bernoulli) the id of each vertex's cluster root. Throws
/// Errc::observable_mismatch for child_types on a model without colors.
std::string encode_observable(const Tree& t, Model model, std::uint32_t d,
                              std::span<const std::uint8_t> open, std::span<const Color> col,
                              Observable observable);

struct ColoringLawParams {
  Rational p = 0;                  // retention: bernoulli, dac, restricted_dac
  Rational r = 0;                  // mutation rate: infinite_alleles, mdm, mim
  std::uint32_t d = 2;
  std::vector<Rational> a;         // dac color law; uniform when empty
  /// Fixed root color. For dac this conditions on the root's color;
  /// otherwise the root color is uniform over [d] when absent.
  std::optional<Color> root_color;
};

/// Sums over every edge configuration and every cluster/mutant color choice.
/// Enumeration is split into prefix tasks over `workers` threads; counts
/// are integers, so the result does not depend on the split.
ExactLaw exact_coloring_law(const Tree& t, Model model, const ColoringLawParams& params,
                            Observable observable, unsigned workers = 1,
                            std::uint64_t max_outcomes = 100'000'000);

/// Law of |C_root| under Bernoulli(p) percolation; |E| <= 25.
ExactLaw exact_root_cluster_law(const Tree& t, const Rational& p, unsigned workers = 1);

/// Law of the shape of the root cluster (preorder counts, comma separated).
ExactLaw exact_root_cluster_shape_law(const Tree& t, const Rational& p, unsigned workers = 1);

/// Finite offspring pmf with rational masses.
using RationalPmf = std::vector<Rational>;
RationalPmf rational_pmf(const OffspringLaw& law);
RationalPmf binomial_pmf(std::uint32_t n, const Rational& p);

/// Law of the BGW tree cut at spec.max_depth, as preorder counts with the
/// vertices at the cut depth written as leaves.
ExactLaw exact_bgw_truncated_law(const RationalPmf& pmf, const TruncationSpec& spec);

/// 1 - f_p^{(N)}(0), f_p(s) = f(1 - p + p s): probability that the
/// Bernoulli(p) root cluster of a BGW tree reaches generation N.
double truncated_survival_probability(const OffspringLaw& law, double p, std::uint32_t generations);

}  // namespace geneaperc
