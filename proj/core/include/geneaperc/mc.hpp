#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geneaperc/branching.hpp"
#include "geneaperc/coloring.hpp"
#include "geneaperc/oracle.hpp"
#include "geneaperc/random.hpp"

namespace geneaperc {

/// Retention models sweep p; mutation models (infinite_alleles, mdm, mim)
/// sweep r, and survival then decreases along the grid.
bool sweeps_mutation_rate(Model model) noexcept;

struct ExperimentPlan {
  Model model = Model::bernoulli;
  OffspringLaw law = OffspringLaw::uniform(1, 3);
  std::uint32_t d = 2;
  std::vector<double> color_weights;  // dac only; uniform over d when empty
  std::optional<Color> root_color;    // dac: condition on it; others: fixed root type
  std::vector<double> grid;
  std::uint64_t replicates = 10'000;
  std::uint32_t depth = 50;
  std::uint64_t vertex_cap = 1'000'000;
  Seed master_seed = 1;
  double confidence = 0.99;
  bool condition_on_survival = true;
  /// Thresholds for locate_critical; 2/depth and 4/depth when unset.
  std::optional<double> tau_low;
  std::optional<double> tau_high;
  std::uint64_t chunk = 1'000;
  unsigned workers = 1;

  /// Throws Errc::plan_invalid.
  void validate() const;
  double threshold_low() const { return tau_low.value_or(2.0 / depth); }
  double threshold_high() const { return tau_high.value_or(4.0 / depth); }
  /// Canonical text of every field that affects results (not workers).
  std::string canonical() const;
  std::uint64_t hash() const;
};

/// Result of one replicate. The root component survives to `depth` at
/// retention x iff x >= threshold. threshold is +inf when the genealogy
/// itself dies out first.
struct ReplicateOutcome {
  double threshold = std::numeric_limits<double>::infinity();
  bool capped = false;  // search hit vertex_cap; threshold is a lower bound
  bool died = false;
  std::uint64_t explored = 0;

  friend bool operator==(const ReplicateOutcome&, const ReplicateOutcome&) = default;
};

/// Replicate i of the plan, seeded by derive_seed(master_seed, i).
ReplicateOutcome run_replicate(const ExperimentPlan& plan, std::uint64_t index);
std::vector<ReplicateOutcome> run_replicates(const ExperimentPlan& plan);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 1.0;
};
/// Exact binomial (Clopper-Pearson) interval at two-sided level `confidence`.
ConfidenceInterval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence);

struct EstimateRecord {
  double parameter = 0.0;
  double estimate = 0.0;
  ConfidenceInterval ci;
  double half_width = 0.0;
  std::uint64_t successes = 0;
  std::uint64_t used = 0;
  std::uint64_t discarded = 0;
  /// Successes that rest on a vertex-cap hit rather than on reaching depth.
  std::uint64_t cap_hits = 0;
  /// Estimate with cap hits counted as failures.
  double estimate_uncapped = 0.0;
};

std::vector<EstimateRecord> summarize(const ExperimentPlan& plan,
                                      const std::vector<ReplicateOutcome>& outcomes);
/// One record per grid point, all points sharing the same replicates.
std::vector<EstimateRecord> estimate_survival(const ExperimentPlan& plan);

enum class BracketStatus { bracketed, always_supercritical };
std::string_view to_string(BracketStatus s) noexcept;

struct CriticalBracket {
  double low = 0.0;
  double high = 1.0;
  BracketStatus status = BracketStatus::bracketed;
  std::uint64_t used = 0;
  std::uint64_t discarded = 0;
  std::uint64_t cap_hits = 0;
};

/// low = sup{x : CI upper bound at x < tau_low}, high = inf{x : CI lower
/// bound at x > tau_high}, searched over the coupled thresholds (retention
/// units, mapped back to r for mutation models). When x = 0 cannot be shown
/// subcritical but high <= tol, the status is always_supercritical with
/// low = 0. Throws Errc::bracket_failure if high - low > tol or no bracket
/// exists.
CriticalBracket locate_critical(const ExperimentPlan& plan, double tol);
CriticalBracket locate_critical(const ExperimentPlan& plan, double tol,
                                const std::vector<ReplicateOutcome>& outcomes);

/// One side of a correspondence test on a fixed tree.
struct ModelInstance {
  Model model = Model::bernoulli;
  double parameter = 0.5;             // p, or r for mutation models
  Rational exact_parameter = Rational(1, 2);
  std::uint32_t d = 2;
  std::vector<double> weights;        // dac
  std::vector<Rational> exact_weights;
  std::optional<Color> root_color;
};

struct CorrespondenceReport {
  bool exact = false;
  double statistic = 0.0;   // TV distance when exact, chi-square otherwise
  double threshold = 0.0;
  std::uint64_t degrees_of_freedom = 0;
  bool pass = false;
};

/// Compares the law of `observable` under two models on tree `t`. Uses the
/// oracle when both enumerations fit under `exact_cap`, otherwise a
/// two-sample chi-square homogeneity test at `level` with `replicates`
/// draws per side. Throws Errc::observable_mismatch when the observable
/// does not exist for a model.
CorrespondenceReport test_correspondence(const ModelInstance& a, const ModelInstance& b, const Tree& t,
                                         Observable observable, std::uint64_t replicates, double level,
                                         Seed seed, std::uint64_t exact_cap = 2'000'000);

/// Observable value of one draw of `m` on `t`.
std::string sample_observable(const ModelInstance& m, const Tree& t, Observable observable, Seed seed);

/// Two-sample chi-square homogeneity test; bins with small pooled counts are
/// merged with their neighbors in outcome order.
struct ChiSquareResult {
  double statistic = 0.0;
  std::uint64_t degrees_of_freedom = 0;
  double threshold = 0.0;
  bool pass = true;
};
ChiSquareResult chi_square_two_sample(const EmpiricalLaw& a, const EmpiricalLaw& b, double level);

struct RunSummary {
  std::vector<ReplicateOutcome> outcomes;
  std::vector<EstimateRecord> records;
  std::uint64_t chunks_computed = 0;
  std::uint64_t chunks_resumed = 0;
};

/// Runs the plan into `dir`: chunk checkpoints under dir/chunks, then
/// estimates.csv and manifest.json, each written atomically. Existing
/// chunk files of the same plan are reused. Throws Errc::io_failure.
RunSummary run_plan(const ExperimentPlan& plan, const std::filesystem::path& dir);

std::string estimates_csv(const std::vector<EstimateRecord>& records);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace geneaperc
