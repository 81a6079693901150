// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "geneaperc/branching.hpp"
#include "geneaperc/coloring.hpp"
#include "geneaperc/error.hpp"
#include "geneaperc/mc.hpp"
#include "geneaperc/oracle.hpp"
#include "geneaperc/percolation.hpp"

using namespace geneaperc;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kC1Seconds = 1.0;
constexpr double kPmfTolerance = 1e-12;
constexpr double kC2Seconds = 10.0;
constexpr double kC3Seconds = 10.0;
constexpr std::uint64_t kC3Events = 100'000;
constexpr double kC4Seconds = 5.0;
constexpr std::uint32_t kSurvivalDepth = 50;
constexpr std::uint64_t kTheoremReplicates = 20'000;
constexpr double kTheoremConfidence = 0.99;
constexpr double kC5SubcriticalUpper = 0.02;
constexpr double kC5SupercriticalLower = 0.05;
constexpr double kBracketTolerance = 0.05;
constexpr double kC5Seconds = 300.0;
constexpr double kC6Seconds = 600.0;
constexpr std::uint32_t kC7TreeDepth = 30;
constexpr std::uint64_t kC7Replicates = 100'000;
constexpr double kC7Level = 0.999;
constexpr double kExtinctionTolerance = 1e-10;
constexpr double kExtinctionSeconds = 1e-3;
constexpr std::uint64_t kC9Replicates = 20'000;
constexpr int kPropertyCases = 1000;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

std::string join_counts(const std::vector<std::uint32_t>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) s += (j ? "," : "") + std::to_string(v[j]);
  return s;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

// Criterion 1: percolation at 1 - r and infinite alleles at r on the depth-3
// binary tree have identical exact laws.
Outcome correspondence_one() {
  Outcome out;
  const auto start = Clock::now();
  const Tree t = complete_tree(2, 3);
  for (const char* text : {"1/5", "1/2", "4/5"}) {
    const Rational r = parse_rational(text);
    ColoringLawParams ia, perc;
    ia.r = r;
    perc.p = 1 - r;
    for (Observable obs : {Observable::root_component_size, Observable::partition}) {
      const Rational tv = tv_distance(exact_coloring_law(t, Model::bernoulli, perc, obs),
                                      exact_coloring_law(t, Model::infinite_alleles, ia, obs));
      out.require(tv == 0, std::string("r=") + text + " " + std::string(to_string(obs)) + " tv=" + to_decimal(tv, 20));
    }
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < kC1Seconds, "took " + fmt(elapsed) + "s");
  if (out.pass) out.detail = "exact tv=0 at r in {0.2,0.5,0.8}, " + fmt(elapsed, 3) + "s";
  return out;
}

// Criteria 2 and 3: the child-type law of the colored star with n children
// and root color i matches the mutation pmf; shells sum to mu(n).
Outcome offspring_correspondence(bool restricted) {
  Outcome out;
  const auto start = Clock::now();
  const Model coloring = restricted ? Model::restricted_dac : Model::dac;
  // Base law on 0..6 with unequal weights.
  const auto base = OffspringLaw::finite(std::vector<double>{0.05, 0.1, 0.15, 0.2, 0.2, 0.15, 0.15});
  double worst = 0.0, worst_shell = 0.0;
  for (std::uint32_t d = 2; d <= 4; ++d) {
    for (const char* text : {"1/4", "1/2"}) {
      const Rational r = parse_rational(text);
      const MutationParams params{to_double(r), d, base};
      for (Color i = 1; i <= d; ++i) {
        for (std::uint32_t n = 0; n <= 6; ++n) {
          ColoringLawParams lp;
          lp.p = 1 - r;
          lp.d = d;
          lp.root_color = i;
          const ExactLaw star = exact_coloring_law(star_tree(n), coloring, lp, Observable::child_types);
          double shell = 0.0;
          for (const auto& v : compositions(n, d)) {
            const double pmf = restricted ? mdm_offspring_pmf(params, i, v) : mim_offspring_pmf(params, i, v);
            shell += pmf;
            const double oracle = base.pmf(n) * to_double(star.probability(join_counts(v)));
            worst = std::max(worst, std::abs(pmf - oracle));
          }
          worst_shell = std::max(worst_shell, std::abs(shell - base.pmf(n)));
        }
      }
    }
  }
  out.require(worst <= kPmfTolerance, "max |pmf - oracle| = " + fmt(worst));
  out.require(worst_shell <= kPmfTolerance, "max |shell - mu(n)| = " + fmt(worst_shell));

  std::string extra;
  if (restricted) {
    std::uint64_t shared = 0, mutants = 0;
    Rng rng(derive_seed(3, 3));
    const MutationParams params{0.5, 3, OffspringLaw::uniform(1, 3)};
    for (std::uint64_t k = 0; k < kC3Events; ++k) {
      const Color mother = 1 + static_cast<Color>(k % 3);
      for (const auto& child : sample_mutation_event(Model::mdm, params, mother, rng)) {
        if (child.clone) continue;
        ++mutants;
        shared += child.type == mother;
      }
    }
    out.require(shared == 0, std::to_string(shared) + " mutants share the mother's type");
    extra = ", " + std::to_string(mutants) + " mutants in " + std::to_string(kC3Events) + " events, none shares";
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < (restricted ? kC3Seconds : kC2Seconds), "took " + fmt(elapsed) + "s");
  if (out.pass) {
    out.detail = "max diff " + fmt(worst) + ", max shell error " + fmt(worst_shell) + extra + ", " + fmt(elapsed, 3) + "s";
  }
  return out;
}

// Criterion 4: root cluster shape on T_2 at depth 2 equals the truncated
// Binomial(2, p) tree law.
Outcome percolation_cluster_is_bgw() {
  Outcome out;
  const auto start = Clock::now();
  for (const char* text : {"3/10", "1/2", "7/10"}) {
    const Rational p = parse_rational(text);
    const Rational tv = tv_distance(exact_root_cluster_shape_law(complete_tree(2, 2), p),
                                    exact_bgw_truncated_law(binomial_pmf(2, p), {2, 2}));
    out.require(tv == 0, std::string("p=") + text + " tv=" + to_decimal(tv, 20));
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < kC4Seconds, "took " + fmt(elapsed) + "s");
  if (out.pass) out.detail = "exact tv=0 at p in {0.3,0.5,0.7}, " + fmt(elapsed, 3) + "s";
  return out;
}

ExperimentPlan theorem_plan(Model model, std::uint32_t d, std::vector<double> grid) {
  ExperimentPlan plan;
  plan.model = model;
  plan.law = OffspringLaw::uniform(1, 3);
  plan.d = d;
  plan.grid = std::move(grid);
  plan.replicates = kTheoremReplicates;
  plan.depth = kSurvivalDepth;
  plan.confidence = kTheoremConfidence;
  plan.master_seed = 20'240'501;
  return plan;
}

std::string bracket_text(const CriticalBracket& b) {
  return "[" + fmt(b.low, 5) + ", " + fmt(b.high, 5) + "] " + std::string(to_string(b.status));
}

// Criterion 5: Bernoulli percolation on the Fig. 1 tree.
Outcome bernoulli_threshold() {
  Outcome out;
  const auto start = Clock::now();
  const ExperimentPlan plan = theorem_plan(Model::bernoulli, 2, {0.4, 0.6});
  const auto outcomes = run_replicates(plan);
  const auto records = summarize(plan, outcomes);
  out.require(records[0].ci.high < kC5SubcriticalUpper, "upper bound at 0.4 is " + fmt(records[0].ci.high));
  out.require(records[1].ci.low > kC5SupercriticalLower, "lower bound at 0.6 is " + fmt(records[1].ci.low));
  std::string bracket = "none";
  try {
    const auto b = locate_critical(plan, kBracketTolerance, outcomes);
    bracket = bracket_text(b);
    out.require(b.low <= 0.5 && 0.5 <= b.high && b.high - b.low <= kBracketTolerance, "bracket " + bracket);
  } catch (const Error& e) {
    out.require(false, e.what());
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < kC5Seconds, "took " + fmt(elapsed) + "s");
  if (out.pass) {
    out.detail = "ci(0.4)=[" + fmt(records[0].ci.low) + ", " + fmt(records[0].ci.high) + "] ci(0.6)=[" +
                 fmt(records[1].ci.low) + ", " + fmt(records[1].ci.high) + "] bracket " + bracket + ", " +
                 fmt(elapsed, 3) + "s";
  }
  return out;
}

// Criterion 6: divide and color on the Fig. 1 tree.
Outcome dac_threshold() {
  Outcome out;
  const auto start = Clock::now();
  std::string detail;
  {
    const ExperimentPlan plan = theorem_plan(Model::dac, 3, {});
    try {
      const auto b = locate_critical(plan, kBracketTolerance);
      detail = "d=3 " + bracket_text(b);
      out.require(b.status == BracketStatus::bracketed && b.low <= 0.25 && 0.25 <= b.high &&
                      b.high - b.low <= kBracketTolerance,
                  detail);
    } catch (const Error& e) {
      out.require(false, std::string("d=3: ") + e.what());
    }
  }
  {
    const ExperimentPlan plan = theorem_plan(Model::dac, 2, {0.05});
    const auto outcomes = run_replicates(plan);
    const auto record = summarize(plan, outcomes).front();
    out.require(record.estimate > 0.0, "d=2 estimate at p=0.05 is " + fmt(record.estimate));
    try {
      const auto b = locate_critical(plan, kBracketTolerance, outcomes);
      out.require(b.status == BracketStatus::always_supercritical, "d=2 " + bracket_text(b));
      detail += "; d=2 " + bracket_text(b) + ", estimate(0.05)=" + fmt(record.estimate);
    } catch (const Error& e) {
      out.require(false, std::string("d=2: ") + e.what());
    }
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < kC6Seconds, "took " + fmt(elapsed) + "s");
  if (out.pass) out.detail = detail + ", " + fmt(elapsed, 3) + "s";
  return out;
}

// A fixed Binomial(2, 0.6) tree that reaches the requested depth.
Tree deep_tree(std::uint32_t depth) {
  GrowthBudget budget;
  budget.max_generation = depth;
  budget.max_vertices = 20'000;
  for (std::uint64_t k = 0;; ++k) {
    const auto s = sample_bgw_tree(OffspringLaw::binomial(2, 0.6), budget, derive_seed(30, k));
    if (s.tree.height() == depth && s.stop == StopReason::generation_limit) return s.tree;
  }
}

// Criterion 7: same-type root component under DaC equals the root cluster
// at the effective retention.
Outcome haggstrom_reduction() {
  Outcome out;
  const auto start = Clock::now();
  const Tree big = deep_tree(kC7TreeDepth);
  std::string detail = "tree |V|=" + std::to_string(big.size()) + ";";
  struct Case {
    const char* p;
    const char* a;
  };
  std::uint64_t case_index = 0;
  for (const Case c : {Case{"2/5", "1/3"}, Case{"1/5", "1/2"}}) {
    const Rational p = parse_rational(c.p), a = parse_rational(c.a);
    ++case_index;
    const Rational eff = 1 - (1 - p) * (1 - a);
    out.require(eff == Rational(3, 5), "effective retention " + to_decimal(eff, 10));
    for (std::uint32_t depth = 1; depth <= 3; ++depth) {
      const Tree t = complete_tree(2, depth);
      ColoringLawParams dac, perc;
      dac.p = p;
      dac.d = 2;
      dac.a = {a, 1 - a};
      dac.root_color = 1;
      perc.p = eff;
      for (Observable obs : {Observable::root_component_size, Observable::root_component_shape}) {
        const Rational tv =
            tv_distance(exact_coloring_law(t, Model::dac, dac, obs), exact_coloring_law(t, Model::bernoulli, perc, obs));
        out.require(tv == 0, std::string("p=") + c.p + " depth " + std::to_string(depth) + " tv=" + to_decimal(tv, 20));
      }
    }
    const ModelInstance lhs{Model::dac, to_double(p), p, 2, {to_double(a), 1 - to_double(a)}, {a, 1 - a}, Color{1}};
    const ModelInstance rhs{Model::bernoulli, to_double(eff), eff, 2, {}, {}, std::nullopt};
    const auto report = test_correspondence(lhs, rhs, big, Observable::root_component_size, kC7Replicates, kC7Level,
                                            derive_seed(7, case_index), 0);
    out.require(report.pass, std::string("p=") + c.p + " chi2=" + fmt(report.statistic) + " > " + fmt(report.threshold));
    detail += std::string(" p=") + c.p + " a=" + c.a + ": exact depth<=3 ok, chi2=" + fmt(report.statistic, 4) +
              " (dof " + std::to_string(report.degrees_of_freedom) + ", threshold " + fmt(report.threshold, 4) + ");";
  }
  if (out.pass) out.detail = detail + " " + fmt(seconds_since(start), 3) + "s";
  return out;
}

// Criterion 8: extinction probabilities.
Outcome extinction() {
  Outcome out;
  struct Case {
    const char* name;
    OffspringLaw law;
    double expected;
    double tolerance;
  };
  // Smallest root of 9 s^2 - 10 s + 1 = 0.
  const double ninth = (10.0 - std::sqrt(64.0)) / 18.0;
  const std::vector<Case> cases{{"binomial(2,3/4)", OffspringLaw::binomial(2, 0.75), ninth, kExtinctionTolerance},
                                {"poisson(0.5)", OffspringLaw::poisson(0.5), 1.0, 0.0},
                                {"fig1", OffspringLaw::uniform(1, 3), 0.0, 0.0}};
  std::string detail;
  for (const auto& c : cases) {
    const auto start = Clock::now();
    const double q = extinction_probability(c.law);
    const double elapsed = seconds_since(start);
    out.require(std::abs(q - c.expected) <= c.tolerance, std::string(c.name) + " q=" + fmt(q, 17));
    out.require(elapsed < kExtinctionSeconds, std::string(c.name) + " took " + fmt(elapsed) + "s");
    detail += std::string(c.name) + " q=" + fmt(q, 12) + " (" + fmt(elapsed * 1e6, 3) + "us) ";
  }
  if (out.pass) out.detail = detail;
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criterion 9: archives are byte-identical across worker counts.
Outcome determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / "geneaperc-acceptance";
  std::string detail;
  for (Model model : {Model::bernoulli, Model::dac, Model::mim}) {
    ExperimentPlan plan = theorem_plan(model, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7});
    plan.replicates = kC9Replicates;
    plan.chunk = 777;
    std::string reference;
    for (unsigned workers : {1u, 4u, 8u}) {
      plan.workers = workers;
      const fs::path dir = root / (std::string(to_string(model)) + "-" + std::to_string(workers));
      fs::remove_all(dir);
      run_plan(plan, dir);
      const std::string csv = slurp(dir / "estimates.csv");
      if (workers == 1) reference = csv;
      out.require(!csv.empty() && csv == reference,
                  std::string(to_string(model)) + " differs at " + std::to_string(workers) + " workers");
    }
    detail += std::string(to_string(model)) + " " + std::to_string(reference.size()) + " bytes identical; ";
  }
  fs::remove_all(root);
  if (out.pass) out.detail = detail + "workers {1,4,8}";
  return out;
}

// Criterion 10: the randomized property suite.
Outcome properties() {
  Outcome out;
  const std::string cmd = std::string(GENEAPERC_TESTS_PATH) + " --test-suite=properties --no-version 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    out.require(false, "cannot start the property suite");
    return out;
  }
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) text.append(buf, n);
  const int status = pclose(pipe);
  const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  const auto line = text.find("test cases:");
  const std::string summary = line == std::string::npos ? text : text.substr(line, text.find('\n', line) - line);
  out.require(ok, summary);
  if (out.pass) out.detail = summary + " (" + std::to_string(kPropertyCases) + " cases per property)";
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 correspondence I (percolation vs infinite alleles)", correspondence_one},
      {"2 correspondence II (dac vs mim)", [] { return offspring_correspondence(false); }},
      {"3 correspondence III (restricted dac vs mdm)", [] { return offspring_correspondence(true); }},
      {"4 root cluster is a binomial tree", percolation_cluster_is_bgw},
      {"5 bernoulli threshold 1/m", bernoulli_threshold},
      {"6 divide-and-color threshold", dac_threshold},
      {"7 same-type component reduction", haggstrom_reduction},
      {"8 extinction probabilities", extinction},
      {"9 determinism across workers", determinism},
      {"10 property suites", properties},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
