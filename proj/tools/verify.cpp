#include "verify.hpp"

#include <cmath>
#include <sstream>

#include "geneaperc/error.hpp"
#include "geneaperc/percolation.hpp"

namespace geneaperc::cli {

namespace {

std::string str(const Rational& q) { return to_decimal(q, 20); }

template <class T>
std::string show(const T& x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

void correspondences(const Json&, std::vector<CheckResult>& out) {
  const Tree binary = complete_tree(2, 3);
  for (const char* r_text : {"1/5", "1/2", "4/5"}) {
    const Rational r = parse_rational(r_text);
    ColoringLawParams ia;
    ia.r = r;
    const ExactLaw clone = exact_coloring_law(binary, Model::infinite_alleles, ia, Observable::root_component_size);
    const ExactLaw perc = exact_root_cluster_law(binary, 1 - r);
    const Rational tv = tv_distance(perc, clone);
    out.push_back({"correspondences", std::string("I r=") + r_text, tv == 0, "tv=" + str(tv)});
  }

  // Offspring-level identities on stars with n = 0..6 children.
  for (Model pair : {Model::mim, Model::mdm}) {
    const Model coloring = pair == Model::mim ? Model::dac : Model::restricted_dac;
    double worst = 0.0;
    for (std::uint32_t d = 2; d <= 4; ++d) {
      for (const char* r_text : {"1/4", "1/2"}) {
        const Rational r = parse_rational(r_text);
        for (Color i = 1; i <= d; ++i) {
          for (std::uint32_t n = 0; n <= 6; ++n) {
            ColoringLawParams params;
            params.p = 1 - r;
            params.d = d;
            params.root_color = i;
            const ExactLaw star = exact_coloring_law(star_tree(n), coloring, params, Observable::child_types);
            MutationParams mp{to_double(r), d, OffspringLaw::point_mass(n)};
            for (const auto& v : compositions(n, d)) {
              const double pmf = pair == Model::mim ? mim_offspring_pmf(mp, i, v) : mdm_offspring_pmf(mp, i, v);
              std::string key;
              for (std::size_t j = 0; j < v.size(); ++j) key += (j ? "," : "") + std::to_string(v[j]);
              worst = std::max(worst, std::abs(pmf - to_double(star.probability(key))));
            }
          }
        }
      }
    }
    out.push_back({"correspondences", pair == Model::mim ? "II dac-star vs mim" : "III restricted-star vs mdm",
                   worst <= 1e-12, "max|diff|=" + show(worst)});
  }
}

void prop41(const Json&, std::vector<CheckResult>& out) {
  for (const char* p_text : {"3/10", "1/2", "7/10"}) {
    const Rational p = parse_rational(p_text);
    const ExactLaw cluster = exact_root_cluster_shape_law(complete_tree(2, 2), p);
    const ExactLaw bgw = exact_bgw_truncated_law(binomial_pmf(2, p), {2, 2});
    const Rational tv = tv_distance(cluster, bgw);
    out.push_back({"prop4.1", std::string("depth 2 p=") + p_text, tv == 0, "tv=" + str(tv)});
  }
}

void haggstrom(const Json& config, std::vector<CheckResult>& out) {
  struct Case {
    const char* p;
    const char* a;
  };
  for (const Case c : {Case{"2/5", "1/3"}, Case{"1/5", "1/2"}}) {
    const Rational p = parse_rational(c.p), a = parse_rational(c.a);
    const Rational eff = 1 - (1 - p) * (1 - a);
    for (std::uint32_t depth = 1; depth <= 3; ++depth) {
      const Tree t = complete_tree(2, depth);
      ColoringLawParams params;
      params.p = p;
      params.d = 2;
      params.a = {a, 1 - a};
      params.root_color = 1;
      const ExactLaw dac = exact_coloring_law(t, Model::dac, params, Observable::root_component_size);
      const ExactLaw perc = exact_root_cluster_law(t, eff);
      const Rational tv = tv_distance(dac, perc);
      out.push_back({"haggstrom", std::string("exact depth ") + std::to_string(depth) + " p=" + c.p + " a=" + c.a,
                     tv == 0, "tv=" + str(tv)});
    }
    const std::uint64_t reps = get_or<std::uint64_t>(config, "replicates", 20'000);
    GrowthBudget budget;
    budget.max_generation = 12;
    const Tree big = sample_bgw_tree(OffspringLaw::binomial(2, 0.6), budget, 11).tree;
    ModelInstance lhs{Model::dac, to_double(p), p, 2, {to_double(a), 1 - to_double(a)}, {a, 1 - a}, Color{1}};
    ModelInstance rhs{Model::bernoulli, to_double(eff), eff, 2, {}, {}, std::nullopt};
    const auto report = test_correspondence(lhs, rhs, big, Observable::root_component_size, reps, 0.999, 5, 0);
    out.push_back({"haggstrom", std::string("two-sample p=") + c.p + " a=" + c.a, report.pass,
                   "chi2=" + show(report.statistic) + " threshold=" + show(report.threshold)});
  }
}

ExperimentPlan theorem_plan(const Json& config, Model model) {
  Json c = config;
  c["model"] = std::string(to_string(model));
  if (!c.contains("replicates")) c["replicates"] = 20'000;
  return build_plan(c);
}

void thm51(const Json& config, std::vector<CheckResult>& out) {
  const ExperimentPlan plan = theorem_plan(config, Model::bernoulli);
  const double tol = get_or<double>(config, "tol", 0.05);
  const double target = critical_bgw(plan.law.mean());
  try {
    const auto b = locate_critical(plan, tol);
    out.push_back({"thm5.1", "bracket contains 1/m", b.low <= target && target <= b.high,
                   "bracket=[" + show(b.low) + ", " + show(b.high) + "] target=" + show(target)});
  } catch (const Error& e) {
    out.push_back({"thm5.1", "bracket contains 1/m", false, e.what()});
  }
}

void thm52(const Json& config, std::vector<CheckResult>& out) {
  Json c = config;
  if (!c.contains("d")) c["d"] = 3;
  const ExperimentPlan plan = theorem_plan(c, Model::dac);
  const double tol = get_or<double>(config, "tol", 0.05);
  const double a_root = plan.color_weights.empty() ? 1.0 / plan.d
                                                   : plan.color_weights[plan.root_color.value_or(1) - 1];
  const DacCritical target = dac_critical_bgw(plan.law.mean(), a_root);
  try {
    const auto b = locate_critical(plan, tol);
    const bool pass = target.always_supercritical ? b.status == BracketStatus::always_supercritical
                                                  : b.low <= target.value && target.value <= b.high;
    out.push_back({"thm5.2", "bracket matches formula", pass,
                   "bracket=[" + show(b.low) + ", " + show(b.high) + "] status=" + std::string(to_string(b.status)) +
                       " target=" + show(target.value)});
  } catch (const Error& e) {
    out.push_back({"thm5.2", "bracket matches formula", false, e.what()});
  }
}

void extinction(const Json&, std::vector<CheckResult>& out) {
  const double q1 = extinction_probability(OffspringLaw::binomial(2, 0.75));
  out.push_back({"extinction", "binomial(2,3/4)", std::abs(q1 - 1.0 / 9.0) < 1e-10, "q=" + show(q1)});
  const double q2 = extinction_probability(OffspringLaw::poisson(0.5));
  out.push_back({"extinction", "poisson(1/2)", q2 == 1.0, "q=" + show(q2)});
  const double q3 = extinction_probability(OffspringLaw::uniform(1, 3));
  out.push_back({"extinction", "fig1", q3 == 0.0, "q=" + show(q3)});
}

using Suite = void (*)(const Json&, std::vector<CheckResult>&);

const std::vector<std::pair<std::string, Suite>>& suites() {
  static const std::vector<std::pair<std::string, Suite>> table{
      {"correspondences", correspondences}, {"prop4.1", prop41}, {"haggstrom", haggstrom},
      {"thm5.1", thm51},                    {"thm5.2", thm52},   {"extinction", extinction}};
  return table;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : suites()) n.push_back(name);
    n.push_back("all");
    return n;
  }();
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const Json& config) {
  std::vector<CheckResult> out;
  for (const auto& [suite, fn] : suites()) {
    if (name == "all" || name == suite) fn(config, out);
  }
  if (out.empty()) throw Error(Errc::unknown_suite, "unknown suite '" + name + "'");
  return out;
}

}  // namespace geneaperc::cli
