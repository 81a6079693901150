#include "doctest.h"
#include "geneaperc/error.hpp"
#include "geneaperc/mc.hpp"
#include "geneaperc/oracle.hpp"
#include "geneaperc/percolation.hpp"
#include "helpers.hpp"

using namespace geneaperc;

namespace {

Rational q(const char* text) { return parse_rational(text); }

ExactLaw law_of(std::string kind, std::initializer_list<std::pair<const char*, const char*>> entries) {
  ExactLaw out(std::move(kind));
  for (const auto& [o, p] : entries) out.add(o, q(p));
  return out;
}

// Root cluster size law by direct summation over edge bit vectors.
ExactLaw brute_root_cluster_law(const Tree& t, const Rational& p) {
  ExactLaw out("root-component-size");
  testutil::for_each_bits(t.edge_count(), [&](const std::vector<std::uint8_t>& bits) {
    Rational w = 1;
    for (auto b : bits) w *= b ? p : 1 - p;
    out.add(std::to_string(root_cluster_size(t, EdgeConfig(bits, 0.5))), w);
  });
  return out;
}

}  // namespace

TEST_CASE("rationals") {
  CHECK(parse_rational("1/3") == Rational(1, 3));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-2") == Rational(-2));
  CHECK_THROWS_AS(parse_rational("one"), Error);
  CHECK(to_rational(0.4) == Rational(2, 5));
  CHECK(to_rational(1.0 / 3.0) == Rational(1, 3));
  CHECK(to_double(Rational(1, 8)) == 0.125);
  CHECK(to_decimal(Rational(1, 3), 5) == "0.33333");
}

TEST_CASE("exact root cluster law") {
  const Tree d1 = complete_tree(2, 1);
  CHECK(exact_root_cluster_law(d1, q("1/2")) == law_of("root-component-size", {{"1", "1/4"}, {"2", "1/2"}, {"3", "1/4"}}));
  CHECK(exact_root_cluster_law(d1, 1) == law_of("root-component-size", {{"3", "1"}}));
  CHECK(exact_root_cluster_law(d1, 0) == law_of("root-component-size", {{"1", "1"}}));
  for (const Tree& t : {complete_tree(2, 2), complete_tree(3, 2), path_tree(5), Tree::from_preorder_counts({3, 2, 0, 1, 0, 0, 1, 0})}) {
    CHECK(exact_root_cluster_law(t, q("2/7")) == brute_root_cluster_law(t, q("2/7")));
  }
  CHECK_THROWS_AS(exact_root_cluster_law(complete_tree(2, 4), q("1/2")), Error);
}

TEST_CASE("exact truncated BGW law") {
  const auto path = exact_bgw_truncated_law(rational_pmf(OffspringLaw::point_mass(1)), {2, 8});
  REQUIRE(path.support_size() == 1);
  CHECK(path.probability("1,1,0") == 1);

  const Rational p = q("3/10");
  const auto d1 = exact_bgw_truncated_law(binomial_pmf(2, p), {1, 8});
  CHECK(d1.probability("0") == (1 - p) * (1 - p));
  CHECK(d1.probability("1,0") == 2 * p * (1 - p));
  CHECK(d1.probability("2,0,0") == p * p);
  CHECK(d1.total() == 1);

  for (const char* text : {"3/10", "1/2", "7/10"}) {
    const auto cluster = exact_root_cluster_shape_law(complete_tree(2, 2), q(text));
    const auto bgw = exact_bgw_truncated_law(binomial_pmf(2, q(text)), {2, 2});
    CHECK(tv_distance(cluster, bgw) == 0);
  }
  CHECK_THROWS_AS(exact_bgw_truncated_law(binomial_pmf(3, p), {2, 2}), Error);
}

TEST_CASE("exact coloring laws") {
  const Tree d1 = complete_tree(2, 1);
  ColoringLawParams dac;
  dac.p = q("1/2");
  dac.d = 2;
  const auto full = exact_coloring_law(d1, Model::dac, dac, Observable::full);
  // Independent count: each of four edge states weighs 1/4, each cluster 1/2.
  Rational expected = 0;
  testutil::for_each_bits(2, [&](const std::vector<std::uint8_t>& b) {
    Rational w(1, 4);
    for (int k = 0; k < 3 - b[0] - b[1]; ++k) w /= 2;
    expected += w;
  });
  CHECK(full.probability("1,1,1") == expected);
  // Four edge states: 1/8 + 1/16 + 1/16 + 1/32.
  CHECK(expected == Rational(9, 32));
  CHECK(full.total() == 1);

  ColoringLawParams solid;
  solid.p = 1;
  solid.d = 2;
  solid.a = {q("1/5"), q("4/5")};
  const auto mono = exact_coloring_law(complete_tree(2, 2), Model::dac, solid, Observable::full);
  CHECK(mono.probability("1,1,1,1,1,1,1") == q("1/5"));

  ColoringLawParams restricted;
  restricted.p = q("2/5");
  restricted.d = 2;
  restricted.root_color = 1;
  const auto r = exact_coloring_law(d1, Model::restricted_dac, restricted, Observable::full);
  Rational same = 0;
  for (const auto& [o, w] : r.outcomes()) {
    if (o[0] == o[2]) same += w;
  }
  CHECK(same == restricted.p);

  ColoringLawParams ia;
  ia.r = q("1/3");
  for (const Tree& t : {complete_tree(2, 2), path_tree(4)}) {
    ColoringLawParams perc;
    perc.p = q("2/3");
    CHECK(exact_coloring_law(t, Model::infinite_alleles, ia, Observable::partition) ==
          exact_coloring_law(t, Model::bernoulli, perc, Observable::partition));
  }

  CHECK_THROWS_AS(exact_coloring_law(d1, Model::bernoulli, dac, Observable::child_types), Error);
  CHECK_THROWS_AS(exact_coloring_law(complete_tree(2, 5), Model::dac, dac, Observable::full, 1, 1000), Error);
}

TEST_CASE("oracle is independent of the worker count") {
  ColoringLawParams params;
  params.p = q("1/3");
  params.d = 3;
  const Tree t = complete_tree(3, 2);
  const auto one = exact_coloring_law(t, Model::restricted_dac, params, Observable::root_component_shape, 1);
  const auto four = exact_coloring_law(t, Model::restricted_dac, params, Observable::root_component_shape, 4);
  CHECK(one == four);
  CHECK(one.to_csv() == four.to_csv());
}

TEST_CASE("tv distance") {
  const auto a = law_of("x", {{"1", "1/4"}, {"2", "1/2"}, {"3", "1/4"}});
  const auto b = law_of("x", {{"1", "1/4"}, {"2", "1/4"}, {"3", "1/2"}});
  CHECK(tv_distance(a, a) == 0);
  CHECK(tv_distance(a, b) == Rational(1, 4));
  CHECK(tv_distance(law_of("x", {{"1", "1"}}), law_of("x", {{"2", "1"}})) == 1);
  CHECK_THROWS_AS(tv_distance(a, law_of("y", {{"1", "1"}})), Error);
  EmpiricalLaw e{"x", {}, 0};
  e.add("1", 1);
  e.add("2", 2);
  e.add("3", 1);
  CHECK(tv_distance(a, e) == doctest::Approx(0.0));
  CHECK(tv_threshold(3, 1000, 0.001) > 0.0);
  CHECK(tv_threshold(3, 4000, 0.001) < tv_threshold(3, 1000, 0.001));
}

TEST_CASE("exact law exports") {
  const auto a = law_of("root-component-size", {{"1", "1/4"}, {"2", "1/2"}, {"3", "1/4"}});
  CHECK(a.to_csv() == "outcome,numerator,denominator\n\"1\",1,4\n\"2\",1,2\n\"3\",1,4\n");
  CHECK(a.to_json().find("0.25") != std::string::npos);
  OutcomeLess less;
  CHECK(less("2", "10"));
  CHECK(less("1,2", "1,10"));
}

TEST_CASE("truncated survival probability") {
  // One generation: 1 - f(1 - p).
  const auto law = OffspringLaw::uniform(1, 3);
  const double p = 0.5;
  const double f = (0.5 + 0.25 + 0.125) / 3.0;
  CHECK(truncated_survival_probability(law, p, 1) == doctest::Approx(1 - f));
  CHECK(truncated_survival_probability(law, 1.0, 30) == doctest::Approx(1.0));
  CHECK(truncated_survival_probability(law, 0.0, 3) == 0.0);
}

TEST_CASE("samplers agree with the oracle in total variation" * doctest::test_suite("statistical")) {
  const std::uint64_t n = 100'000;
  const double alpha = 0.001;
  const Tree t = complete_tree(2, 2);
  struct Case {
    ModelInstance model;
    Observable obs;
  };
  const std::vector<Case> cases{
      {{Model::bernoulli, 0.4, q("2/5"), 2, {}, {}, std::nullopt}, Observable::root_component_shape},
      {{Model::infinite_alleles, 0.3, q("3/10"), 2, {}, {}, std::nullopt}, Observable::partition},
      {{Model::dac, 0.5, q("1/2"), 2, {0.25, 0.75}, {q("1/4"), q("3/4")}, std::nullopt}, Observable::full},
      {{Model::restricted_dac, 0.3, q("3/10"), 3, {}, {}, Color{1}}, Observable::full},
      {{Model::mdm, 0.5, q("1/2"), 3, {}, {}, Color{2}}, Observable::full},
      {{Model::mim, 0.5, q("1/2"), 2, {}, {}, Color{1}}, Observable::full},
  };
  for (const auto& c : cases) {
    ColoringLawParams params;
    (c.model.model == Model::infinite_alleles || c.model.model == Model::mdm || c.model.model == Model::mim
         ? params.r
         : params.p) = c.model.exact_parameter;
    params.d = c.model.d;
    params.a = c.model.exact_weights;
    params.root_color = c.model.root_color;
    const auto exact = exact_coloring_law(t, c.model.model, params, c.obs);
    EmpiricalLaw emp{exact.kind(), {}, 0};
    for (std::uint64_t i = 0; i < n; ++i) emp.add(sample_observable(c.model, t, c.obs, derive_seed(404, i)));
    const double tv = tv_distance(exact, emp);
    INFO(to_string(c.model.model));
    CHECK(tv < tv_threshold(exact.support_size(), n, alpha));
  }
}
