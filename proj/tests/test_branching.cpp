#include <chrono>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "geneaperc/branching.hpp"
#include "geneaperc/error.hpp"
#include "geneaperc/mc.hpp"

#ifdef GENEAPERC_HAVE_EIGEN
#include <Eigen/Eigenvalues>
#endif

using namespace geneaperc;

namespace {

std::vector<std::uint32_t> generation_sizes(const Tree& t) {
  std::vector<std::uint32_t> sizes(t.height() + 1, 0);
  for (VertexId v = 0; v < t.size(); ++v) ++sizes[t.depth(v)];
  return sizes;
}

TypedOutcome outcome(std::vector<std::uint32_t> counts, double p) { return TypedOutcome{std::move(counts), p}; }

}  // namespace

TEST_CASE("offspring laws") {
  const auto fig1 = OffspringLaw::uniform(1, 3);
  CHECK(fig1.mean() == doctest::Approx(2.0));
  CHECK(fig1.variance() == doctest::Approx(2.0 / 3.0));
  CHECK(fig1.pmf(0) == 0.0);
  CHECK(fig1.pmf(2) == doctest::Approx(1.0 / 3.0));
  CHECK(fig1.max_support() == 3u);
  CHECK(fig1.non_degenerate());
  CHECK_FALSE(OffspringLaw::point_mass(1).non_degenerate());

  const auto bin = OffspringLaw::binomial(2, 0.75);
  CHECK(bin.pmf(0) == doctest::Approx(1.0 / 16));
  CHECK(bin.pmf(1) == doctest::Approx(6.0 / 16));
  CHECK(bin.pgf(0.5) == doctest::Approx(std::pow(0.25 + 0.375, 2)));

  const auto poi = OffspringLaw::poisson(0.5);
  CHECK(poi.pmf(0) == doctest::Approx(std::exp(-0.5)));
  CHECK(poi.mean() == doctest::Approx(0.5));
  const auto geo = OffspringLaw::geometric(0.5);
  CHECK(geo.pmf(0) == doctest::Approx(0.5));
  CHECK(geo.mean() == doctest::Approx(1.0));

  CHECK_THROWS_AS(OffspringLaw::finite(std::vector<double>{0.5, 0.6}), Error);
  CHECK_THROWS_AS(OffspringLaw::finite(std::vector<double>{-0.1, 1.1}), Error);
  CHECK_THROWS_AS(OffspringLaw::binomial(2, 1.5), Error);
}

TEST_CASE("sample_bgw_tree") {
  GrowthBudget budget;
  budget.max_generation = 3;
  const auto two = sample_bgw_tree(OffspringLaw::point_mass(2), budget, 1);
  CHECK(two.tree.size() == 15);
  CHECK(two.truncated);
  CHECK(two.tree == complete_tree(2, 3));
  CHECK(two.stop == StopReason::generation_limit);

  const auto zero = sample_bgw_tree(OffspringLaw::point_mass(0), budget, 1);
  CHECK(zero.tree.size() == 1);
  CHECK_FALSE(zero.truncated);
  CHECK(zero.stop == StopReason::extinct);

  GrowthBudget small;
  small.max_generation = 100;
  small.max_vertices = 10;
  const auto capped = sample_bgw_tree(OffspringLaw::point_mass(2), small, 1);
  CHECK(capped.truncated);
  CHECK(capped.stop == StopReason::vertex_limit);
  CHECK(capped.tree.size() <= 10);

  GrowthBudget bad;
  bad.max_vertices = 0;
  CHECK_THROWS_AS(sample_bgw_tree(OffspringLaw::point_mass(2), bad, 1), Error);

  const auto a = sample_bgw_tree(OffspringLaw::uniform(1, 3), budget, 42);
  const auto b = sample_bgw_tree(OffspringLaw::uniform(1, 3), budget, 42);
  CHECK(a.tree == b.tree);
}

TEST_CASE("fig1 law mean child count") {
  const auto law = OffspringLaw::uniform(1, 3);
  Rng rng(2024);
  double sum = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) sum += law.sample(rng);
  CHECK(std::abs(sum / n - 2.0) < 0.01);
}

TEST_CASE("multi-type sampling") {
  GrowthBudget budget;
  budget.max_generation = 5;
  // d = 1 reduces to the single-type sampler.
  const auto law = OffspringLaw::uniform(1, 3);
  const auto single = sample_multitype_tree(TypedOffspringLaw::single_type(law), 1, budget, 9);
  CHECK(single.tree.size() > 1);
  CHECK(single.types.distinct() == 1);
  CHECK(TypedOffspringLaw::single_type(law).total_count_law(1).mean() == doctest::Approx(2.0));

  // Point mass on e_i: an all-one-type path.
  TypedOffspringLaw self({{outcome({1, 0}, 1.0)}, {outcome({0, 1}, 1.0)}});
  const auto path = sample_multitype_tree(self, 2, budget, 3);
  CHECK(path.tree == path_tree(5));
  CHECK(path.truncated);
  for (VertexId v = 0; v < path.tree.size(); ++v) CHECK(path.types[v] == 2);

  CHECK_THROWS_AS(sample_multitype_tree(self, 3, budget, 3), Error);

  // Children of each type are placed in type order.
  TypedOffspringLaw mixed({{outcome({2, 1}, 1.0)}, {outcome({0, 0}, 1.0)}});
  GrowthBudget one;
  one.max_generation = 1;
  const auto m = sample_multitype_tree(mixed, 1, one, 3);
  REQUIRE(m.tree.size() == 4);
  CHECK(m.types[1] == 1);
  CHECK(m.types[2] == 1);
  CHECK(m.types[3] == 2);
}

TEST_CASE("multi-type symmetric first generation" * doctest::test_suite("statistical")) {
  TypedOffspringLaw sym({{outcome({1, 0}, 0.5), outcome({0, 1}, 0.5)}, {outcome({1, 0}, 0.5), outcome({0, 1}, 0.5)}});
  GrowthBudget one;
  one.max_generation = 1;
  int ones = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_multitype_tree(sym, 1, one, derive_seed(77, i));
    ones += s.types[1] == 1;
  }
  CHECK(std::abs(static_cast<double>(ones) / n - 0.5) < 0.01);
}

TEST_CASE("extinction probability") {
  using clock = std::chrono::steady_clock;
  // Smallest root of 9 s^2 - 10 s + 1 = 0, from (1/4 + 3s/4)^2 = s.
  const double root = (10.0 - std::sqrt(100.0 - 36.0)) / 18.0;
  auto t0 = clock::now();
  const double q = extinction_probability(OffspringLaw::binomial(2, 0.75));
  auto t1 = clock::now();
  CHECK(std::abs(q - root) < 1e-10);
  CHECK(std::chrono::duration<double>(t1 - t0).count() < 1e-3);
  CHECK(extinction_probability(OffspringLaw::poisson(0.5)) == 1.0);
  CHECK(extinction_probability(OffspringLaw::uniform(1, 3)) == 0.0);
  CHECK(extinction_probability(OffspringLaw::point_mass(1)) == 0.0);
  CHECK_THROWS_AS(extinction_probability(OffspringLaw::binomial(2, 0.75), 1e-300, 3), Error);

  for (const auto& law : {OffspringLaw::binomial(3, 0.5), OffspringLaw::poisson(1.7), OffspringLaw::geometric(0.3),
                          OffspringLaw::finite(std::vector<double>{0.2, 0.3, 0.5})}) {
    const double tol = 1e-12;
    const double qq = extinction_probability(law, tol);
    CHECK(std::abs(law.pgf(qq) - qq) < 10 * tol);
    CHECK((qq == 1.0) == (classify(law) != Criticality::supercritical));
  }
}

TEST_CASE("mean matrix and Perron root") {
  const auto law = OffspringLaw::uniform(1, 3);
  const auto m1 = mean_matrix(TypedOffspringLaw::single_type(law));
  REQUIRE(m1.dim() == 1);
  CHECK(m1(0, 0) == doctest::Approx(2.0));

  TypedOffspringLaw self({{outcome({1, 0}, 1.0)}, {outcome({0, 1}, 1.0)}});
  CHECK(mean_matrix(self) == SquareMatrix::identity(2));
  TypedOffspringLaw both({{outcome({1, 1}, 1.0)}, {outcome({1, 1}, 1.0)}});
  CHECK(mean_matrix(both) == SquareMatrix{{1, 1}, {1, 1}});

  CHECK(perron_root(SquareMatrix{{1, 1}, {1, 1}}).rho == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(perron_root(SquareMatrix{{0.5, 0.5}, {0.25, 0.25}}).rho == doctest::Approx(0.75).epsilon(1e-10));
  const auto id = perron_root(SquareMatrix::identity(3));
  CHECK(id.rho == doctest::Approx(1.0));
  CHECK(id.reducible);
  CHECK_THROWS_AS(perron_root(SquareMatrix{{1, -1}, {0, 1}}), Error);

  CHECK(classify(2.0) == Criticality::supercritical);
  CHECK(classify(1.0) == Criticality::critical);
  CHECK(classify(1.0 + 1e-10) == Criticality::critical);
  CHECK(classify(0.75) == Criticality::subcritical);
  CHECK(classify(SquareMatrix{{0.5, 0.5}, {0.25, 0.25}}) == Criticality::subcritical);
}

#ifdef GENEAPERC_HAVE_EIGEN
TEST_CASE("Perron root agrees with a dense eigensolver") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng.below(4);
    SquareMatrix m(d);
    Eigen::MatrixXd e(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        m(i, j) = e(i, j) = 0.05 + 2.0 * rng.uniform();
      }
    }
    const double expected = e.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(perron_root(m).rho == doctest::Approx(expected).epsilon(1e-9));
  }
}
#endif

TEST_CASE("generation sizes grow by the mean" * doctest::test_suite("statistical")) {
  const auto law = OffspringLaw::uniform(1, 3);
  GrowthBudget budget;
  budget.max_generation = 6;
  std::vector<double> totals(7, 0.0);
  for (int i = 0; i < 2000; ++i) {
    const auto sizes = generation_sizes(sample_bgw_tree(law, budget, derive_seed(3, i)).tree);
    for (std::size_t g = 0; g < sizes.size(); ++g) totals[g] += sizes[g];
  }
  for (std::size_t g = 0; g + 1 < totals.size(); ++g) {
    CHECK(totals[g + 1] / totals[g] == doctest::Approx(2.0).epsilon(0.02));
  }
}

TEST_CASE("branching property: two roots give the convolution" * doctest::test_suite("statistical")) {
  const auto law = OffspringLaw::binomial(2, 0.4);
  GrowthBudget budget;
  budget.max_generation = 8;
  // Left: two independent sampled trees. Right: one population started from
  // two ancestors, simulated by generation counts.
  EmpiricalLaw lhs{"total", {}, 0}, rhs{"total", {}, 0};
  Rng rng(99);
  for (int i = 0; i < 20'000; ++i) {
    const auto a = sample_bgw_tree(law, budget, derive_seed(1, 2 * i)).tree.size();
    const auto b = sample_bgw_tree(law, budget, derive_seed(1, 2 * i + 1)).tree.size();
    lhs.add(std::to_string(a + b));
    std::uint64_t generation = 2, total = 2;
    for (std::uint32_t g = 0; g < budget.max_generation && generation > 0; ++g) {
      std::uint64_t next = 0;
      for (std::uint64_t j = 0; j < generation; ++j) next += law.sample(rng);
      generation = next;
      total += next;
    }
    rhs.add(std::to_string(total));
  }
  const auto test = chi_square_two_sample(lhs, rhs, 0.999);
  CHECK(test.pass);
}
