#include "geneaperc/branching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "geneaperc/error.hpp"

namespace geneaperc {

namespace {

constexpr double kPmfTolerance = 1e-12;
constexpr double kTailCut = 1e-17;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(Errc::invalid_argument, std::string(what) + " must lie in [0, 1]");
  }
}

double binomial_coefficient(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::uint32_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return n <= 60 ? std::round(c) : c;
}

}  // namespace

std::size_t Coloring::distinct() const {
  return std::set<Color>(values.begin(), values.end()).size();
}

// ---------------------------------------------------------------------------
// OffspringLaw

OffspringLaw::OffspringLaw(Kind kind, std::uint32_t n, double param)
    : kind_(kind), n_(n), param_(param) {}

OffspringLaw OffspringLaw::finite(std::vector<double> pmf) {
  if (pmf.empty()) throw Error(Errc::invalid_argument, "empty offspring pmf");
  double total = 0.0;
  for (double p : pmf) {
    check_probability(p, "pmf entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance) {
    throw Error(Errc::invalid_argument, "offspring pmf sums to " + std::to_string(total));
  }
  while (pmf.size() > 1 && pmf.back() == 0.0) pmf.pop_back();
  OffspringLaw law(Kind::finite, 0, 0.0);
  law.pmf_ = std::move(pmf);
  law.build_tables();
  return law;
}

OffspringLaw OffspringLaw::finite(const std::map<std::uint32_t, double>& pmf) {
  if (pmf.empty()) throw Error(Errc::invalid_argument, "empty offspring pmf");
  std::vector<double> dense(pmf.rbegin()->first + 1, 0.0);
  for (const auto& [k, p] : pmf) dense[k] = p;
  return finite(std::move(dense));
}

OffspringLaw OffspringLaw::point_mass(std::uint32_t k) {
  std::vector<double> pmf(k + 1, 0.0);
  pmf[k] = 1.0;
  return finite(std::move(pmf));
}

OffspringLaw OffspringLaw::uniform(std::uint32_t lo, std::uint32_t hi) {
  if (lo > hi) throw Error(Errc::invalid_argument, "uniform law needs lo <= hi");
  std::vector<double> pmf(hi + 1, 0.0);
  for (std::uint32_t k = lo; k <= hi; ++k) pmf[k] = 1.0 / (hi - lo + 1);
  return finite(std::move(pmf));
}

OffspringLaw OffspringLaw::binomial(std::uint32_t n, double p) {
  check_probability(p, "binomial p");
  OffspringLaw law(Kind::binomial, n, p);
  law.pmf_.resize(n + 1);
  for (std::uint32_t k = 0; k <= n; ++k) {
    law.pmf_[k] = binomial_coefficient(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
  }
  law.build_tables();
  return law;
}

OffspringLaw OffspringLaw::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(Errc::invalid_argument, "poisson rate must be finite and >= 0");
  }
  OffspringLaw law(Kind::poisson, 0, lambda);
  double term = std::exp(-lambda);
  double tail = 1.0 - term;
  law.pmf_.push_back(term);
  for (std::uint32_t k = 1; tail > kTailCut && k < 100000; ++k) {
    term = term * lambda / k;
    tail -= term;
    law.pmf_.push_back(term);
    if (term == 0.0 && static_cast<double>(k) > lambda) break;
  }
  law.build_tables();
  return law;
}

OffspringLaw OffspringLaw::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "geometric p must lie in (0, 1]");
  OffspringLaw law(Kind::geometric, 0, p);
  double term = p;
  double tail = 1.0 - p;
  law.pmf_.push_back(term);
  for (std::uint32_t k = 1; tail > kTailCut && k < 1'000'000; ++k) {
    term *= 1.0 - p;
    tail -= term;
    law.pmf_.push_back(term);
  }
  law.build_tables();
  return law;
}

void OffspringLaw::build_tables() {
  cdf_.resize(pmf_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < pmf_.size(); ++k) {
    acc += pmf_[k];
    cdf_[k] = acc;
  }
}

double OffspringLaw::pmf(std::uint32_t k) const {
  switch (kind_) {
    case Kind::finite:
    case Kind::binomial:
      return k < pmf_.size() ? pmf_[k] : 0.0;
    case Kind::poisson:
      if (k < pmf_.size()) return pmf_[k];
      if (param_ == 0.0) return 0.0;
      return std::exp(-param_ + k * std::log(param_) - std::lgamma(k + 1.0));
    case Kind::geometric:
      return param_ * std::pow(1.0 - param_, k);
  }
  return 0.0;
}

double OffspringLaw::mean() const {
  switch (kind_) {
    case Kind::finite: {
      double m = 0.0;
      for (std::size_t k = 0; k < pmf_.size(); ++k) m += static_cast<double>(k) * pmf_[k];
      return m;
    }
    case Kind::binomial: return n_ * param_;
    case Kind::poisson: return param_;
    case Kind::geometric: return (1.0 - param_) / param_;
  }
  return 0.0;
}

double OffspringLaw::variance() const {
  switch (kind_) {
    case Kind::finite: {
      const double m = mean();
      double v = 0.0;
      for (std::size_t k = 0; k < pmf_.size(); ++k) v += (k - m) * (k - m) * pmf_[k];
      return v;
    }
    case Kind::binomial: return n_ * param_ * (1.0 - param_);
    case Kind::poisson: return param_;
    case Kind::geometric: return (1.0 - param_) / (param_ * param_);
  }
  return 0.0;
}

double OffspringLaw::pgf(double s) const {
  switch (kind_) {
    case Kind::finite: {
      double acc = 0.0;  // Horner
      for (std::size_t k = pmf_.size(); k-- > 0;) acc = acc * s + pmf_[k];
      return acc;
    }
    case Kind::binomial: return std::pow(1.0 - param_ + param_ * s, n_);
    case Kind::poisson: return std::exp(param_ * (s - 1.0));
    case Kind::geometric: return param_ / (1.0 - (1.0 - param_) * s);
  }
  return 0.0;
}

std::optional<std::uint32_t> OffspringLaw::max_support() const {
  if (kind_ == Kind::poisson && param_ > 0.0) return std::nullopt;
  if (kind_ == Kind::geometric && param_ < 1.0) return std::nullopt;
  for (std::size_t k = pmf_.size(); k-- > 0;) {
    if (pmf_[k] > 0.0) return static_cast<std::uint32_t>(k);
  }
  return 0;
}

bool OffspringLaw::non_degenerate() const {
  if (pmf(0) + pmf(1) >= 1.0) return false;
  for (double p : pmf_) {
    if (p == 1.0) return false;
  }
  return true;
}

std::uint32_t OffspringLaw::quantile(double u) const {
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it != cdf_.end()) return static_cast<std::uint32_t>(it - cdf_.begin());
  // u landed in rounding slack above the accumulated table.
  if (kind_ == Kind::finite || kind_ == Kind::binomial) return *max_support();
  double acc = cdf_.back();
  std::uint32_t k = static_cast<std::uint32_t>(cdf_.size());
  for (;; ++k) {
    const double term = pmf(k);
    acc += term;
    if (acc >= u || term == 0.0) return k;
  }
}

std::string OffspringLaw::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::finite: {
      os << "finite{";
      bool first = true;
      for (std::size_t k = 0; k < pmf_.size(); ++k) {
        if (pmf_[k] == 0.0) continue;
        os << (first ? "" : ",") << k << ":" << pmf_[k];
        first = false;
      }
      os << "}";
      break;
    }
    case Kind::binomial: os << "binomial(" << n_ << "," << param_ << ")"; break;
    case Kind::poisson: os << "poisson(" << param_ << ")"; break;
    case Kind::geometric: os << "geometric(" << param_ << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// TypedOffspringLaw

TypedOffspringLaw::TypedOffspringLaw(std::vector<std::vector<TypedOutcome>> per_type) {
  if (per_type.empty()) throw Error(Errc::invalid_argument, "a typed law needs at least one type");
  const std::size_t d = per_type.size();
  for (std::size_t i = 0; i < d; ++i) {
    std::map<std::vector<std::uint32_t>, double> merged;
    double total = 0.0;
    for (const auto& outcome : per_type[i]) {
      if (outcome.counts.size() != d) {
        throw Error(Errc::invalid_vector, "offspring vector of type " + std::to_string(i + 1) +
                                              " has " + std::to_string(outcome.counts.size()) +
                                              " entries, expected " + std::to_string(d));
      }
      check_probability(outcome.probability, "typed outcome probability");
      merged[outcome.counts] += outcome.probability;
      total += outcome.probability;
    }
    if (std::abs(total - 1.0) > kPmfTolerance) {
      throw Error(Errc::invalid_argument,
                  "law of type " + std::to_string(i + 1) + " sums to " + std::to_string(total));
    }
    std::vector<TypedOutcome> outcomes;
    std::vector<double> cdf;
    double acc = 0.0;
    for (auto& [counts, p] : merged) {
      acc += p;
      outcomes.push_back({counts, p});
      cdf.push_back(acc);
    }
    per_type_.push_back(std::move(outcomes));
    cdf_.push_back(std::move(cdf));
  }
}

TypedOffspringLaw TypedOffspringLaw::single_type(const OffspringLaw& law) {
  const auto max = law.max_support();
  if (!max) throw Error(Errc::invalid_argument, "single_type needs a finite-support law");
  std::vector<TypedOutcome> outcomes;
  for (std::uint32_t k = 0; k <= *max; ++k) outcomes.push_back({{k}, law.pmf(k)});
  return TypedOffspringLaw({std::move(outcomes)});
}

void TypedOffspringLaw::check_type(Color type) const {
  if (type < 1 || type > per_type_.size()) {
    throw Error(Errc::type_out_of_range, "type " + std::to_string(type) + " outside 1.." +
                                             std::to_string(per_type_.size()));
  }
}

std::span<const TypedOutcome> TypedOffspringLaw::outcomes(Color type) const {
  check_type(type);
  return per_type_[type - 1];
}

const TypedOutcome& TypedOffspringLaw::sample(Color type, Rng& rng) const {
  check_type(type);
  const auto& cdf = cdf_[type - 1];
  const auto& outcomes = per_type_[type - 1];
  const double u = rng.uniform();
  auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) {
    for (std::size_t k = outcomes.size(); k-- > 0;) {
      if (outcomes[k].probability > 0.0) return outcomes[k];
    }
  }
  return outcomes[static_cast<std::size_t>(it - cdf.begin())];
}

OffspringLaw TypedOffspringLaw::total_count_law(Color type) const {
  std::map<std::uint32_t, double> pmf;
  for (const auto& outcome : outcomes(type)) {
    const auto n = std::accumulate(outcome.counts.begin(), outcome.counts.end(), 0U);
    pmf[n] += outcome.probability;
  }
  return OffspringLaw::finite(pmf);
}

// ---------------------------------------------------------------------------
// Sampling

void GrowthBudget::validate() const {
  if (max_vertices < 1) throw Error(Errc::budget_invalid, "max_vertices must be at least 1");
  if (max_vertices > (1ULL << 31)) {
    throw Error(Errc::budget_invalid, "max_vertices exceeds the vertex index range");
  }
}

std::string_view to_string(StopReason reason) noexcept {
  switch (reason) {
    case StopReason::extinct: return "extinct";
    case StopReason::generation_limit: return "generation-limit";
    case StopReason::vertex_limit: return "vertex-limit";
  }
  return "unknown";
}

namespace {

// Breadth-first growth shared by the single- and multi-type samplers so that
// both consume randomness identically. `draw` appends the children types of
// a vertex of type `mother` to `types` and returns how many it appended.
template <class Draw>
SampledTypedTree grow(Color root_type, const GrowthBudget& budget, Draw&& draw) {
  budget.validate();
  std::vector<std::uint32_t> counts;
  std::vector<Color> types{root_type};
  std::vector<Color> scratch;
  SampledTypedTree out;

  std::size_t generation_begin = 0;
  std::size_t generation_end = 1;
  std::uint32_t generation = 0;
  bool stopped = false;
  while (generation_begin < generation_end) {
    if (generation == budget.max_generation) {
      out.truncated = true;
      out.stop = StopReason::generation_limit;
      break;
    }
    for (std::size_t v = generation_begin; v < generation_end; ++v) {
      scratch.clear();
      const std::size_t k = draw(types[v], scratch);
      if (types.size() + k > budget.max_vertices) {
        out.truncated = true;
        out.stop = StopReason::vertex_limit;
        stopped = true;
        break;
      }
      counts.push_back(static_cast<std::uint32_t>(k));
      types.insert(types.end(), scratch.begin(), scratch.end());
    }
    if (stopped) break;
    generation_begin = generation_end;
    generation_end = types.size();
    ++generation;
  }
  counts.resize(types.size(), 0);

  std::vector<VertexId> to_pre;
  out.tree = Tree::from_breadth_first_counts(counts, &to_pre);
  out.types.values.assign(types.size(), 0);
  for (std::size_t b = 0; b < types.size(); ++b) out.types.values[to_pre[b]] = types[b];
  return out;
}

}  // namespace

SampledTree sample_bgw_tree(const OffspringLaw& law, const GrowthBudget& budget, Seed seed) {
  Rng rng(seed);
  auto grown = grow(1, budget, [&](Color, std::vector<Color>& children) {
    const std::uint32_t k = law.sample(rng);
    children.assign(k, 1);
    return static_cast<std::size_t>(k);
  });
  return {std::move(grown.tree), grown.truncated, grown.stop};
}

SampledTypedTree sample_multitype_tree(const TypedOffspringLaw& law, Color root_type,
                                       const GrowthBudget& budget, Seed seed) {
  if (root_type < 1 || root_type > law.types()) {
    throw Error(Errc::type_out_of_range, "root type " + std::to_string(root_type) +
                                             " outside 1.." + std::to_string(law.types()));
  }
  Rng rng(seed);
  return grow(root_type, budget, [&](Color mother, std::vector<Color>& children) {
    const auto& outcome = law.sample(mother, rng);
    for (std::size_t j = 0; j < outcome.counts.size(); ++j) {
      children.insert(children.end(), outcome.counts[j], static_cast<Color>(j + 1));
    }
    return children.size();
  });
}

// ---------------------------------------------------------------------------
// Extinction and criticality

double extinction_probability(const OffspringLaw& law, double tol, std::uint64_t max_iter) {
  if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "tolerance must be positive");
  const bool dies_surely = law.mean() <= 1.0 + kCriticalityTolerance && law.pmf(1) < 1.0;
  double s = 0.0;
  for (std::uint64_t i = 0; i < max_iter; ++i) {
    const double next = law.pgf(s);
    if (std::abs(next - s) < tol) return dies_surely ? 1.0 : next;
    s = next;
  }
  // At criticality the iterates approach 1 only like 1/n.
  if (dies_surely) return 1.0;
  throw Error(Errc::no_convergence, "fixed-point iteration did not settle within " +
                                        std::to_string(max_iter) + " steps");
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : dim_(rows.size()), data_() {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw Error(Errc::invalid_argument, "matrix is not square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

SquareMatrix SquareMatrix::identity(std::size_t dim) {
  SquareMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

SquareMatrix mean_matrix(const TypedOffspringLaw& law) {
  const std::size_t d = law.types();
  SquareMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (const auto& outcome : law.outcomes(static_cast<Color>(i + 1))) {
      for (std::size_t j = 0; j < d; ++j) m(i, j) += outcome.probability * outcome.counts[j];
    }
  }
  return m;
}

namespace {

bool strongly_connected(const SquareMatrix& m) {
  const std::size_t d = m.dim();
  auto reaches_all = [&](bool transpose) {
    std::vector<bool> seen(d, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < d; ++j) {
        const double w = transpose ? m(j, i) : m(i, j);
        if (w > 0.0 && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reaches_all(false) && reaches_all(true);
}

}  // namespace

PerronResult perron_root(const SquareMatrix& m, double tol, std::uint64_t max_iter) {
  const std::size_t d = m.dim();
  if (d == 0) throw Error(Errc::invalid_argument, "empty matrix");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (!(m(i, j) >= 0.0) || !std::isfinite(m(i, j))) {
        throw Error(Errc::invalid_argument, "mean matrix must be finite and nonnegative");
      }
    }
  }
  PerronResult result;
  if (d == 1) {
    result.rho = m(0, 0);
    return result;
  }
  result.reducible = !strongly_connected(m);

  // The shift by I makes an irreducible matrix primitive without moving the
  // Perron root relative to the others.
  std::vector<double> x(d, 1.0 / static_cast<double>(d));
  std::vector<double> y(d);
  double previous = -1.0;
  for (std::uint64_t it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = x[i];
      for (std::size_t j = 0; j < d; ++j) acc += m(i, j) * x[j];
      y[i] = acc;
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      norm += y[i];
      if (x[i] > 0.0) {
        lo = std::min(lo, y[i] / x[i]);
        hi = std::max(hi, y[i] / x[i]);
      }
    }
    const double estimate = norm;  // x has unit 1-norm
    result.iterations = it;
    if (hi - lo < tol) {
      result.rho = 0.5 * (hi + lo) - 1.0;
      return result;
    }
    if (result.reducible && std::abs(estimate - previous) < tol * 1e-3) {
      result.rho = estimate - 1.0;
      return result;
    }
    previous = estimate;
    for (std::size_t i = 0; i < d; ++i) x[i] = y[i] / norm;
  }
  throw Error(Errc::no_convergence, "power iteration did not converge");
}

std::string_view to_string(Criticality c) noexcept {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
  }
  return "unknown";
}

Criticality classify(double growth_rate) {
  if (std::abs(growth_rate - 1.0) <= kCriticalityTolerance) return Criticality::critical;
  return growth_rate < 1.0 ? Criticality::subcritical : Criticality::supercritical;
}

Criticality classify(const OffspringLaw& law) { return classify(law.mean()); }

Criticality classify(const SquareMatrix& mean) {
  if (mean.dim() == 1) return classify(mean(0, 0));
  return classify(perron_root(mean).rho);
}

}  // namespace geneaperc
