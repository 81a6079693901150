#include "geneaperc/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "geneaperc/error.hpp"
#include "json.hpp"

namespace geneaperc {

namespace {

// Stream tags for the counter-based genealogy: every random quantity of a
// vertex is a hash of the vertex's own hash and one of these.
constexpr std::uint64_t kCountTag = 0x9e6c63d0676a9a99ULL;
constexpr std::uint64_t kEdgeTag = 0xd6e8feb86659fd93ULL;
constexpr std::uint64_t kColorTag = 0xa0761d6478bd642fULL;
constexpr std::uint64_t kRootTag = 0xe7037ed1a0b428dbULL;
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

double unit(std::uint64_t h) { return bits_to_unit(mix64(h)); }

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Color draw_color(double u, const std::vector<double>& cdf) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  return static_cast<Color>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1)) + 1;
}

std::vector<double> color_cdf(const ExperimentPlan& plan) {
  std::vector<double> w = plan.color_weights;
  if (w.empty()) w.assign(plan.d, 1.0 / plan.d);
  std::vector<double> cdf;
  double acc = 0.0;
  for (double x : w) cdf.push_back(acc += x);
  cdf.back() = 1.0;
  return cdf;
}

struct Frontier {
  double bottleneck;
  std::uint32_t depth;
  std::uint64_t hash;
};

struct FrontierAfter {
  // Smallest bottleneck first, deepest first among ties.
  bool operator()(const Frontier& a, const Frontier& b) const {
    if (a.bottleneck != b.bottleneck) return a.bottleneck > b.bottleneck;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.hash > b.hash;
  }
};

std::uint64_t plan_chunks(const ExperimentPlan& plan) {
  return (plan.replicates + plan.chunk - 1) / plan.chunk;
}

void run_chunk(const ExperimentPlan& plan, std::uint64_t c, std::vector<ReplicateOutcome>& out) {
  const std::uint64_t first = c * plan.chunk;
  const std::uint64_t last = std::min(plan.replicates, first + plan.chunk);
  for (std::uint64_t i = first; i < last; ++i) out[i] = run_replicate(plan, i);
}

template <class Job>
void parallel_for(std::uint64_t n, unsigned workers, Job&& job) {
  workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, n)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::uint64_t i = next++; i < n; i = next++) job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::string chunk_header(const ExperimentPlan& plan, std::uint64_t c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "geneaperc-chunk plan=%016llx index=%llu",
                static_cast<unsigned long long>(plan.hash()), static_cast<unsigned long long>(c));
  return buf;
}

bool read_chunk(const std::filesystem::path& file, const ExperimentPlan& plan, std::uint64_t c,
                std::vector<ReplicateOutcome>& out) {
  std::ifstream in(file);
  if (!in) return false;
  std::string header;
  if (!std::getline(in, header) || header != chunk_header(plan, c)) return false;
  const std::uint64_t first = c * plan.chunk;
  const std::uint64_t last = std::min(plan.replicates, first + plan.chunk);
  std::vector<ReplicateOutcome> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line == "end") break;
    std::istringstream fields(line);
    std::string threshold;
    int capped = 0, died = 0;
    ReplicateOutcome r;
    if (!(fields >> threshold >> capped >> died >> r.explored)) return false;
    r.threshold = std::strtod(threshold.c_str(), nullptr);
    r.capped = capped != 0;
    r.died = died != 0;
    rows.push_back(r);
  }
  if (line != "end" || rows.size() != last - first) return false;
  std::copy(rows.begin(), rows.end(), out.begin() + static_cast<std::ptrdiff_t>(first));
  return true;
}

std::string chunk_text(const ExperimentPlan& plan, std::uint64_t c, const std::vector<ReplicateOutcome>& out) {
  std::ostringstream os;
  os << chunk_header(plan, c) << '\n';
  const std::uint64_t first = c * plan.chunk;
  const std::uint64_t last = std::min(plan.replicates, first + plan.chunk);
  char buf[48];
  for (std::uint64_t i = first; i < last; ++i) {
    const auto& r = out[i];
    if (std::isinf(r.threshold)) std::snprintf(buf, sizeof buf, "inf");
    else std::snprintf(buf, sizeof buf, "%a", r.threshold);
    os << buf << ' ' << int(r.capped) << ' ' << int(r.died) << ' ' << r.explored << '\n';
  }
  os << "end\n";
  return os.str();
}

}  // namespace

bool sweeps_mutation_rate(Model model) noexcept {
  return model == Model::infinite_alleles || model == Model::mdm || model == Model::mim;
}

void ExperimentPlan::validate() const {
  const auto fail = [](const std::string& what) { throw Error(Errc::plan_invalid, what); };
  if (replicates < 1) fail("replicates must be at least 1");
  if (depth < 1) fail("survival depth must be at least 1");
  if (vertex_cap < 1) fail("vertex cap must be at least 1");
  if (chunk < 1) fail("chunk size must be at least 1");
  if (!(confidence > 0.0 && confidence < 1.0)) fail("confidence must lie in (0, 1)");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) fail("grid values must lie in [0, 1]");
    if (i > 0 && !(grid[i - 1] < grid[i])) fail("grid must be strictly ascending");
  }
  const bool colored = model == Model::dac || model == Model::restricted_dac || model == Model::mdm ||
                       model == Model::mim;
  if (colored && d < 1) fail("need at least one color");
  if (colored && model != Model::dac && d < 2) fail("model needs d >= 2");
  if (!color_weights.empty()) {
    if (color_weights.size() != d) fail("color weights need d entries");
    double sum = 0.0;
    for (double w : color_weights) {
      if (!(w >= 0.0)) fail("color weights must be nonnegative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) fail("color weights must sum to 1");
  }
  if (root_color && (*root_color < 1 || *root_color > d)) fail("root color out of range");
  if (!(threshold_low() > 0.0 && threshold_low() < threshold_high() && threshold_high() < 1.0)) {
    fail("need 0 < tau_low < tau_high < 1");
  }
}

std::string ExperimentPlan::canonical() const {
  std::ostringstream os;
  os << "model=" << to_string(model) << "\nlaw=";
  if (law.max_support()) {
    for (double x : law.table()) os << format_double(x) << ',';
  } else {
    os << law.describe();
  }
  os << "\nd=" << d << "\nweights=";
  for (double w : color_weights) os << format_double(w) << ',';
  os << "\nroot_color=" << (root_color ? std::to_string(*root_color) : "none") << "\ngrid=";
  for (double x : grid) os << format_double(x) << ',';
  os << "\nreplicates=" << replicates << "\ndepth=" << depth << "\nvertex_cap=" << vertex_cap
     << "\nseed=" << master_seed << "\nconfidence=" << format_double(confidence)
     << "\ncondition=" << condition_on_survival << "\ntau=" << format_double(threshold_low()) << ','
     << format_double(threshold_high()) << "\nchunk=" << chunk << '\n';
  return os.str();
}

std::uint64_t ExperimentPlan::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ReplicateOutcome run_replicate(const ExperimentPlan& plan, std::uint64_t index) {
  const std::uint64_t root = mix64(derive_seed(plan.master_seed, index));
  const std::vector<double> cdf = plan.model == Model::dac ? color_cdf(plan) : std::vector<double>{};
  Color root_color = plan.root_color.value_or(1);
  if (plan.model == Model::dac && !plan.root_color) root_color = draw_color(unit(root ^ kRootTag), cdf);

  // Threshold of the edge into a child: the component passes it at
  // retention x iff threshold <= x.
  const auto edge_threshold = [&](std::uint64_t child) {
    const double u = unit(child ^ kEdgeTag);
    switch (plan.model) {
      case Model::dac:
        return draw_color(unit(child ^ kColorTag), cdf) == root_color ? 0.0 : u;
      case Model::mim: {
        const auto type = static_cast<Color>(
            std::min<std::uint64_t>(static_cast<std::uint64_t>(unit(child ^ kColorTag) * plan.d), plan.d - 1) + 1);
        return type == root_color ? 0.0 : u;
      }
      default:
        return u;
    }
  };

  ReplicateOutcome out;
  std::priority_queue<Frontier, std::vector<Frontier>, FrontierAfter> queue;
  queue.push({0.0, 0, root});
  while (!queue.empty()) {
    const Frontier f = queue.top();
    queue.pop();
    if (f.depth == plan.depth) {
      out.threshold = f.bottleneck;
      return out;
    }
    if (++out.explored > plan.vertex_cap) {
      out.threshold = f.bottleneck;
      out.capped = true;
      return out;
    }
    const std::uint32_t k = plan.law.quantile(unit(f.hash ^ kCountTag));
    for (std::uint32_t i = 0; i < k; ++i) {
      const std::uint64_t child = mix64(f.hash + kGolden * (i + 1));
      queue.push({std::max(f.bottleneck, edge_threshold(child)), f.depth + 1, child});
    }
  }
  out.died = true;
  return out;
}

std::vector<ReplicateOutcome> run_replicates(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<ReplicateOutcome> out(plan.replicates);
  parallel_for(plan_chunks(plan), plan.workers, [&](std::uint64_t c) { run_chunk(plan, c, out); });
  return out;
}

ConfidenceInterval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (successes > trials) throw Error(Errc::invalid_argument, "more successes than trials");
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error(Errc::invalid_argument, "confidence must lie in (0, 1)");
  if (trials == 0) return {0.0, 1.0};
  const double alpha = 1.0 - confidence;
  const auto s = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  ConfidenceInterval ci;
  ci.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(s, n - s + 1.0, alpha / 2.0);
  ci.high = successes == trials ? 1.0 : boost::math::ibeta_inv(s + 1.0, n - s, 1.0 - alpha / 2.0);
  return ci;
}

std::vector<EstimateRecord> summarize(const ExperimentPlan& plan, const std::vector<ReplicateOutcome>& outcomes) {
  std::vector<double> all, capped;
  std::uint64_t died = 0;
  for (const auto& r : outcomes) {
    if (r.died) {
      ++died;
      continue;
    }
    all.push_back(r.threshold);
    if (r.capped) capped.push_back(r.threshold);
  }
  std::sort(all.begin(), all.end());
  std::sort(capped.begin(), capped.end());
  const std::uint64_t n = outcomes.size();
  const std::uint64_t used = plan.condition_on_survival ? n - died : n;

  std::vector<EstimateRecord> records;
  for (double x : plan.grid) {
    const double retention = sweeps_mutation_rate(plan.model) ? 1.0 - x : x;
    EstimateRecord rec;
    rec.parameter = x;
    rec.used = used;
    rec.discarded = n - used;
    rec.successes = static_cast<std::uint64_t>(std::upper_bound(all.begin(), all.end(), retention) - all.begin());
    rec.cap_hits =
        static_cast<std::uint64_t>(std::upper_bound(capped.begin(), capped.end(), retention) - capped.begin());
    if (used > 0) {
      rec.estimate = static_cast<double>(rec.successes) / static_cast<double>(used);
      rec.estimate_uncapped = static_cast<double>(rec.successes - rec.cap_hits) / static_cast<double>(used);
    }
    rec.ci = clopper_pearson(rec.successes, used, plan.confidence);
    rec.half_width = (rec.ci.high - rec.ci.low) / 2.0;
    records.push_back(rec);
  }
  return records;
}

std::vector<EstimateRecord> estimate_survival(const ExperimentPlan& plan) {
  return summarize(plan, run_replicates(plan));
}

std::string_view to_string(BracketStatus s) noexcept {
  return s == BracketStatus::bracketed ? "bracketed" : "always-supercritical";
}

CriticalBracket locate_critical(const ExperimentPlan& plan, double tol) {
  return locate_critical(plan, tol, run_replicates(plan));
}

CriticalBracket locate_critical(const ExperimentPlan& plan, double tol,
                                const std::vector<ReplicateOutcome>& outcomes) {
  plan.validate();
  if (!(tol > 0.0)) throw Error(Errc::invalid_argument, "tolerance must be positive");
  CriticalBracket out;
  std::vector<double> thresholds;
  for (const auto& r : outcomes) {
    if (r.died && plan.condition_on_survival) {
      ++out.discarded;
      continue;
    }
    thresholds.push_back(r.threshold);
    out.cap_hits += r.capped ? 1 : 0;
  }
  std::sort(thresholds.begin(), thresholds.end());
  const std::uint64_t n = thresholds.size();
  out.used = n;
  if (n == 0) throw Error(Errc::bracket_failure, "no usable replicates");

  // The success count at retention x is #{threshold <= x}, a step function;
  // both bounds are monotone in it, so the searches run over order
  // statistics.
  const double lo_tau = plan.threshold_low(), hi_tau = plan.threshold_high();
  const auto upper = [&](std::uint64_t k) { return clopper_pearson(k, n, plan.confidence).high; };
  const auto lower = [&](std::uint64_t k) { return clopper_pearson(k, n, plan.confidence).low; };

  // Largest k with upper(k) < tau_low, by bisection on k.
  std::optional<double> p_low;
  if (upper(0) < lo_tau) {
    std::uint64_t good = 0, bad = n + 1;
    while (bad - good > 1) {
      const std::uint64_t mid = good + (bad - good) / 2;
      if (upper(mid) < lo_tau) good = mid;
      else bad = mid;
    }
    // Retentions below thresholds[good] have at most `good` successes; that
    // range is empty when thresholds[good] is already 0.
    if (good == n) p_low = 1.0;
    else if (thresholds[good] > 0.0) p_low = std::min(1.0, thresholds[good]);
  }
  // Smallest k with lower(k) > tau_high.
  std::optional<double> p_high;
  if (lower(n) > hi_tau) {
    std::uint64_t bad = 0, good = n;
    while (good - bad > 1) {
      const std::uint64_t mid = bad + (good - bad) / 2;
      if (lower(mid) > hi_tau) good = mid;
      else bad = mid;
    }
    if (std::isfinite(thresholds[good - 1])) p_high = std::max(0.0, thresholds[good - 1]);
  }

  const auto diagnostics = [&] {
    std::ostringstream os;
    os << "used=" << n << " discarded=" << out.discarded << " cap_hits=" << out.cap_hits
       << " tau=(" << lo_tau << ", " << hi_tau << ") low=" << (p_low ? format_double(*p_low) : "none")
       << " high=" << (p_high ? format_double(*p_high) : "none") << " tol=" << tol
       << "; a larger survival depth or more replicates may help";
    return os.str();
  };
  if (!p_high) throw Error(Errc::bracket_failure, "survival never certified positive: " + diagnostics());
  if (!p_low) {
    if (*p_high > tol) throw Error(Errc::bracket_failure, "retention 0 not certified subcritical: " + diagnostics());
    out.status = BracketStatus::always_supercritical;
    p_low = 0.0;
  }
  if (*p_high - *p_low > tol) throw Error(Errc::bracket_failure, "bracket wider than tolerance: " + diagnostics());
  out.low = *p_low;
  out.high = *p_high;
  if (sweeps_mutation_rate(plan.model)) {
    out.low = 1.0 - *p_high;
    out.high = 1.0 - *p_low;
  }
  return out;
}

std::string sample_observable(const ModelInstance& m, const Tree& t, Observable observable, Seed seed) {
  ColoredConfig cc;
  switch (m.model) {
    case Model::bernoulli: {
      cc.edges = percolate(t, m.parameter, seed);
      cc.coloring.values.resize(t.size());
      for (VertexId v = 1; v < t.size(); ++v) {
        cc.coloring.values[v] = cc.edges.open(edge_of(v)) ? cc.coloring.values[t.parent(v)] : v;
      }
      break;
    }
    case Model::dac: {
      const auto colors = m.weights.empty() ? ColorDistribution::uniform(m.d) : ColorDistribution(m.weights);
      cc = dac_color(t, m.parameter, colors, seed, m.root_color);
      break;
    }
    case Model::restricted_dac:
      cc = restricted_dac_color(t, m.parameter, m.d, m.root_color, seed);
      break;
    case Model::infinite_alleles:
      cc = infinite_alleles_color(t, m.parameter, seed);
      break;
    case Model::mdm:
    case Model::mim:
      cc = mutation_color(t, m.model, m.parameter, m.d, m.root_color.value_or(1), seed);
      break;
  }
  return encode_observable(t, m.model, m.d, cc.edges.bits(), cc.coloring.values, observable);
}

ChiSquareResult chi_square_two_sample(const EmpiricalLaw& a, const EmpiricalLaw& b, double level) {
  if (a.kind != b.kind) throw Error(Errc::encoding_mismatch, "cannot compare '" + a.kind + "' with '" + b.kind + "'");
  if (!(level > 0.0 && level < 1.0)) throw Error(Errc::invalid_argument, "level must lie in (0, 1)");
  if (a.total == 0 || b.total == 0) throw Error(Errc::invalid_argument, "empirical law has no draws");
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>, OutcomeLess> joint;
  for (const auto& [o, c] : a.counts) joint[o].first += c;
  for (const auto& [o, c] : b.counts) joint[o].second += c;

  // Pool neighbors until each bin holds at least 10 draws overall.
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> acc{0, 0};
  for (const auto& [o, c] : joint) {
    acc.first += static_cast<double>(c.first);
    acc.second += static_cast<double>(c.second);
    if (acc.first + acc.second >= 10) {
      bins.push_back(acc);
      acc = {0, 0};
    }
  }
  if (acc.first + acc.second > 0) {
    if (bins.empty()) bins.push_back(acc);
    else {
      bins.back().first += acc.first;
      bins.back().second += acc.second;
    }
  }
  ChiSquareResult out;
  if (bins.size() < 2) return out;
  const double n1 = static_cast<double>(a.total), n2 = static_cast<double>(b.total);
  const double s1 = std::sqrt(n2 / n1), s2 = std::sqrt(n1 / n2);
  for (const auto& [x, y] : bins) {
    const double diff = x * s1 - y * s2;
    out.statistic += diff * diff / (x + y);
  }
  out.degrees_of_freedom = bins.size() - 1;
  out.threshold = boost::math::quantile(
      boost::math::chi_squared_distribution<double>(static_cast<double>(out.degrees_of_freedom)), level);
  out.pass = out.statistic <= out.threshold;
  return out;
}

CorrespondenceReport test_correspondence(const ModelInstance& a, const ModelInstance& b, const Tree& t,
                                         Observable observable, std::uint64_t replicates, double level,
                                         Seed seed, std::uint64_t exact_cap) {
  const auto has_colors = [](Model m) { return m != Model::bernoulli && m != Model::infinite_alleles; };
  if (observable == Observable::full) {
    throw Error(Errc::observable_mismatch, "full colorings are not comparable across models");
  }
  if (observable == Observable::child_types && (!has_colors(a.model) || !has_colors(b.model))) {
    throw Error(Errc::observable_mismatch, "child types need finite-color models on both sides");
  }
  if (observable == Observable::child_types && a.d != b.d) {
    throw Error(Errc::observable_mismatch, "child types need the same number of colors on both sides");
  }

  const auto exact_params = [](const ModelInstance& m) {
    ColoringLawParams p;
    if (sweeps_mutation_rate(m.model)) p.r = m.exact_parameter;
    else p.p = m.exact_parameter;
    p.d = m.d;
    p.a = m.exact_weights;
    p.root_color = m.root_color;
    return p;
  };
  CorrespondenceReport report;
  try {
    const ExactLaw la = exact_coloring_law(t, a.model, exact_params(a), observable, 1, exact_cap);
    const ExactLaw lb = exact_coloring_law(t, b.model, exact_params(b), observable, 1, exact_cap);
    const Rational tv = tv_distance(la, lb);
    report.exact = true;
    report.statistic = to_double(tv);
    report.threshold = 0.0;
    report.pass = tv == 0;
    return report;
  } catch (const Error& e) {
    if (e.code() != Errc::too_large) throw;
  }

  if (replicates == 0) throw Error(Errc::invalid_argument, "need at least one replicate");
  EmpiricalLaw ea{std::string(to_string(observable)), {}, 0};
  EmpiricalLaw eb{std::string(to_string(observable)), {}, 0};
  for (std::uint64_t i = 0; i < replicates; ++i) {
    ea.add(sample_observable(a, t, observable, derive_seed(seed, 2 * i)));
    eb.add(sample_observable(b, t, observable, derive_seed(seed, 2 * i + 1)));
  }
  const auto chi = chi_square_two_sample(ea, eb, level);
  report.statistic = chi.statistic;
  report.threshold = chi.threshold;
  report.degrees_of_freedom = chi.degrees_of_freedom;
  report.pass = chi.pass;
  return report;
}

std::string estimates_csv(const std::vector<EstimateRecord>& records) {
  std::ostringstream os;
  os << "parameter,estimate,ci_low,ci_high,half_width,successes,used,discarded,cap_hits,estimate_uncapped\n";
  for (const auto& r : records) {
    os << format_double(r.parameter) << ',' << format_double(r.estimate) << ',' << format_double(r.ci.low) << ','
       << format_double(r.ci.high) << ',' << format_double(r.half_width) << ',' << r.successes << ',' << r.used
       << ',' << r.discarded << ',' << r.cap_hits << ',' << format_double(r.estimate_uncapped) << '\n';
  }
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_failure, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(Errc::io_failure, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_failure, "cannot rename " + tmp.string() + ": " + ec.message());
}

RunSummary run_plan(const ExperimentPlan& plan, const std::filesystem::path& dir) {
  plan.validate();
  std::error_code ec;
  const auto chunk_dir = dir / "chunks";
  std::filesystem::create_directories(chunk_dir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + chunk_dir.string() + ": " + ec.message());

  const std::uint64_t chunks = plan_chunks(plan);
  std::vector<ReplicateOutcome> outcomes(plan.replicates);
  std::atomic<std::uint64_t> computed{0}, resumed{0};
  parallel_for(chunks, plan.workers, [&](std::uint64_t c) {
    char name[32];
    std::snprintf(name, sizeof name, "chunk-%06llu.txt", static_cast<unsigned long long>(c));
    const auto file = chunk_dir / name;
    if (read_chunk(file, plan, c, outcomes)) {
      ++resumed;
      return;
    }
    run_chunk(plan, c, outcomes);
    write_atomic(file, chunk_text(plan, c, outcomes));
    ++computed;
  });

  RunSummary summary;
  summary.records = summarize(plan, outcomes);
  summary.chunks_computed = computed;
  summary.chunks_resumed = resumed;
  summary.outcomes = std::move(outcomes);

  write_atomic(dir / "estimates.csv", estimates_csv(summary.records));
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(plan.hash()));
  nlohmann::ordered_json manifest;
  manifest["planHash"] = hash;
  manifest["masterSeed"] = plan.master_seed;
  manifest["version"] = kVersion;
  manifest["model"] = std::string(to_string(plan.model));
  manifest["replicates"] = plan.replicates;
  manifest["depth"] = plan.depth;
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
  return summary;
}

}  // namespace geneaperc
