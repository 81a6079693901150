#include "geneaperc/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "geneaperc/error.hpp"
#include "json.hpp"

namespace geneaperc {

namespace {

using boost::multiprecision::cpp_int;

cpp_int parse_digits(std::string_view s) {
  cpp_int out = 0;
  for (char c : s) out = out * 10 + (c - '0');
  return out;
}

cpp_int pow10(unsigned n) {
  cpp_int out = 1;
  for (unsigned i = 0; i < n; ++i) out *= 10;
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Rational power(const Rational& base, unsigned e) {
  Rational out = 1;
  for (unsigned i = 0; i < e; ++i) out *= base;
  return out;
}

std::string join(const std::vector<std::uint32_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration engine
//
// A configuration's probability is a monomial in a few atoms: p, 1 - p and
// the color factors. Each leaf of the search tallies the exponent vector
// (packed into 6-bit fields) under its observable, and the rational value
// of each monomial is computed once at the end.

constexpr unsigned kField = 6;

struct Tally {
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::string> names;
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> counts;

  void add(std::string outcome, std::uint64_t key, std::uint64_t n = 1) {
    auto [it, fresh] = index.try_emplace(std::move(outcome), static_cast<std::uint32_t>(names.size()));
    if (fresh) {
      names.push_back(it->first);
      counts.emplace_back();
    }
    counts[it->second][key] += n;
  }

  void merge(const Tally& other) {
    for (std::size_t i = 0; i < other.names.size(); ++i) {
      for (const auto& [key, n] : other.counts[i]) add(other.names[i], key, n);
    }
  }
};

struct State {
  std::vector<std::uint8_t> open;
  std::vector<Color> col;
  std::uint64_t key = 0;
  Color next_allele = 1;
};

class Enumerator {
 public:
  Enumerator(const Tree& t, Model model, std::uint32_t d, std::vector<std::uint8_t> color_allowed,
             std::optional<Color> root_color, bool allow_open, bool allow_closed, Observable obs)
      : t_(t), model_(model), d_(d), color_allowed_(std::move(color_allowed)), root_color_(root_color),
        allow_open_(allow_open), allow_closed_(allow_closed), obs_(obs) {}

  std::vector<State> root_states() const {
    State s;
    s.open.assign(t_.edge_count(), 0);
    s.col.assign(t_.size(), 0);
    std::vector<State> out;
    switch (model_) {
      case Model::bernoulli:
      case Model::infinite_alleles:
        out.push_back(s);
        break;
      case Model::dac:
        if (root_color_) {
          s.col[0] = *root_color_;
          out.push_back(s);
          break;
        }
        for (Color c = 1; c <= d_; ++c) {
          if (!color_allowed_[c - 1]) continue;
          s.col[0] = c;
          s.key = unit(c - 1);
          out.push_back(s);
        }
        break;
      case Model::restricted_dac:
      case Model::mdm:
      case Model::mim:
        if (root_color_) {
          s.col[0] = *root_color_;
          out.push_back(s);
        } else {
          for (Color c = 1; c <= d_; ++c) {
            s.col[0] = c;
            s.key = unit(d_ + 1);
            out.push_back(s);
          }
        }
        break;
    }
    return out;
  }

  // Extends `s` over vertices v..stop-1 and hands each completed prefix to sink.
  template <class Sink>
  void walk(State& s, VertexId v, VertexId stop, Sink& sink) const {
    if (v == stop) {
      sink(s);
      return;
    }
    const EdgeIndex e = edge_of(v);
    const Color mother = s.col[t_.parent(v)];
    if (allow_open_) {
      s.open[e] = 1;
      s.col[v] = mother;
      s.key += 1;
      walk(s, v + 1, stop, sink);
      s.key -= 1;
      s.open[e] = 0;
    }
    if (!allow_closed_) return;
    switch (model_) {
      case Model::bernoulli:
        s.col[v] = v;
        walk(s, v + 1, stop, sink);
        break;
      case Model::infinite_alleles:
        s.col[v] = s.next_allele++;
        walk(s, v + 1, stop, sink);
        --s.next_allele;
        break;
      case Model::dac:
        for (Color c = 1; c <= d_; ++c) {
          if (!color_allowed_[c - 1]) continue;
          branch(s, v, stop, sink, c, c - 1);
        }
        break;
      case Model::restricted_dac:
      case Model::mdm:
        for (Color c = 1; c <= d_; ++c) {
          if (c != mother) branch(s, v, stop, sink, c, d_);
        }
        break;
      case Model::mim:
        for (Color c = 1; c <= d_; ++c) branch(s, v, stop, sink, c, d_ + 1);
        break;
    }
  }

  std::string observe(const State& s) const {
    return encode_observable(t_, model_, d_, s.open, s.col, obs_);
  }

 private:
  static std::uint64_t unit(unsigned atom) { return std::uint64_t{1} << (kField * (atom + 1)); }

  template <class Sink>
  void branch(State& s, VertexId v, VertexId stop, Sink& sink, Color c, unsigned atom) const {
    s.col[v] = c;
    s.key += unit(atom);
    walk(s, v + 1, stop, sink);
    s.key -= unit(atom);
  }

  const Tree& t_;
  Model model_;
  std::uint32_t d_;
  std::vector<std::uint8_t> color_allowed_;
  std::optional<Color> root_color_;
  bool allow_open_;
  bool allow_closed_;
  Observable obs_;
};

}  // namespace

std::string encode_observable(const Tree& t, Model model, std::uint32_t d,
                              std::span<const std::uint8_t> open, std::span<const Color> col,
                              Observable observable) {
  const auto root_mask = [&] {
    std::vector<std::uint8_t> in(t.size(), 0);
    in[0] = 1;
    for (VertexId v = 1; v < t.size(); ++v) in[v] = in[t.parent(v)] && col[v] == col[0];
    return in;
  };
  switch (observable) {
    case Observable::full: {
      if (model == Model::bernoulli) {
        std::string bits(open.size(), '0');
        for (std::size_t e = 0; e < bits.size(); ++e) bits[e] = open[e] ? '1' : '0';
        return bits;
      }
      return join(std::vector<std::uint32_t>(col.begin(), col.end()));
    }
    case Observable::root_component_size: {
      std::uint32_t n = 0;
      for (auto in : root_mask()) n += in;
      return std::to_string(n);
    }
    case Observable::root_component_shape: {
      const auto in = root_mask();
      std::vector<std::uint32_t> counts;
      for (VertexId v = 0; v < t.size(); ++v) {
        if (!in[v]) continue;
        std::uint32_t k = 0;
        for (VertexId c : t.children(v)) k += in[c];
        counts.push_back(k);
      }
      return join(counts);
    }
    case Observable::partition: {
      std::unordered_map<Color, std::uint32_t> first;
      std::vector<std::uint32_t> blocks(t.size());
      for (VertexId v = 0; v < t.size(); ++v) {
        blocks[v] = first.try_emplace(col[v], static_cast<std::uint32_t>(first.size())).first->second;
      }
      return join(blocks);
    }
    case Observable::child_types: {
      if (model == Model::bernoulli || model == Model::infinite_alleles) {
        throw Error(Errc::observable_mismatch, "child types need a finite-color model");
      }
      std::vector<std::uint32_t> counts(d, 0);
      for (VertexId c : t.children(0)) ++counts[col[c] - 1];
      return join(counts);
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Rationals

Rational parse_rational(std::string_view text) {
  const auto fail = [&]() -> Rational {
    throw Error(Errc::parse_error, "not a rational number: '" + std::string(text) + "'");
  };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return fail();

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(s.substr(0, slash));
    const Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) return fail();
    return num / den;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (const auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view ex = s.substr(epos + 1);
    bool ex_negative = false;
    if (!ex.empty() && (ex.front() == '+' || ex.front() == '-')) {
      ex_negative = ex.front() == '-';
      ex.remove_prefix(1);
    }
    if (!all_digits(ex) || ex.size() > 6) return fail();
    exponent = std::stol(std::string(ex));
    if (ex_negative) exponent = -exponent;
    s = s.substr(0, epos);
  }
  std::string_view whole = s, frac;
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    whole = s.substr(0, dot);
    frac = s.substr(dot + 1);
  }
  if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
      (!frac.empty() && !all_digits(frac))) {
    return fail();
  }
  cpp_int num = parse_digits(std::string(whole) + std::string(frac));
  long scale = static_cast<long>(frac.size()) - exponent;
  Rational out = scale >= 0 ? Rational(num, pow10(static_cast<unsigned>(scale)))
                            : Rational(num * pow10(static_cast<unsigned>(-scale)));
  if (negative) out = -out;
  return out;
}

Rational to_rational(double x) {
  if (!std::isfinite(x)) throw Error(Errc::invalid_argument, "cannot convert a non-finite value");
  constexpr std::int64_t kMaxDen = 1'000'000'000'000;
  const double target = std::abs(x);
  long double rest = target;
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int i = 0; i < 64; ++i) {
    const long double a = std::floor(rest);
    if (a > 1e15L) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h2 = ai * h1 + h0;
    const std::int64_t k2 = ai * k1 + k0;
    if (k2 > kMaxDen) break;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const long double approx = static_cast<long double>(h1) / static_cast<long double>(k1);
    if (std::abs(approx - static_cast<long double>(target)) <= 1e-15L * std::max(1.0L, static_cast<long double>(target))) {
      Rational q{cpp_int(h1), cpp_int(k1)};
      if (x < 0) q = -q;
      return q;
    }
    const long double frac = rest - a;
    if (frac <= 0) break;
    rest = 1.0L / frac;
  }
  int exp = 0;
  const double mant = std::frexp(x, &exp);
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational q(scaled);
  if (exp >= 0) q *= Rational(cpp_int(1) << exp);
  else q /= Rational(cpp_int(1) << -exp);
  return q;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_decimal(const Rational& q, unsigned digits) {
  cpp_int num = boost::multiprecision::numerator(q);
  const cpp_int den = boost::multiprecision::denominator(q);
  std::string out;
  if (num < 0) {
    out += '-';
    num = -num;
  }
  cpp_int whole = num / den;
  cpp_int rem = num % den;
  out += whole.str();
  if (rem == 0) return out;
  out += '.';
  for (unsigned i = 0; i < digits && rem != 0; ++i) {
    rem *= 10;
    out += static_cast<char>('0' + static_cast<int>(rem / den));
    rem %= den;
  }
  return out;
}

bool OutcomeLess::operator()(std::string_view a, std::string_view b) const {
  const auto digit = [](char c) { return c >= '0' && c <= '9'; };
  // Skip the common prefix, backing up to the start of a digit run.
  std::size_t i = 0;
  const std::size_t common = std::min(a.size(), b.size());
  while (i < common && a[i] == b[i]) ++i;
  if (i == a.size() && i == b.size()) return false;
  while (i > 0 && digit(a[i - 1])) --i;
  std::size_t j = i;
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::size_t is = i, js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      if (ie - is != je - js) return ie - is < je - js;
      const int c = std::char_traits<char>::compare(a.data() + is, b.data() + js, ie - is);
      if (c != 0) return c < 0;
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

// ---------------------------------------------------------------------------
// ExactLaw

void ExactLaw::add(const std::string& outcome, const Rational& mass) {
  if (mass == 0) return;
  // Outcomes usually arrive in order; append without a search then.
  if (probs_.empty() || OutcomeLess{}(probs_.rbegin()->first, outcome)) {
    probs_.emplace_hint(probs_.end(), outcome, mass);
    return;
  }
  auto [it, fresh] = probs_.try_emplace(outcome, mass);
  if (!fresh) {
    it->second += mass;
    if (it->second == 0) probs_.erase(it);
  }
}

Rational ExactLaw::probability(std::string_view outcome) const {
  const auto it = probs_.find(outcome);
  return it == probs_.end() ? Rational(0) : it->second;
}

Rational ExactLaw::total() const {
  Rational sum = 0;
  for (const auto& [o, q] : probs_) sum += q;
  return sum;
}

std::string ExactLaw::to_csv() const {
  std::ostringstream os;
  os << "outcome,numerator,denominator\n";
  for (const auto& [o, q] : probs_) {
    os << '"' << o << "\"," << boost::multiprecision::numerator(q) << ','
       << boost::multiprecision::denominator(q) << '\n';
  }
  return os.str();
}

std::string ExactLaw::to_json() const {
  nlohmann::ordered_json out;
  out["kind"] = kind_;
  auto& rows = out["outcomes"] = nlohmann::ordered_json::array();
  for (const auto& [o, q] : probs_) rows.push_back({{"outcome", o}, {"probability", to_decimal(q)}});
  return out.dump(2);
}

Rational tv_distance(const ExactLaw& lhs, const ExactLaw& rhs) {
  if (lhs.kind() != rhs.kind()) {
    throw Error(Errc::encoding_mismatch, "cannot compare '" + lhs.kind() + "' with '" + rhs.kind() + "'");
  }
  Rational sum = 0;
  for (const auto& [o, q] : lhs.outcomes()) sum += abs(q - rhs.probability(o));
  for (const auto& [o, q] : rhs.outcomes()) {
    if (!lhs.outcomes().contains(o)) sum += q;
  }
  return sum / 2;
}

double tv_distance(const ExactLaw& lhs, const EmpiricalLaw& rhs) {
  if (lhs.kind() != rhs.kind) {
    throw Error(Errc::encoding_mismatch, "cannot compare '" + lhs.kind() + "' with '" + rhs.kind + "'");
  }
  if (rhs.total == 0) throw Error(Errc::invalid_argument, "empirical law has no draws");
  const double n = static_cast<double>(rhs.total);
  double sum = 0.0;
  for (const auto& [o, q] : lhs.outcomes()) {
    const auto it = rhs.counts.find(o);
    const double f = it == rhs.counts.end() ? 0.0 : static_cast<double>(it->second) / n;
    sum += std::abs(to_double(q) - f);
  }
  for (const auto& [o, c] : rhs.counts) {
    if (!lhs.outcomes().contains(o)) sum += static_cast<double>(c) / n;
  }
  return sum / 2.0;
}

double tv_distance(const EmpiricalLaw& lhs, const EmpiricalLaw& rhs) {
  if (lhs.kind != rhs.kind) {
    throw Error(Errc::encoding_mismatch, "cannot compare '" + lhs.kind + "' with '" + rhs.kind + "'");
  }
  if (lhs.total == 0 || rhs.total == 0) throw Error(Errc::invalid_argument, "empirical law has no draws");
  const double n = static_cast<double>(lhs.total), m = static_cast<double>(rhs.total);
  double sum = 0.0;
  for (const auto& [o, c] : lhs.counts) {
    const auto it = rhs.counts.find(o);
    sum += std::abs(static_cast<double>(c) / n - (it == rhs.counts.end() ? 0.0 : static_cast<double>(it->second) / m));
  }
  for (const auto& [o, c] : rhs.counts) {
    if (!lhs.counts.contains(o)) sum += static_cast<double>(c) / m;
  }
  return sum / 2.0;
}

double tv_threshold(std::size_t support, std::uint64_t n, double alpha) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::invalid_argument, "need n > 0 and alpha in (0, 1)");
  const double k = static_cast<double>(std::max<std::size_t>(support, 1));
  return 0.5 * std::sqrt(2.0 * (k * std::log(2.0) + std::log(1.0 / alpha)) / static_cast<double>(n));
}

std::string_view to_string(Observable o) noexcept {
  switch (o) {
    case Observable::full: return "full";
    case Observable::root_component_size: return "root-component-size";
    case Observable::root_component_shape: return "root-component-shape";
    case Observable::partition: return "partition";
    case Observable::child_types: return "child-types";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Exact laws

ExactLaw exact_coloring_law(const Tree& t, Model model, const ColoringLawParams& params,
                            Observable observable, unsigned workers, std::uint64_t max_outcomes) {
  const bool colored = model != Model::bernoulli && model != Model::infinite_alleles;
  const bool mutation = model == Model::infinite_alleles || model == Model::mdm || model == Model::mim;
  const Rational open_mass = mutation ? Rational(1 - params.r) : params.p;
  if (open_mass < 0 || open_mass > 1) throw Error(Errc::invalid_argument, "parameter must lie in [0, 1]");
  const std::uint32_t d = colored ? params.d : 1;
  if (colored && (d < 1 || d > 8)) throw Error(Errc::too_large, "exact coloring laws support 1 <= d <= 8");
  if (colored && model != Model::dac && d < 2) throw Error(Errc::invalid_argument, "model needs d >= 2");
  if (observable == Observable::child_types && !colored) {
    throw Error(Errc::observable_mismatch, "child types need a finite-color model");
  }
  if (t.size() >= (1U << kField)) throw Error(Errc::too_large, "exact laws support at most 63 vertices");
  if (params.root_color && (*params.root_color < 1 || *params.root_color > d)) {
    throw Error(Errc::type_out_of_range, "root color out of range");
  }

  std::vector<Rational> weights = params.a;
  if (model == Model::dac) {
    if (weights.empty()) weights.assign(d, Rational(1, d));
    if (weights.size() != d) throw Error(Errc::invalid_vector, "color law needs d entries");
    Rational sum = 0;
    for (const auto& w : weights) {
      if (w < 0) throw Error(Errc::invalid_argument, "color weights must be nonnegative");
      sum += w;
    }
    if (sum != 1) throw Error(Errc::invalid_argument, "color weights must sum to 1");
  }
  std::vector<std::uint8_t> allowed(d, 1);
  for (std::uint32_t c = 0; c < weights.size(); ++c) allowed[c] = weights[c] != 0;

  const bool allow_open = open_mass != 0;
  const bool allow_closed = open_mass != 1;
  double leaves = colored ? static_cast<double>(d) : 1.0;
  const double per_edge = (allow_open ? 1.0 : 0.0) + (allow_closed ? (colored ? d : 1.0) : 0.0);
  for (std::size_t e = 0; e < t.edge_count(); ++e) leaves *= per_edge;
  if (leaves > static_cast<double>(max_outcomes)) {
    throw Error(Errc::too_large, "enumeration would visit about " + std::to_string(static_cast<std::uint64_t>(leaves)) +
                                     " configurations, cap is " + std::to_string(max_outcomes));
  }

  const Enumerator en(t, model, d, allowed, params.root_color, allow_open,
                      allow_closed, observable);
  const auto n = static_cast<VertexId>(t.size());
  workers = std::max(1U, workers);

  // Split into prefix tasks: states after the first `stop - 1` edges.
  std::vector<State> tasks = en.root_states();
  VertexId stop = 1;
  while (workers > 1 && stop < n && tasks.size() < 8 * workers) {
    std::vector<State> next;
    auto collect = [&](const State& s) { next.push_back(s); };
    for (auto& s : tasks) en.walk(s, stop, stop + 1, collect);
    tasks = std::move(next);
    ++stop;
  }

  std::vector<Tally> tallies(workers);
  auto run = [&](unsigned w) {
    Tally& tally = tallies[w];
    auto leaf = [&](const State& s) { tally.add(en.observe(s), s.key); };
    for (std::size_t i = w; i < tasks.size(); i += workers) {
      State s = tasks[i];
      en.walk(s, stop, n, leaf);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }
  Tally total;
  for (const auto& tally : tallies) total.merge(tally);

  // Atom values: index 0 = p, then a_1..a_d, 1/(d-1), 1/d.
  std::vector<Rational> atoms;
  for (std::uint32_t c = 0; c < d; ++c) atoms.push_back(c < weights.size() ? weights[c] : Rational(0));
  atoms.push_back(d > 1 ? Rational(1, d - 1) : Rational(1));
  atoms.push_back(Rational(1, d));
  const std::size_t edges = t.edge_count();
  std::vector<Rational> p_pow(edges + 1), q_pow(edges + 1);
  for (std::size_t k = 0; k <= edges; ++k) {
    p_pow[k] = power(open_mass, static_cast<unsigned>(k));
    q_pow[k] = power(1 - open_mass, static_cast<unsigned>(k));
  }

  // Only the full coloring is model-specific; the other encodings can be
  // compared across models.
  std::string kind(to_string(observable));
  if (observable == Observable::full) kind = std::string(to_string(model)) + ":" + kind;
  ExactLaw law(kind);
  std::vector<std::size_t> order(total.names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return OutcomeLess{}(total.names[a], total.names[b]); });
  constexpr std::uint64_t mask = (std::uint64_t{1} << kField) - 1;
  std::unordered_map<std::uint64_t, Rational> monomials;
  const auto monomial = [&](std::uint64_t key) -> const Rational& {
    auto [it, fresh] = monomials.try_emplace(key);
    if (fresh) {
      const auto k = static_cast<std::size_t>(key & mask);
      Rational term = p_pow[k] * q_pow[edges - k];
      for (std::size_t atom = 0; atom < atoms.size(); ++atom) {
        const auto e = static_cast<unsigned>((key >> (kField * (atom + 1))) & mask);
        if (e) term *= power(atoms[atom], e);
      }
      it->second = std::move(term);
    }
    return it->second;
  };
  for (std::size_t i : order) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> terms(total.counts[i].begin(), total.counts[i].end());
    std::sort(terms.begin(), terms.end());
    Rational mass = 0;
    for (const auto& [key, count] : terms) mass += monomial(key) * count;
    law.add(total.names[i], mass);
  }
  return law;
}

ExactLaw exact_root_cluster_law(const Tree& t, const Rational& p, unsigned workers) {
  if (t.edge_count() > 25) throw Error(Errc::too_large, "exact root-cluster law is capped at 25 edges");
  ColoringLawParams params;
  params.p = p;
  return exact_coloring_law(t, Model::bernoulli, params, Observable::root_component_size, workers);
}

ExactLaw exact_root_cluster_shape_law(const Tree& t, const Rational& p, unsigned workers) {
  if (t.edge_count() > 25) throw Error(Errc::too_large, "exact root-cluster law is capped at 25 edges");
  ColoringLawParams params;
  params.p = p;
  return exact_coloring_law(t, Model::bernoulli, params, Observable::root_component_shape, workers);
}

RationalPmf rational_pmf(const OffspringLaw& law) {
  const auto top = law.max_support();
  if (!top) throw Error(Errc::too_large, "exact laws need an offspring law of bounded support");
  RationalPmf out;
  for (std::uint32_t k = 0; k <= *top; ++k) out.push_back(to_rational(law.pmf(k)));
  Rational sum = 0;
  for (const auto& q : out) sum += q;
  if (sum != 1) {
    // Snapping left a residue; put it on the largest atom.
    const auto it = std::max_element(out.begin(), out.end());
    *it += 1 - sum;
  }
  return out;
}

RationalPmf binomial_pmf(std::uint32_t n, const Rational& p) {
  if (p < 0 || p > 1) throw Error(Errc::invalid_argument, "binomial p must lie in [0, 1]");
  RationalPmf out(n + 1);
  cpp_int c = 1;
  for (std::uint32_t k = 0; k <= n; ++k) {
    out[k] = Rational(c) * power(p, k) * power(1 - p, n - k);
    c = c * (n - k) / (k + 1);
  }
  return out;
}

ExactLaw exact_bgw_truncated_law(const RationalPmf& pmf, const TruncationSpec& spec) {
  Rational sum = 0;
  for (const auto& q : pmf) {
    if (q < 0) throw Error(Errc::invalid_argument, "negative probability");
    sum += q;
  }
  if (sum != 1) throw Error(Errc::invalid_argument, "offspring pmf must sum to 1");
  std::uint32_t top = 0;
  for (std::uint32_t k = 0; k < pmf.size(); ++k) {
    if (pmf[k] != 0) top = k;
  }
  if (top > spec.max_children) {
    throw Error(Errc::too_large, "offspring support exceeds " + std::to_string(spec.max_children));
  }

  std::vector<std::pair<std::string, Rational>> level{{"0", Rational(1)}};
  for (std::uint32_t depth = 1; depth <= spec.max_depth; ++depth) {
    double predicted = 0.0;
    for (std::uint32_t k = 0; k <= top; ++k) {
      if (pmf[k] != 0) predicted += std::pow(static_cast<double>(level.size()), k);
    }
    if (predicted > static_cast<double>(spec.max_outcomes)) {
      throw Error(Errc::too_large, "truncated shape law would have about " +
                                       std::to_string(static_cast<std::uint64_t>(predicted)) + " outcomes");
    }
    std::map<std::string, Rational, OutcomeLess> next;
    for (std::uint32_t k = 0; k <= top; ++k) {
      if (pmf[k] == 0) continue;
      std::vector<std::size_t> pick(k, 0);
      while (true) {
        std::string shape = std::to_string(k);
        Rational mass = pmf[k];
        for (std::size_t idx : pick) {
          shape += ',';
          shape += level[idx].first;
          mass *= level[idx].second;
        }
        next[shape] += mass;
        std::size_t pos = 0;
        while (pos < k && ++pick[pos] == level.size()) pick[pos++] = 0;
        if (pos == k) break;
      }
    }
    level.assign(next.begin(), next.end());
  }
  ExactLaw law(std::string(to_string(Observable::root_component_shape)));
  for (const auto& [shape, q] : level) law.add(shape, q);
  return law;
}

double truncated_survival_probability(const OffspringLaw& law, double p, std::uint32_t generations) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "retention must lie in [0, 1]");
  double s = 0.0;
  for (std::uint32_t i = 0; i < generations; ++i) s = law.pgf(1.0 - p + p * s);
  return 1.0 - s;
}

}  // namespace geneaperc
