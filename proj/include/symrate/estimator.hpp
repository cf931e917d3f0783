#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "symrate/bounds.hpp"
#include "symrate/errors.hpp"
#include "symrate/stream.hpp"
#include "symrate/sync.hpp"

namespace symrate {

inline constexpr std::size_t kAutoLength = std::numeric_limits<std::size_t>::max();

struct EstimatorConfig {
  double epsilon = 0.05;
  double alpha = 0.95;
  /// |D|; 0 selects recommended_sample_size(k).
  std::uint64_t sample_size = 0;
  /// Extension lengths are drawn uniformly from [min, max].
  std::size_t max_extension_length = kAutoLength;
  std::size_t min_extension_length = kAutoLength;
  std::uint64_t n_min = 10;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Longest candidate word for the synchronizing string.
  std::size_t length_cap = 12;
  bool widen = true;
  /// Clustering radius when it should differ from epsilon; 0 groups only
  /// identical derivatives.
  std::optional<double> cluster_epsilon;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw invalid_input("epsilon must lie in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_input("alpha must lie in (0,1)");
    if (cluster_epsilon && !(*cluster_epsilon >= 0.0 && *cluster_epsilon < 1.0))
      throw invalid_input("cluster epsilon must lie in [0,1)");
    if (max_extension_length != kAutoLength && min_extension_length != kAutoLength &&
        min_extension_length > max_extension_length)
      throw invalid_input("minimum extension length exceeds the maximum");
  }

  /// Copy with every automatic field resolved for alphabet size k.
  EstimatorConfig resolved(std::size_t k) const {
    validate();
    EstimatorConfig c = *this;
    if (c.sample_size == 0) c.sample_size = static_cast<std::uint64_t>(std::llround(recommended_sample_size(k)));
    if (c.max_extension_length == kAutoLength)
      c.max_extension_length = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::lround(12.0 / std::log2(static_cast<double>(k)))));
    if (c.min_extension_length == kAutoLength) c.min_extension_length = (c.max_extension_length + 1) / 2;
    if (c.min_extension_length > c.max_extension_length)
      throw invalid_input("minimum extension length exceeds the maximum");
    return c;
  }
};

// ---------------------------------------------------------------------------
// Extension sampling
// ---------------------------------------------------------------------------

/// One distinct extension word and how often it was drawn.
struct ExtensionTally {
  std::size_t length;
  std::uint64_t code;  // base-k, most significant symbol first
  std::uint64_t multiplicity;
};

namespace detail {

inline constexpr std::uint64_t kSampleChunk = std::uint64_t{1} << 16;

inline std::vector<std::uint64_t> powers(std::size_t k, std::size_t max_len) {
  std::vector<std::uint64_t> p(max_len + 1, 1);
  for (std::size_t l = 1; l <= max_len; ++l) {
    if (p[l - 1] > std::numeric_limits<std::uint64_t>::max() / k)
      throw resource_error("extension words of length " + std::to_string(l) + " cannot be indexed");
    p[l] = p[l - 1] * k;
  }
  return p;
}

// Each chunk owns its generator, so the draws do not depend on thread count.
template <class Sink>
void draw_chunk(const EstimatorConfig& cfg, const std::vector<std::uint64_t>& pw, std::uint64_t chunk, Sink&& sink) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<std::size_t> len(cfg.min_extension_length, cfg.max_extension_length);
  const std::uint64_t first = chunk * kSampleChunk;
  const std::uint64_t last = std::min(cfg.sample_size, first + kSampleChunk);
  for (std::uint64_t i = first; i < last; ++i) {
    const std::size_t l = len(rng);
    const std::uint64_t code = l == 0 ? 0 : std::uniform_int_distribution<std::uint64_t>(0, pw[l] - 1)(rng);
    sink(l, code);
  }
}

}  // namespace detail

/// Draws |D| extension words: length uniform on [min, max], then every
/// symbol uniform. Returns distinct words with multiplicities, ordered by
/// (length, code).
inline std::vector<ExtensionTally> tally_extensions(const EstimatorConfig& config, std::size_t k) {
  const auto cfg = config.resolved(k);
  const auto pw = detail::powers(k, cfg.max_extension_length);
  // Key words of different lengths apart: offset[l] = sum of k^j for j < l.
  std::vector<std::uint64_t> offset(cfg.max_extension_length + 2, 0);
  for (std::size_t l = 1; l < offset.size(); ++l) {
    if (offset[l - 1] > std::numeric_limits<std::uint64_t>::max() - pw[l - 1])
      throw resource_error("extension words are too long to index");
    offset[l] = offset[l - 1] + pw[l - 1];
  }

  const std::uint64_t chunks = (cfg.sample_size + detail::kSampleChunk - 1) / detail::kSampleChunk;
  const unsigned workers = static_cast<unsigned>(std::clamp<std::uint64_t>(cfg.threads, 1, std::max<std::uint64_t>(chunks, 1)));
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> local(workers);
  auto work = [&](unsigned w) {
    for (std::uint64_t c = w; c < chunks; c += workers)
      detail::draw_chunk(cfg, pw, c, [&](std::size_t l, std::uint64_t code) { ++local[w][offset[l] + code]; });
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  std::map<std::uint64_t, std::uint64_t> merged;
  for (const auto& m : local)
    for (const auto& [key, n] : m) merged[key] += n;

  std::vector<ExtensionTally> out;
  out.reserve(merged.size());
  std::size_t l = 0;
  for (const auto& [key, n] : merged) {
    while (key >= offset[l + 1]) ++l;
    out.push_back({l, key - offset[l], n});
  }
  return out;
}

/// The raw sample D in draw order.
inline std::vector<Word> sample_extensions(const EstimatorConfig& config, std::size_t k) {
  const auto cfg = config.resolved(k);
  if (cfg.sample_size == 0) throw invalid_input("sample size must be at least 1");
  const auto pw = detail::powers(k, cfg.max_extension_length);
  std::vector<Word> out;
  out.reserve(cfg.sample_size);
  const std::uint64_t chunks = (cfg.sample_size + detail::kSampleChunk - 1) / detail::kSampleChunk;
  for (std::uint64_t c = 0; c < chunks; ++c)
    detail::draw_chunk(cfg, pw, c, [&](std::size_t l, std::uint64_t code) {
      Word w(l);
      for (std::size_t i = l; i-- > 0;) {
        w[i] = static_cast<Symbol>(code % k);
        code /= k;
      }
      out.push_back(std::move(w));
    });
  return out;
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

struct Cluster {
  Distribution representative;
  std::uint64_t count = 0;
  double weight = 0.0;
  std::vector<double> weighted_sum;

  /// Weight-averaged member distribution.
  Distribution centroid() const {
    std::vector<double> p(weighted_sum);
    double total = 0.0;
    for (double v : p) total += v;
    for (double& v : p) v /= total;
    return Distribution(std::move(p));
  }
};

/// Greedy first-fit table keyed by distributions: a point joins the first
/// cluster whose representative is within ε (sup norm), else founds one.
class ClusterTable {
 public:
  explicit ClusterTable(double epsilon) : epsilon_(epsilon) {}

  void add(const Distribution& u, std::uint64_t multiplicity = 1, double weight = 1.0) {
    if (multiplicity == 0) return;
    auto it = std::find_if(clusters_.begin(), clusters_.end(),
                           [&](const Cluster& c) { return linf_distance(c.representative, u) <= epsilon_; });
    if (it == clusters_.end()) {
      clusters_.push_back({u, 0, 0.0, std::vector<double>(u.size(), 0.0)});
      it = std::prev(clusters_.end());
    }
    it->count += multiplicity;
    it->weight += weight;
    for (std::size_t i = 0; i < u.size(); ++i) it->weighted_sum[i] += weight * u[i];
    total_ += multiplicity;
    total_weight_ += weight;
  }

  const std::vector<Cluster>& clusters() const noexcept { return clusters_; }
  std::uint64_t total() const noexcept { return total_; }
  double total_weight() const noexcept { return total_weight_; }
  double epsilon() const noexcept { return epsilon_; }

  /// Σ (W_v / W) H(centroid_v).
  double entropy_rate() const {
    if (total_weight_ <= 0.0) return 0.0;
    double h = 0.0;
    for (const auto& c : clusters_) h += (c.weight / total_weight_) * entropy(c.centroid());
    return h;
  }

 private:
  double epsilon_;
  std::vector<Cluster> clusters_;
  std::uint64_t total_ = 0;
  double total_weight_ = 0.0;
};

// ---------------------------------------------------------------------------
// Estimate
// ---------------------------------------------------------------------------

struct EstimateReport {
  double h = 0.0;
  double E = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double epsilon_star = 0.0;
  bool vacuous = false;
  Word x0;
  double p0 = 0.0;
  std::uint64_t samples_used = 0;
  std::uint64_t samples_discarded = 0;
  std::uint64_t stream_length = 0;
  std::size_t clusters = 0;
  std::size_t min_extension_length = 0;
  std::size_t max_extension_length = 0;
};

/// Entropy rate from the derivatives at x0 x over the sampled extensions x.
///
/// Each distinct extension of length l contributes with weight
/// mult · #(x0 x)/#(x0) · k^l, which turns the uniform draw over words of
/// length l into the empirical frequency of x after x0. Extensions with
/// #(x0 x) <= n_min are discarded.
inline EstimateReport estimate(const SymbolStream& s, const SyncResult& sync, const EstimatorConfig& config,
                               const CountTable& t) {
  const std::size_t k = s.alphabet().size();
  if (t.alphabet_size() != k || t.stream_length() != s.size())
    throw invalid_input("count table was not built from this stream");
  const auto cfg = config.resolved(k);
  if (t.max_query_length() < sync.x0.size() + cfg.max_extension_length + 1)
    throw invalid_input("count table does not cover |x0| + max extension length + 1 = " +
                        std::to_string(sync.x0.size() + cfg.max_extension_length + 1));

  const auto pw = detail::powers(k, cfg.max_extension_length + 1);
  const std::uint64_t x0_code = t.encode(sync.x0);
  const double x0_count = static_cast<double>(t.count(sync.x0));

  struct Item {
    std::uint64_t support;
    std::size_t length;
    std::uint64_t code;
    std::uint64_t multiplicity;
    Distribution derivative;
  };
  std::vector<Item> items;
  EstimateReport r;
  for (const auto& x : tally_extensions(cfg, k)) {
    const std::size_t len = sync.x0.size() + x.length;
    const std::uint64_t code = x0_code * pw[x.length] + x.code;
    const std::uint64_t support = t.count_code(len, code);
    if (support <= cfg.n_min) {
      r.samples_discarded += x.multiplicity;
      continue;
    }
    std::vector<std::uint64_t> succ(k);
    for (std::size_t a = 0; a < k; ++a) succ[a] = t.count_code(len + 1, code * k + a);
    auto d = Distribution::from_counts(std::span<const std::uint64_t>(succ));
    if (!d) {  // only possible when x0 x ends the stream
      r.samples_discarded += x.multiplicity;
      continue;
    }
    items.push_back({support, x.length, x.code, x.multiplicity, std::move(*d)});
  }
  if (items.empty())
    throw insufficient_data("every sampled extension of x0 occurs at most n_min = " + std::to_string(cfg.n_min) +
                            " times (extension lengths " + std::to_string(cfg.min_extension_length) + ".." +
                            std::to_string(cfg.max_extension_length) + "); use a longer stream, a smaller n_min "
                            "or shorter extensions");

  // Canonical order: frequent contexts found clusters first.
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.support != b.support) return a.support > b.support;
    if (a.length != b.length) return a.length < b.length;
    return a.code < b.code;
  });

  ClusterTable table(cfg.cluster_epsilon.value_or(cfg.epsilon));
  for (const auto& it : items) {
    const double w = static_cast<double>(it.multiplicity) * (static_cast<double>(it.support) / x0_count) *
                     static_cast<double>(pw[it.length]);
    table.add(it.derivative, it.multiplicity, w);
    r.samples_used += it.multiplicity;
  }

  r.h = std::clamp(table.entropy_rate(), 0.0, std::log2(static_cast<double>(k)));
  r.alpha = cfg.alpha;
  r.epsilon = cfg.epsilon;
  r.x0 = sync.x0;
  r.p0 = sync.p0;
  r.stream_length = s.size();
  r.clusters = table.clusters().size();
  r.min_extension_length = cfg.min_extension_length;
  r.max_extension_length = cfg.max_extension_length;
  const auto b = solve_uncertainty(static_cast<double>(s.size()), k, cfg.alpha, static_cast<double>(r.samples_used),
                                   sync.p0);
  r.E = b.E;
  r.epsilon_star = b.epsilon_star;
  r.vacuous = b.vacuous;
  return r;
}

/// Counting, synchronizing-string search and estimation in one call.
inline EstimateReport estimate_entropy_rate(const SymbolStream& s, const EstimatorConfig& config,
                                            SyncResult* sync_out = nullptr) {
  if (s.empty()) throw insufficient_data("stream is empty");
  const std::size_t k = s.alphabet().size();
  const auto cfg = config.resolved(k);
  const auto cand = candidate_length(cfg.epsilon, k, cfg.length_cap);
  const auto t = build_count_table(s, cand + cfg.max_extension_length, cfg.threads);
  const auto sync = find_sync_string(t, SyncOptions{cfg.epsilon, cfg.alpha, cfg.n_min, cfg.length_cap, cfg.widen});
  if (sync_out) *sync_out = sync;
  return estimate(s, sync, cfg, t);
}

}  // namespace symrate
