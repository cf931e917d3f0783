#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "symrate/errors.hpp"

namespace symrate {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

/// Ordered set of k >= 2 distinct symbol labels; a symbol is its index.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2)
      throw invalid_input("alphabet needs at least two symbols");
    if (labels_.size() > 256)
      throw invalid_input("alphabet is limited to 256 symbols");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty()) throw invalid_input("alphabet labels must be non-empty");
      auto [it, inserted] = index_.emplace(labels_[i], static_cast<Symbol>(i));
      if (!inserted) throw invalid_input("duplicate alphabet label '" + labels_[i] + "'");
    }
  }

  /// Labels "0", "1", ..., "k-1".
  static Alphabet of_size(std::size_t k) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < k; ++i) labels.push_back(std::to_string(i));
    return Alphabet(std::move(labels));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& label(Symbol s) const { return labels_.at(s); }

  std::optional<Symbol> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Symbol at(std::string_view label) const {
    auto s = find(label);
    if (!s) throw invalid_input("symbol '" + std::string(label) + "' is not in the alphabet");
    return *s;
  }

  bool single_char_labels() const noexcept {
    return std::all_of(labels_.begin(), labels_.end(), [](const auto& l) { return l.size() == 1; });
  }

  /// Parses a word: one character per symbol when every label is a single
  /// character, otherwise whitespace-separated labels.
  Word parse_word(std::string_view text) const {
    Word out;
    if (single_char_labels()) {
      for (char c : text) out.push_back(at(std::string_view(&c, 1)));
      return out;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      std::size_t end = pos;
      while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
      if (end > pos) out.push_back(at(text.substr(pos, end - pos)));
      pos = end;
    }
    return out;
  }

  /// Inverse of parse_word. The empty word formats as "" (see display()).
  std::string format(std::span<const Symbol> word) const {
    std::string out;
    const bool compact = single_char_labels();
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (!compact && i > 0) out.push_back(' ');
      out += label(word[i]);
    }
    return out;
  }

  /// Like format(), but renders the empty word as "λ".
  std::string display(std::span<const Symbol> word) const {
    return word.empty() ? std::string("λ") : format(word);
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Symbol> index_;
};

// ---------------------------------------------------------------------------
// SymbolStream
// ---------------------------------------------------------------------------

/// Immutable finite sequence over an alphabet.
class SymbolStream {
 public:
  SymbolStream(Alphabet alphabet, std::vector<Symbol> data)
      : alphabet_(std::move(alphabet)), data_(std::move(data)) {
    const auto k = alphabet_.size();
    for (std::size_t i = 0; i < data_.size(); ++i)
      if (data_[i] >= k)
        throw invalid_input("symbol index " + std::to_string(data_[i]) + " at position " +
                            std::to_string(i) + " is outside the alphabet");
  }

  /// Parses text with Alphabet::parse_word.
  static SymbolStream from_text(Alphabet alphabet, std::string_view text) {
    auto data = alphabet.parse_word(text);
    return SymbolStream(std::move(alphabet), std::move(data));
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::span<const Symbol> data() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  Symbol operator[](std::size_t i) const { return data_[i]; }

  SymbolStream prefix(std::size_t n) const {
    n = std::min(n, data_.size());
    return SymbolStream(alphabet_, std::vector<Symbol>(data_.begin(), data_.begin() + n));
  }

 private:
  Alphabet alphabet_;
  std::vector<Symbol> data_;
};

// ---------------------------------------------------------------------------
// Distribution and entropy
// ---------------------------------------------------------------------------

/// Probability vector over the k symbols of an alphabet.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit Distribution(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw invalid_input("empty distribution");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0 && v <= 1.0)) throw invalid_input("distribution entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) throw invalid_input("distribution does not sum to 1");
  }

  /// Normalizes non-negative counts; nullopt when they are all zero.
  template <typename T>
  static std::optional<Distribution> from_counts(std::span<const T> counts) {
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total <= 0.0) return std::nullopt;
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / total;
    return Distribution(std::move(p));
  }

  static Distribution uniform(std::size_t k) { return Distribution(std::vector<double>(k, 1.0 / k)); }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> probs() const noexcept { return p_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> p_;
};

/// Shannon entropy in bits, with 0 log 0 = 0.
inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return std::max(h, 0.0);
}

inline double entropy(const Distribution& d) { return entropy(d.probs()); }

inline double linf_distance(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double linf_distance(const Distribution& a, const Distribution& b) {
  return linf_distance(a.probs(), b.probs());
}

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

namespace detail {

inline void check_word(std::span<const Symbol> x, std::size_t k) {
  for (Symbol c : x)
    if (c >= k) throw invalid_input("query symbol " + std::to_string(c) + " is outside the alphabet");
}

}  // namespace detail

/// Overlapping occurrences of x in s; count(s, λ) = |s|. Direct scan.
inline std::uint64_t count(const SymbolStream& s, std::span<const Symbol> x) {
  detail::check_word(x, s.alphabet().size());
  if (x.empty()) return s.size();
  if (x.size() > s.size()) return 0;
  const auto d = s.data();
  std::uint64_t n = 0;
  for (std::size_t i = 0; i + x.size() <= d.size(); ++i)
    if (std::equal(x.begin(), x.end(), d.begin() + i)) ++n;
  return n;
}

/// Occurrence counts #^s(x) for every word with |x| <= max_query_length().
///
/// Words are keyed by their base-k code, one level per length. Short levels
/// are dense arrays; long ones hold the sorted distinct codes that occur.
class CountTable {
 public:
  std::uint64_t count(std::span<const Symbol> x) const {
    detail::check_word(x, k_);
    if (x.size() > max_query_length())
      throw invalid_input("count table covers words up to length " +
                          std::to_string(max_query_length()) + ", queried length " +
                          std::to_string(x.size()));
    return count_code(x.size(), encode(x));
  }

  /// Count for a word given by its base-k code at a given length.
  std::uint64_t count_code(std::size_t length, std::uint64_t code) const {
    if (length == 0) return stream_length_;
    const Level& lv = levels_[length];
    if (lv.dense) return code < lv.dense_counts.size() ? lv.dense_counts[code] : 0;
    auto it = std::lower_bound(lv.codes.begin(), lv.codes.end(), code);
    if (it == lv.codes.end() || *it != code) return 0;
    return lv.sparse_counts[static_cast<std::size_t>(it - lv.codes.begin())];
  }

  std::uint64_t encode(std::span<const Symbol> x) const noexcept {
    std::uint64_t code = 0;
    for (Symbol c : x) code = code * k_ + c;
    return code;
  }

  /// Successor counts #^s(xσ) for each σ.
  std::vector<std::uint64_t> successor_counts(std::span<const Symbol> x) const {
    detail::check_word(x, k_);
    if (x.size() + 1 > max_query_length())
      throw invalid_input("count table does not cover successors of words of length " +
                          std::to_string(x.size()));
    std::vector<std::uint64_t> out(k_);
    const std::uint64_t base = encode(x) * k_;
    for (std::size_t a = 0; a < k_; ++a) out[a] = count_code(x.size() + 1, base + a);
    return out;
  }

  std::uint64_t stream_length() const noexcept { return stream_length_; }
  std::size_t alphabet_size() const noexcept { return k_; }
  std::size_t max_query_length() const noexcept { return levels_.size() - 1; }

  friend CountTable build_count_table(const SymbolStream& s, std::size_t max_len, unsigned threads);

 private:
  struct Level {
    bool dense = true;
    std::vector<std::uint64_t> dense_counts;
    std::vector<std::uint64_t> codes;
    std::vector<std::uint64_t> sparse_counts;
  };

  std::size_t k_ = 0;
  std::uint64_t stream_length_ = 0;
  std::vector<Level> levels_;
};

namespace detail {

// Levels with at most this many cells are stored densely.
inline constexpr std::uint64_t kDenseCellLimit = std::uint64_t{1} << 22;
inline constexpr std::uint64_t kTableMemoryLimit = std::uint64_t{6} << 30;

}  // namespace detail

/// Builds counts for all words of length <= max_len + 1 in one pass per
/// length. Levels are independent, so they are filled in parallel.
inline CountTable build_count_table(const SymbolStream& s, std::size_t max_len, unsigned threads = 1) {
  const std::size_t k = s.alphabet().size();
  const std::size_t top = max_len + 1;
  const std::uint64_t n = s.size();

  // k^top must fit in 64 bits.
  std::vector<std::uint64_t> cells(top + 1, 1);
  for (std::size_t l = 1; l <= top; ++l) {
    if (cells[l - 1] > std::numeric_limits<std::uint64_t>::max() / k)
      throw resource_error("count table: words of length " + std::to_string(l) + " over " +
                           std::to_string(k) + " symbols cannot be indexed; lower the maximum "
                           "word length (e.g. a larger epsilon or shorter extensions)");
    cells[l] = cells[l - 1] * k;
  }

  std::uint64_t bytes = 0;
  for (std::size_t l = 1; l <= top; ++l) {
    const bool dense = cells[l] <= std::max<std::uint64_t>(detail::kDenseCellLimit, 2 * n);
    bytes += dense ? cells[l] * 8 : std::min<std::uint64_t>(n, cells[l]) * 24;
  }
  if (bytes > detail::kTableMemoryLimit)
    throw resource_error("count table would need about " + std::to_string(bytes >> 20) +
                         " MiB; lower the maximum word length (e.g. a larger epsilon or shorter "
                         "extensions)");

  CountTable t;
  t.k_ = k;
  t.stream_length_ = n;
  t.levels_.resize(top + 1);

  const auto data = s.data();
  auto fill_level = [&](std::size_t l) {
    auto& lv = t.levels_[l];
    lv.dense = cells[l] <= std::max<std::uint64_t>(detail::kDenseCellLimit, 2 * n);
    if (n < l) {
      lv.dense = true;
      return;
    }
    const std::uint64_t modulus = cells[l];
    std::uint64_t code = 0;
    for (std::size_t i = 0; i + 1 < l; ++i) code = code * k + data[i];
    if (lv.dense) {
      lv.dense_counts.assign(modulus, 0);
      for (std::size_t i = l - 1; i < n; ++i) {
        code = (code * k + data[i]) % modulus;
        ++lv.dense_counts[code];
      }
    } else {
      std::vector<std::uint64_t> all;
      all.reserve(n - l + 1);
      for (std::size_t i = l - 1; i < n; ++i) {
        code = (code * k + data[i]) % modulus;
        all.push_back(code);
      }
      std::sort(all.begin(), all.end());
      for (std::size_t i = 0; i < all.size();) {
        std::size_t j = i;
        while (j < all.size() && all[j] == all[i]) ++j;
        lv.codes.push_back(all[i]);
        lv.sparse_counts.push_back(j - i);
        i = j;
      }
    }
  };

  threads = std::max(1u, threads);
  if (threads == 1 || top < 2) {
    for (std::size_t l = 1; l <= top; ++l) fill_level(l);
  } else {
    std::vector<std::jthread> pool;
    std::size_t next = 1;
    std::mutex m;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t l;
          {
            std::lock_guard lock(m);
            if (next > top) return;
            l = next++;
          }
          fill_level(l);
        }
      });
  }
  return t;
}

/// Empirical next-symbol distribution after x; nullopt when x never has a
/// successor in the stream.
inline std::optional<Distribution> symbolic_derivative(const CountTable& t, std::span<const Symbol> x) {
  const auto succ = t.successor_counts(x);
  return Distribution::from_counts(std::span<const std::uint64_t>(succ));
}

}  // namespace symrate
