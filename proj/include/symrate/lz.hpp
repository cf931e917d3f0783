#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "symrate/errors.hpp"
#include "symrate/stream.hpp"

namespace symrate {

// ---------------------------------------------------------------------------
// LZ78 incremental parsing
// ---------------------------------------------------------------------------

/// Phrase dictionary as a trie: node i > 0 extends nodes[i].parent by
/// nodes[i].symbol. Each phrase is a node; every phrase but possibly the last
/// is a fresh node.
struct LzParse {
  struct Node {
    std::uint32_t parent;
    Symbol symbol;
  };
  std::uint64_t phrase_count = 0;
  std::uint64_t input_length = 0;
  std::vector<Node> nodes;  // nodes[0] is the empty phrase
  std::vector<std::uint32_t> phrases;
};

namespace detail {

// Online parser; children stored as a flat node x symbol table.
class Lz78Parser {
 public:
  explicit Lz78Parser(std::size_t k) : k_(k), children_(k, 0) { nodes_.push_back({0, 0}); }

  /// Feeds one symbol; true when it closed a new phrase.
  bool push(Symbol s) {
    auto& child = children_[static_cast<std::size_t>(cur_) * k_ + s];
    if (child != 0) {
      cur_ = child;
      return false;
    }
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    child = id;  // before resize: `child` refers into children_
    nodes_.push_back({cur_, s});
    children_.resize(children_.size() + k_, 0);
    if (record_) phrases_.push_back(id);
    cur_ = 0;
    return true;
  }

  bool pending() const noexcept { return cur_ != 0; }
  void record(bool on) { record_ = on; }

  LzParse finish(std::uint64_t n, std::uint64_t completed) {
    LzParse p;
    p.input_length = n;
    p.phrase_count = completed + (pending() ? 1 : 0);
    if (pending() && record_) phrases_.push_back(cur_);
    p.nodes = std::move(nodes_);
    p.phrases = std::move(phrases_);
    return p;
  }

 private:
  std::size_t k_;
  std::vector<LzParse::Node> nodes_;
  std::vector<std::uint32_t> children_;
  std::vector<std::uint32_t> phrases_;
  std::uint32_t cur_ = 0;
  bool record_ = false;
};

inline double phrase_rate(std::uint64_t c, std::uint64_t n) {
  if (c <= 1 || n == 0) return 0.0;
  return static_cast<double>(c) * std::log2(static_cast<double>(c)) / static_cast<double>(n);
}

inline void check_checkpoints(std::span<const std::uint64_t> cps, std::uint64_t n) {
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] == 0 || cps[i] > n) throw invalid_input("checkpoints must lie in [1, stream length]");
    if (i > 0 && cps[i] <= cps[i - 1]) throw invalid_input("checkpoints must be strictly ascending");
  }
}

}  // namespace detail

inline LzParse lz78_parse(const SymbolStream& s) {
  detail::Lz78Parser p(s.alphabet().size());
  p.record(true);
  std::uint64_t done = 0;
  for (Symbol c : s.data()) done += p.push(c);
  return p.finish(s.size(), done);
}

/// Concatenated phrases; equals the parsed stream.
inline std::vector<Symbol> lz78_reconstruct(const LzParse& p) {
  std::vector<Symbol> out, phrase;
  out.reserve(p.input_length);
  for (auto id : p.phrases) {
    phrase.clear();
    for (auto v = id; v != 0; v = p.nodes[v].parent) phrase.push_back(p.nodes[v].symbol);
    out.insert(out.end(), phrase.rbegin(), phrase.rend());
  }
  return out;
}

/// c log2 c / n with c the LZ78 phrase count.
inline double lz78_entropy_estimate(const SymbolStream& s) {
  if (s.empty()) throw invalid_input("LZ estimate needs at least one symbol");
  detail::Lz78Parser p(s.alphabet().size());
  std::uint64_t done = 0;
  for (Symbol c : s.data()) done += p.push(c);
  return detail::phrase_rate(done + (p.pending() ? 1 : 0), s.size());
}

/// Estimate on each prefix s[0, m) in one pass.
inline std::vector<std::pair<std::uint64_t, double>> lz78_curve(const SymbolStream& s,
                                                                std::span<const std::uint64_t> checkpoints) {
  detail::check_checkpoints(checkpoints, s.size());
  detail::Lz78Parser p(s.alphabet().size());
  std::vector<std::pair<std::uint64_t, double>> out;
  std::uint64_t done = 0, i = 0;
  const auto d = s.data();
  for (auto m : checkpoints) {
    for (; i < m; ++i) done += p.push(d[i]);
    out.emplace_back(m, detail::phrase_rate(done + (p.pending() ? 1 : 0), m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// LZ76 (exhaustive history) parsing
// ---------------------------------------------------------------------------

/// Suffix array by prefix doubling with radix passes.
inline std::vector<std::uint32_t> suffix_array(std::span<const Symbol> s) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> sa(n), rank(n), tmp(n), next(n);
  if (n == 0) return sa;
  if (n >= std::numeric_limits<std::uint32_t>::max()) throw resource_error("stream too long for suffix array");
  for (std::size_t i = 0; i < n; ++i) {
    sa[i] = static_cast<std::uint32_t>(i);
    rank[i] = s[i];
  }
  std::stable_sort(sa.begin(), sa.end(), [&](auto a, auto b) { return s[a] < s[b]; });
  std::size_t classes = 0;
  {
    std::vector<std::uint32_t> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && s[sa[i]] != s[sa[i - 1]]) ++classes;
      r[sa[i]] = static_cast<std::uint32_t>(classes);
    }
    rank.swap(r);
    ++classes;
  }
  std::vector<std::uint32_t> cnt;
  for (std::size_t h = 1; classes < n; h <<= 1) {
    // Sort by second key: suffixes without a second half first, then by shifting.
    std::size_t p = 0;
    for (std::size_t i = n - h; i < n; ++i) tmp[p++] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < n; ++i)
      if (sa[i] >= h) tmp[p++] = static_cast<std::uint32_t>(sa[i] - h);
    // Stable counting sort on first key.
    cnt.assign(classes + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++cnt[rank[i] + 1];
    for (std::size_t c = 1; c <= classes; ++c) cnt[c] += cnt[c - 1];
    for (std::size_t i = 0; i < n; ++i) sa[cnt[rank[tmp[i]]]++] = tmp[i];
    // Re-rank.
    next[sa[0]] = 0;
    std::size_t cls = 0;
    for (std::size_t i = 1; i < n; ++i) {
      const auto a = sa[i - 1], b = sa[i];
      const bool same = rank[a] == rank[b] && a + h < n && b + h < n && rank[a + h] == rank[b + h];
      if (!same) ++cls;
      next[b] = static_cast<std::uint32_t>(cls);
    }
    rank.swap(next);
    classes = cls + 1;
    if (h >= n) break;
  }
  return sa;
}

/// Phrase lengths of the exhaustive-history parse: each phrase is the longest
/// prefix of the rest that already starts somewhere earlier, plus one symbol.
inline std::vector<std::uint32_t> lz76_phrase_lengths(std::span<const Symbol> s) {
  const std::size_t n = s.size();
  std::vector<std::uint32_t> out;
  if (n == 0) return out;
  const auto sa = suffix_array(s);
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  // Nearest suffixes in sorted order with a smaller text position.
  std::vector<std::uint32_t> psv(n, kNone), nsv(n, kNone), stack;
  for (std::size_t r = 0; r < n; ++r) {
    while (!stack.empty() && stack.back() > sa[r]) stack.pop_back();
    if (!stack.empty()) psv[sa[r]] = stack.back();
    stack.push_back(sa[r]);
  }
  stack.clear();
  for (std::size_t r = n; r-- > 0;) {
    while (!stack.empty() && stack.back() > sa[r]) stack.pop_back();
    if (!stack.empty()) nsv[sa[r]] = stack.back();
    stack.push_back(sa[r]);
  }
  auto lcp = [&](std::size_t i, std::uint32_t j) -> std::size_t {
    if (j == kNone) return 0;
    std::size_t l = 0;
    while (i + l < n && s[j + l] == s[i + l]) ++l;
    return l;
  };
  for (std::size_t i = 0; i < n;) {
    const std::size_t len = std::min(std::max(lcp(i, psv[i]), lcp(i, nsv[i])) + 1, n - i);
    out.push_back(static_cast<std::uint32_t>(len));
    i += len;
  }
  return out;
}

/// c log2 n / n with c the LZ76 phrase count.
inline double lz76_entropy_estimate(const SymbolStream& s) {
  if (s.empty()) throw invalid_input("LZ estimate needs at least one symbol");
  const auto c = lz76_phrase_lengths(s.data()).size();
  const double n = static_cast<double>(s.size());
  return static_cast<double>(c) * std::log2(n) / n;
}

/// Estimate on each prefix; a prefix's parse is the full parse truncated.
inline std::vector<std::pair<std::uint64_t, double>> lz76_curve(const SymbolStream& s,
                                                                std::span<const std::uint64_t> checkpoints) {
  detail::check_checkpoints(checkpoints, s.size());
  std::vector<std::pair<std::uint64_t, double>> out;
  if (checkpoints.empty()) return out;
  const auto lens = lz76_phrase_lengths(s.data().first(checkpoints.back()));
  std::uint64_t start = 0, c = 0;
  std::size_t j = 0;
  for (auto m : checkpoints) {
    while (j < lens.size() && start < m) {
      start += lens[j++];
      ++c;
    }
    const double md = static_cast<double>(m);
    out.emplace_back(m, static_cast<double>(c) * std::log2(md) / md);
  }
  return out;
}

}  // namespace symrate
