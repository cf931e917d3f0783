#pragma once

// Independent reference implementations used as test oracles. They share no
// code with the library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "symrate/stream.hpp"

namespace oracle {

using symrate::Symbol;
using symrate::Word;

inline std::uint64_t naive_count(const std::vector<Symbol>& s, const Word& x) {
  if (x.empty()) return s.size();
  std::uint64_t n = 0;
  for (std::size_t i = 0; i + x.size() <= s.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < x.size() && ok; ++j) ok = s[i + j] == x[j];
    n += ok;
  }
  return n;
}

inline double shannon(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0) h += v * std::log(1.0 / v) / std::log(2.0);
  return h;
}

/// All words over k symbols with length 0..max_len.
inline std::vector<Word> all_words(std::size_t k, std::size_t max_len) {
  std::vector<Word> out{Word{}};
  std::size_t begin = 0;
  for (std::size_t l = 1; l <= max_len; ++l) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t a = 0; a < k; ++a) {
        Word w = out[i];
        w.push_back(static_cast<Symbol>(a));
        out.push_back(std::move(w));
      }
    begin = end;
  }
  return out;
}

inline std::vector<Symbol> random_symbols(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(0, static_cast<int>(k) - 1);
  std::vector<Symbol> out(n);
  for (auto& v : out) v = static_cast<Symbol>(d(rng));
  return out;
}

inline std::vector<double> random_simplex_point(std::size_t k, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(k);
  double s = 0;
  for (auto& v : p) s += (v = e(rng));
  for (auto& v : p) v /= s;
  return p;
}

/// Convex hull of 2-D points (Andrew's monotone chain), strict vertices only.
struct P2 {
  double x, y;
  std::size_t id;
};

inline std::vector<P2> monotone_chain(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end(), [](const P2& a, const P2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const P2& a, const P2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const P2& o, const P2& a, const P2& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-13) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 1e-13) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

/// Longest previous factor by brute force, then the exhaustive-history parse.
inline std::vector<std::size_t> naive_lz76(const std::vector<Symbol>& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < i; ++j) {
      std::size_t l = 0;
      while (i + l < s.size() && s[j + l] == s[i + l]) ++l;
      best = std::max(best, l);
    }
    const std::size_t len = std::min(best + 1, s.size() - i);
    out.push_back(len);
    i += len;
  }
  return out;
}

/// LZ78 phrase count with an explicit phrase set.
inline std::uint64_t naive_lz78_phrases(const std::vector<Symbol>& s) {
  std::vector<Word> dict;
  Word cur;
  std::uint64_t c = 0;
  for (Symbol v : s) {
    cur.push_back(v);
    if (std::find(dict.begin(), dict.end(), cur) == dict.end()) {
      dict.push_back(cur);
      cur.clear();
      ++c;
    }
  }
  return c + (cur.empty() ? 0 : 1);
}

}  // namespace oracle
