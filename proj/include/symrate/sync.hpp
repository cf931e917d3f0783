#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symrate/errors.hpp"
#include "symrate/hull.hpp"
#include "symrate/stream.hpp"

namespace symrate {

/// Longest candidate word: ceil(log(1/ε) / log k), so about 1/ε words are
/// examined, clamped to `cap`.
inline std::size_t candidate_length(double epsilon, std::size_t k, std::size_t cap = 12) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw invalid_input("epsilon must lie in (0,1)");
  if (k < 2) throw invalid_input("alphabet size must be at least 2");
  // Guard against log ratios a hair above an integer (e.g. log 100 / log 10).
  const double raw = std::log(1.0 / epsilon) / std::log(static_cast<double>(k));
  const auto len = static_cast<std::size_t>(std::ceil(raw - 1e-12));
  return std::clamp<std::size_t>(len, 1, cap);
}

/// Half-width of a confidence band at level α for an empirical distribution
/// built from n samples: sqrt(ln(2/(1-α)) / 2n).
inline double derivative_radius(std::uint64_t n, double alpha) {
  if (n == 0) return 1.0;
  return std::sqrt(std::log(2.0 / (1.0 - alpha)) / (2.0 * static_cast<double>(n)));
}

/// Fewest occurrences for which a symbolic derivative is within ε of its
/// limit at confidence α; never below n_min.
inline std::uint64_t heap_min_count(double epsilon, double alpha, std::uint64_t n_min) {
  const double need = std::log(2.0 / (1.0 - alpha)) / (2.0 * epsilon * epsilon);
  return std::max<std::uint64_t>(n_min, static_cast<std::uint64_t>(std::ceil(need)));
}

struct HeapEntry {
  Distribution derivative;
  std::uint64_t count;
};

/// Symbolic derivatives of the candidate words, ordered lexicographically.
struct DerivativeHeap {
  std::size_t alphabet_size = 0;
  std::map<Word, HeapEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }
};

/// Every word of length <= max_length (λ included) that occurs at least
/// min_count times and has a defined derivative.
inline DerivativeHeap build_heap(const CountTable& t, std::size_t max_length, std::uint64_t min_count) {
  if (t.max_query_length() < max_length + 1)
    throw invalid_input("count table does not cover candidate length " + std::to_string(max_length));
  DerivativeHeap heap;
  heap.alphabet_size = t.alphabet_size();
  const auto k = t.alphabet_size();

  // Depth-first; counts never grow along extensions, so rare words prune.
  Word word;
  auto visit = [&](auto&& self) -> void {
    if (t.count(word) < std::max<std::uint64_t>(min_count, 1)) return;
    if (auto d = symbolic_derivative(t, word)) heap.entries.emplace(word, HeapEntry{*d, t.count(word)});
    if (word.size() == max_length) return;
    for (std::size_t a = 0; a < k; ++a) {
      word.push_back(static_cast<Symbol>(a));
      self(self);
      word.pop_back();
    }
  };
  visit(visit);

  if (heap.empty())
    throw insufficient_data("derivative heap is empty: no candidate word occurs " + std::to_string(min_count) +
                            " times (stream length " + std::to_string(t.stream_length()) + ")");
  return heap;
}

/// Words whose derivatives are vertices of the convex hull of the heap.
/// Binary alphabets use the extremes of the first coordinate directly.
inline std::vector<Word> hull_vertices(const DerivativeHeap& h, double tol = 1e-9) {
  std::vector<Word> out;
  if (h.empty()) return out;
  if (h.alphabet_size == 2) {
    double lo = 2.0, hi = -1.0;
    for (const auto& [w, e] : h.entries) {
      lo = std::min(lo, e.derivative[0]);
      hi = std::max(hi, e.derivative[0]);
    }
    for (const auto& [w, e] : h.entries)
      if (e.derivative[0] == lo || e.derivative[0] == hi) out.push_back(w);
    return out;
  }
  std::vector<geometry::Point> pts;
  std::vector<const Word*> words;
  for (const auto& [w, e] : h.entries) {
    pts.emplace_back(e.derivative.probs().begin(), e.derivative.probs().end());
    words.push_back(&w);
  }
  for (auto i : geometry::hull_vertex_indices(pts, tol)) out.push_back(*words[i]);
  return out;
}

struct SyncResult {
  Word x0;
  double p0 = 0.0;
  std::uint64_t x0_count = 0;
  double epsilon = 0.0;
  std::vector<std::pair<Word, Distribution>> hull_vertices;
  /// Words eligible for x0: hull vertices plus any word whose derivative is
  /// statistically indistinguishable from one of them.
  std::vector<Word> candidates;
};

/// Picks x0 as the most frequent eligible word (ties: lexicographically
/// smallest) and p0 = #x0 / |s|.
///
/// Without `alpha` only exact hull vertices are eligible. With it, a word is
/// also eligible when its derivative lies within the sum of the two
/// confidence radii of some vertex's derivative.
inline SyncResult select_sync_string(const DerivativeHeap& h, const CountTable& t, double epsilon,
                                     std::optional<double> alpha = std::nullopt) {
  if (h.empty()) throw insufficient_data("derivative heap is empty");
  SyncResult r;
  r.epsilon = epsilon;
  const auto vertices = hull_vertices(h);
  for (const auto& w : vertices) r.hull_vertices.emplace_back(w, h.entries.at(w).derivative);

  if (alpha) {
    for (const auto& [w, e] : h.entries) {
      const double rw = derivative_radius(e.count, *alpha);
      const bool near = std::any_of(vertices.begin(), vertices.end(), [&](const Word& v) {
        const auto& ve = h.entries.at(v);
        return linf_distance(e.derivative, ve.derivative) <= rw + derivative_radius(ve.count, *alpha);
      });
      if (near) r.candidates.push_back(w);
    }
  } else {
    r.candidates = vertices;
  }

  // candidates are in lexicographic order, so strict > keeps the smallest on ties.
  const Word* best = nullptr;
  std::uint64_t best_count = 0;
  for (const auto& w : r.candidates) {
    const auto c = h.entries.at(w).count;
    if (!best || c > best_count) {
      best = &w;
      best_count = c;
    }
  }
  r.x0 = *best;
  r.x0_count = best_count;
  r.p0 = t.stream_length() == 0 ? 0.0 : static_cast<double>(best_count) / static_cast<double>(t.stream_length());
  return r;
}

struct SyncOptions {
  double epsilon = 0.05;
  double alpha = 0.95;
  std::uint64_t n_min = 10;
  std::size_t length_cap = 12;
  /// Admit words indistinguishable from a hull vertex as x0 candidates.
  bool widen = true;
};

/// Phase I from a prebuilt table: heap over candidate words, hull, x0.
inline SyncResult find_sync_string(const CountTable& t, const SyncOptions& opt) {
  const auto len = candidate_length(opt.epsilon, t.alphabet_size(), opt.length_cap);
  const auto heap = build_heap(t, len, heap_min_count(opt.epsilon, opt.alpha, opt.n_min));
  return select_sync_string(heap, t, opt.epsilon, opt.widen ? std::optional<double>(opt.alpha) : std::nullopt);
}

}  // namespace symrate
