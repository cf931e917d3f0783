#include <gtest/gtest.h>

#include <random>
#include <set>

#include "support.hpp"
#include "symrate/generators.hpp"
#include "symrate/pfsa.hpp"
#include "symrate/sync.hpp"

using namespace symrate;

namespace {

DerivativeHeap heap_of(std::size_t k, const std::vector<std::pair<Word, std::vector<double>>>& items,
                       std::uint64_t count = 100) {
  DerivativeHeap h;
  h.alphabet_size = k;
  for (const auto& [w, p] : items) h.entries.emplace(w, HeapEntry{Distribution(p), count});
  return h;
}

double distance_to_degenerate(const std::vector<double>& d) { return 1.0 - *std::max_element(d.begin(), d.end()); }

}  // namespace

TEST(CandidateLength, Examples) {
  EXPECT_EQ(candidate_length(0.01, 2), 7u);
  EXPECT_EQ(candidate_length(0.5, 2), 1u);
  EXPECT_EQ(candidate_length(0.01, 27), 2u);
  EXPECT_EQ(candidate_length(0.1, 10), 1u);
  EXPECT_EQ(candidate_length(1e-9, 2, 12), 12u);
  EXPECT_THROW(candidate_length(0.0, 2), invalid_input);
}

TEST(HeapMinCount, ConfidenceDrivenFloor) {
  EXPECT_EQ(heap_min_count(0.05, 0.95, 10), 738u);
  EXPECT_EQ(heap_min_count(0.9, 0.5, 10), 10u);
}

TEST(BuildHeap, SynchronizableMachine) {
  const auto s = simulate(machines::synchronizable(), 10'000, 7);
  const auto t = build_count_table(s, 3);
  const auto h = build_heap(t, 3, 10);
  ASSERT_TRUE(h.entries.count(Word{}));
  ASSERT_TRUE(h.entries.count(Word{0}));
  ASSERT_TRUE(h.entries.count(Word{1}));
  const std::vector<Symbol> data(s.data().begin(), s.data().end());
  for (const auto& [w, e] : h.entries) {
    EXPECT_LE(w.size(), 3u);
    EXPECT_GE(e.count, 10u);
    EXPECT_EQ(e.count, oracle::naive_count(data, w));
    Word w0 = w, w1 = w;
    w0.push_back(0);
    w1.push_back(1);
    const double c0 = static_cast<double>(oracle::naive_count(data, w0));
    const double c1 = static_cast<double>(oracle::naive_count(data, w1));
    EXPECT_DOUBLE_EQ(e.derivative[0], c0 / (c0 + c1));
    EXPECT_NEAR(e.derivative[0] + e.derivative[1], 1.0, 1e-12);
  }
  // Every frequent-enough word is present.
  for (const auto& w : oracle::all_words(2, 3))
    if (oracle::naive_count(data, w) >= 10) EXPECT_TRUE(h.entries.count(w));
}

TEST(BuildHeap, FairCoinDerivativesAreNearHalf) {
  const auto s = iid_stream(Distribution({0.5, 0.5}), 50'000, 3);
  const auto h = build_heap(build_count_table(s, 4), 4, 10);
  for (const auto& [w, e] : h.entries) {
    const double sigma = 0.5 / std::sqrt(static_cast<double>(e.count));
    EXPECT_LE(std::abs(e.derivative[0] - 0.5), 5 * sigma);
  }
}

TEST(BuildHeap, ShortStreamIsInsufficient) {
  const SymbolStream s(Alphabet::of_size(2), {0, 1, 0, 1, 1});
  EXPECT_THROW(build_heap(build_count_table(s, 2), 2, 10), insufficient_data);
}

TEST(HullVertices, BinaryExtremes) {
  const auto h = heap_of(2, {{Word{0}, {0.2, 0.8}}, {Word{1}, {0.5, 0.5}}, {Word{0, 0}, {0.8, 0.2}}});
  EXPECT_EQ(hull_vertices(h), (std::vector<Word>{Word{0}, Word{0, 0}}));
  const auto single = heap_of(2, {{Word{}, {0.3, 0.7}}});
  EXPECT_EQ(hull_vertices(single), std::vector<Word>{Word{}});
}

TEST(HullVertices, SimplexCornersExcludeCentroid) {
  const double third = 1.0 / 3.0;
  const auto h = heap_of(3, {{Word{0}, {1, 0, 0}}, {Word{1}, {0, 1, 0}}, {Word{2}, {0, 0, 1}},
                             {Word{}, {third, third, 1 - 2 * third}}});
  EXPECT_EQ(hull_vertices(h), (std::vector<Word>{Word{0}, Word{1}, Word{2}}));
}

TEST(HullVertices, CollinearMidpointExcluded) {
  const auto h = heap_of(3, {{Word{0}, {0.6, 0.2, 0.2}}, {Word{1}, {0.2, 0.6, 0.2}}, {Word{2}, {0.4, 0.4, 0.2}}});
  EXPECT_EQ(hull_vertices(h), (std::vector<Word>{Word{0}, Word{1}}));
}

TEST(HullVertices, MatchesPlanarHullOracleForThreeSymbols) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    std::vector<geometry::Point> pts;
    std::vector<oracle::P2> flat;
    const int n = 3 + t % 25;
    for (int i = 0; i < n; ++i) {
      auto p = oracle::random_simplex_point(3, rng);
      if (t % 3 == 0) {  // coarse grid to provoke duplicates and collinear points
        for (auto& v : p) v = std::round(v * 4) / 4;
        double s = p[0] + p[1] + p[2];
        if (s == 0) p = {1, 0, 0};
        else for (auto& v : p) v /= s;
      }
      pts.push_back(p);
      flat.push_back({p[0], p[1], static_cast<std::size_t>(i)});
    }
    const auto got = geometry::hull_vertex_indices(pts);
    const auto hull = oracle::monotone_chain(flat);
    // Compare as point sets.
    std::set<std::pair<double, double>> want, have;
    for (const auto& q : hull) want.insert({q.x, q.y});
    for (auto i : got) have.insert({pts[i][0], pts[i][1]});
    EXPECT_EQ(have, want) << "trial " << t;
  }
}

TEST(HullVertices, VerticesReconstructHeapPoints) {
  std::mt19937_64 rng(5);
  for (std::size_t k : {2u, 3u, 4u}) {
    const auto data = oracle::random_symbols(3000, k, rng);
    const SymbolStream s(Alphabet::of_size(k), data);
    const auto h = build_heap(build_count_table(s, 3), k == 2 ? 3 : 2, 5);
    const auto v = hull_vertices(h);
    std::vector<geometry::Point> vp;
    for (const auto& w : v) vp.emplace_back(h.entries.at(w).derivative.probs().begin(), h.entries.at(w).derivative.probs().end());
    for (const auto& [w, e] : h.entries) EXPECT_LE(geometry::convex_residual(vp, e.derivative.probs()), 1e-6);
  }
}

TEST(SelectSync, TieBreakIsLexicographic) {
  const auto s = SymbolStream(Alphabet::of_size(2), {0, 1, 0, 1});
  const auto t = build_count_table(s, 1);
  const auto h = heap_of(2, {{Word{1}, {0.2, 0.8}}, {Word{0}, {0.8, 0.2}}, {Word{0, 1}, {0.5, 0.5}}}, 2);
  const auto r = select_sync_string(h, t, 0.1);
  EXPECT_EQ(r.x0, Word{0});
  EXPECT_EQ(r.x0_count, 2u);
  EXPECT_DOUBLE_EQ(r.p0, 0.5);
}

TEST(SelectSync, SynchronizableMachineFindsExactSynchronizer) {
  const auto p = machines::synchronizable();
  const auto s = simulate(p, 100'000, 12);
  const auto t = build_count_table(s, 6);
  const auto r = find_sync_string(t, SyncOptions{});
  ASSERT_FALSE(r.x0.empty());
  const auto d = *symbolic_derivative(t, r.x0);
  const bool near_q0 = linf_distance(d, Distribution({0.85, 0.15})) <= 0.02;
  const bool near_q1 = linf_distance(d, Distribution({0.25, 0.75})) <= 0.02;
  EXPECT_TRUE(near_q0 || near_q1);
  EXPECT_EQ(distance_to_degenerate(evolve(p, stationary_distribution(p), r.x0)), 0.0);
  EXPECT_DOUBLE_EQ(r.p0, static_cast<double>(t.count(r.x0)) / 1e5);
  // Strict vertex mode still returns a hull vertex.
  const auto strict = find_sync_string(t, SyncOptions{0.05, 0.95, 10, 12, false});
  bool is_vertex = false;
  for (const auto& [w, dist] : strict.hull_vertices) is_vertex |= w == strict.x0;
  EXPECT_TRUE(is_vertex);
}

TEST(SelectSync, IidStreamPicksEmptyWord) {
  const auto s = iid_stream(Distribution({0.3, 0.7}), 100'000, 4);
  const auto r = find_sync_string(build_count_table(s, 6), SyncOptions{});
  EXPECT_TRUE(r.x0.empty());
  EXPECT_DOUBLE_EQ(r.p0, 1.0);
}

TEST(SelectSync, NonSynchronizableMachineIsEpsilonSynchronizing) {
  // Over 20 seeds the true state distribution after x0 must be within ε of a
  // single state in at least 18 of them.
  const auto p = machines::non_synchronizable();
  const auto stat = stationary_distribution(p);
  int pass = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = simulate(p, 100'000, seed);
    const SyncOptions opt;
    const auto r = find_sync_string(build_count_table(s, candidate_length(opt.epsilon, 2)), opt);
    pass += distance_to_degenerate(evolve(p, stat, r.x0)) <= opt.epsilon;
  }
  EXPECT_GE(pass, 18);
}

TEST(SelectSync, Deterministic) {
  const auto s = simulate(machines::non_synchronizable(), 20'000, 2);
  const auto t = build_count_table(s, 5);
  const auto a = find_sync_string(t, SyncOptions{});
  const auto b = find_sync_string(t, SyncOptions{});
  EXPECT_EQ(a.x0, b.x0);
  EXPECT_EQ(a.candidates, b.candidates);
}
