// Acceptance runner: one PASS/FAIL/SKIP line per criterion.
// Usage: acceptance [--criterion N]   (exit 0 all pass, 1 any fail, 77 all skipped)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "support.hpp"
#include "symrate/symrate.hpp"

using namespace symrate;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::kPass : Status::kFail, std::move(detail)}; }

// Estimator settings shared by the simulated-stream criteria.
EstimatorConfig acceptance_config(std::uint64_t seed) {
  EstimatorConfig c;
  c.seed = seed;
  c.sample_size = 0;  // recommended size
  return c;
}

constexpr double kSyncH = 0.6854;
constexpr double kNonSyncH = 0.6434;

Outcome analytical_oracle() {
  const double a = analytical_entropy_rate(machines::non_synchronizable());
  const double b = analytical_entropy_rate(machines::synchronizable());
  return verdict(std::abs(a - kNonSyncH) <= 5e-4 && std::abs(b - kSyncH) <= 5e-4,
                 fmt("non-sync %.5f, sync %.5f", a, b));
}

Outcome sync_convergence() {
  const double truth = analytical_entropy_rate(machines::synchronizable());
  int close = 0, covered = 0, vacuous = 0;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = simulate(machines::synchronizable(), 30'000, seed);
    const auto r = estimate_entropy_rate(s, acceptance_config(seed));
    const double err = std::abs(r.h - truth);
    worst = std::max(worst, err);
    close += err <= 0.02;
    covered += err <= r.E;
    vacuous += r.vacuous;
  }
  return verdict(close >= 18 && covered >= 19,
                 fmt("%d/20 within 0.02 (worst %.4f), %d/20 within E (%d vacuous)", close, worst, covered, vacuous));
}

Outcome lz_comparison() {
  const double truth = kNonSyncH;
  int wins78 = 0, wins76 = 0;
  double rel78 = 0, rel76 = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = simulate(machines::non_synchronizable(), 30'000, seed);
    const double main_err = std::abs(estimate_entropy_rate(s, acceptance_config(seed)).h - truth);
    const double e78 = std::abs(lz78_entropy_estimate(s) - truth);
    const double e76 = std::abs(lz76_entropy_estimate(s) - truth);
    wins78 += main_err < e78;
    wins76 += main_err < e76;
    rel78 += e78 / truth / 20;
    rel76 += e76 / truth / 20;
  }
  const bool ok = wins78 >= 18 && rel78 >= 0.10 && rel78 <= 0.25;
  return verdict(ok, fmt("lz78: main better %d/20, mean rel err %.1f%% (band 10-25%%); "
                         "lz76 for reference: main better %d/20, mean rel err %.1f%%",
                         wins78, 100 * rel78, wins76, 100 * rel76));
}

Outcome chaotic_map() {
  EstimatorConfig c = acceptance_config(1);
  const auto a = estimate_entropy_rate(chaotic_stream({1.7499, 0.1, 10'000, 100'000}), c);
  const auto b = estimate_entropy_rate(chaotic_stream({1.75, 0.1, 10'000, 100'000}), c);
  return verdict(std::abs(a.h - 0.2779) <= 0.05 && b.h <= 0.05, fmt("r=1.7499: %.4f, r=1.75: %.4f", a.h, b.h));
}

Outcome bound_anchors() {
  const double inf = std::numeric_limits<double>::infinity();
  const auto e27 = solve_uncertainty(5e6, 27, 0.95, recommended_sample_size(27), inf);
  const auto e2 = solve_uncertainty(5e6, 2, 0.95, recommended_sample_size(2), inf);
  const bool ok = e27.E >= 0.77 && e27.E <= 1.04 && e2.E >= 0.19 && e2.E <= 0.25;
  return verdict(ok, fmt("k=27: E=%.4f (band 0.77-1.04), k=2: E=%.4f (band 0.19-0.25); eps*=%.4f, %.4f", e27.E, e2.E,
                         e27.epsilon_star, e2.epsilon_star));
}

Outcome rate_shape() {
  const double inf = std::numeric_limits<double>::infinity();
  std::string detail;
  bool ok = true;
  for (std::size_t k : {2u, 27u}) {
    double lo = inf, hi = 0;
    for (int i = 0; i <= 30; ++i) {
      const double n = std::pow(10.0, 6.0 + 3.0 * i / 30.0);
      const double ratio = solve_uncertainty(n, k, 0.95, recommended_sample_size(k), inf).E * std::cbrt(n) / std::log2(n);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    const double var = (hi - lo) / lo;
    ok = ok && var < 0.15;
    detail += fmt("%sk=%zu: %.1f%%", detail.empty() ? "" : ", ", k, 100 * var);
  }
  return verdict(ok, "ratio variation " + detail);
}

Outcome bernoulli() {
  const auto s = iid_stream(Distribution({0.3, 0.7}), 1'000'000, 1);
  const double h = estimate_entropy_rate(s, acceptance_config(1)).h;
  return verdict(std::abs(h - 0.8813) <= 0.01, fmt("h=%.4f", h));
}

Outcome property_suites() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::string> failed;

  // Distribution normalization.
  for (int t = 0; t < 10'000; ++t) {
    std::vector<std::uint64_t> counts(2 + t % 30);
    for (auto& c : counts) c = rng() % 1000;
    counts[0] += 1;
    const auto d = *Distribution::from_counts(std::span<const std::uint64_t>(counts));
    double sum = 0;
    for (double p : d.probs()) sum += p;
    if (std::abs(sum - 1) > 1e-12) { failed.push_back("normalization"); break; }
  }

  // Count table against naive scanning.
  for (int t = 0; t < 30 && (failed.empty() || failed.back() != "counts"); ++t) {
    const std::size_t k = 2 + t % 3;
    const auto data = oracle::random_symbols(1 + rng() % 1000, k, rng);
    const auto table = build_count_table(SymbolStream(Alphabet::of_size(k), data), 4);
    for (const auto& w : oracle::all_words(k, 4))
      if (table.count(w) != oracle::naive_count(data, w)) { failed.push_back("counts"); break; }
  }

  // Generalized binary entropy: symmetry, then the entropy-deviation bound on
  // 10^4 random pairs (half nearby, half arbitrary), every violation counted.
  for (int t = 0; t < 10'000; ++t) {
    const double e = u(rng);
    if (std::abs(gen_binary_entropy(e, 2 + t % 10) - gen_binary_entropy(1 - e, 2 + t % 10)) > 1e-12) {
      failed.push_back("symmetry");
      break;
    }
  }
  int violations = 0, small_eps_violations = 0;
  double worst_excess = 0;
  for (int t = 0; t < 10'000; ++t) {
    const std::size_t k = 2 + t % 10;
    const auto p = oracle::random_simplex_point(k, rng);
    auto q = oracle::random_simplex_point(k, rng);
    if (t % 2 == 0) {
      const double mix = 0.1 * u(rng);
      for (std::size_t i = 0; i < k; ++i) q[i] = (1 - mix) * p[i] + mix * q[i];
    }
    const double eps = linf_distance(Distribution(p), Distribution(q));
    const double excess = std::abs(oracle::shannon(p) - oracle::shannon(q)) - gen_binary_entropy(eps, k);
    if (excess > 1e-12) {
      ++violations;
      small_eps_violations += eps <= 0.5;
      worst_excess = std::max(worst_excess, excess);
    }
  }
  if (violations) failed.push_back(fmt("deviation bound (%d/10000 pairs violate, %d with eps <= 1/2, worst excess %.3f bits)",
                                       violations, small_eps_violations, worst_excess));

  // Hull vertices reconstruct every heap point.
  for (std::size_t k : {2u, 3u, 4u}) {
    const auto data = oracle::random_symbols(3000, k, rng);
    const auto h = build_heap(build_count_table(SymbolStream(Alphabet::of_size(k), data), 3), k == 2 ? 3 : 2, 5);
    std::vector<geometry::Point> vp;
    for (const auto& w : hull_vertices(h)) {
      const auto pr = h.entries.at(w).derivative.probs();
      vp.emplace_back(pr.begin(), pr.end());
    }
    bool ok = true;
    for (const auto& [w, e] : h.entries) ok = ok && geometry::convex_residual(vp, e.derivative.probs()) <= 1e-6;
    if (!ok) { failed.push_back("hull reconstruction"); break; }
  }

  // Solver monotone in |s|, |D| (eps* non-increasing) and alpha (non-decreasing).
  // E follows eps* while eps* <= 1/2; above that the folded entropy term can
  // make it fall, so those cases are only counted.
  int folded = 0;
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = 2 + t % 26;
    const double n = std::pow(10.0, 3 + 6 * u(rng)), d = std::pow(10.0, 3 + 5 * u(rng)), a = 0.5 + 0.45 * u(rng);
    const double p0 = 0.01 + u(rng);
    const auto base = solve_uncertainty(n, k, a, d, p0);
    const auto more_s = solve_uncertainty(2 * n, k, a, d, p0);
    const auto more_d = solve_uncertainty(n, k, a, 2 * d, p0);
    const auto more_a = solve_uncertainty(n, k, a + 0.04, d, p0);
    bool ok = more_s.epsilon_star <= base.epsilon_star && more_d.epsilon_star <= base.epsilon_star &&
              more_a.epsilon_star >= base.epsilon_star;
    const bool e_ok = more_s.E <= base.E + 1e-12 && more_d.E <= base.E + 1e-12 && more_a.E >= base.E - 1e-12;
    if (std::max(base.epsilon_star, more_a.epsilon_star) <= 0.5) ok = ok && e_ok;
    else folded += !e_ok;
    if (!ok) {
      failed.push_back("solver monotonicity");
      break;
    }
  }

  // evolve is a monoid action: evolve(d, xy) = evolve(evolve(d, x), y).
  for (const auto& m : {machines::synchronizable(), machines::non_synchronizable()}) {
    const auto d0 = stationary_distribution(m);
    bool ok = true;
    for (int t = 0; t < 500 && ok; ++t) {
      const auto x = oracle::random_symbols(rng() % 6, 2, rng);
      const auto y = oracle::random_symbols(rng() % 6, 2, rng);
      auto xy = x;
      xy.insert(xy.end(), y.begin(), y.end());
      try {
        const auto whole = evolve(m, d0, xy);
        const auto mid = evolve(m, d0, x);
        const auto split = evolve(m, mid, y);
        for (std::size_t i = 0; i < whole.size(); ++i) ok = ok && std::abs(whole[i] - split[i]) <= 1e-12;
      } catch (const impossible_evolution&) {
      }
    }
    if (!ok) { failed.push_back("evolve monoid"); break; }
  }

  std::string detail = "normalization, counts, symmetry, deviation bound, hull, solver monotonicity, evolve monoid";
  const std::string fold_note = fmt("; E not monotone in %d/2000 solver cases with eps* > 1/2", folded);
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f;
    detail += "; the other suites hold";
  }
  detail += fold_note;
  return verdict(failed.empty(), detail);
}

Outcome english_text() {
  const char* kjb = std::getenv("SYMRATE_KJB");
  const char* shk = std::getenv("SYMRATE_SHK");
  if (!kjb || !shk) return {Status::kSkip, "set SYMRATE_KJB and SYMRATE_SHK to corpus paths"};
  auto rate = [](const char* path) {
    const auto bytes = io::read_bytes(path);
    EstimatorConfig c;
    c.threads = std::max(1u, std::thread::hardware_concurrency());
    return estimate_entropy_rate(normalize_text(std::string_view(bytes.data(), bytes.size())), c).h;
  };
  const double a = rate(kjb), b = rate(shk);
  return verdict(std::abs(a - 1.05) <= 0.10 && std::abs(b - 1.25) <= 0.10, fmt("KJB %.4f, Shakespeare %.4f", a, b));
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "analytical oracle", 1e-3, analytical_oracle},
      {2, "estimator convergence, synchronizable machine", 10, sync_convergence},
      {3, "estimator vs LZ78, non-synchronizable machine", 20, lz_comparison},
      {4, "chaotic map", 10, chaotic_map},
      {5, "bound-curve anchors", 1, bound_anchors},
      {6, "convergence rate shape", 1, rate_shape},
      {7, "i.i.d. closed form", 5, bernoulli},
      {8, "property suites", 30, property_suites},
      {9, "English text corpora", 300, english_text},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 1;
    }
  }
  int ran = 0, failed = 0, skipped = 0;
  for (const auto& c : criteria()) {
    if (only && c.id != only) continue;
    ++ran;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.status == Status::kPass && secs >= c.time_limit_s) {
      o.status = Status::kFail;
      o.detail += "; over time limit";
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    std::printf("%s criterion %d (%s): %s [%.3g s, limit %g s]\n", tag, c.id, c.name, o.detail.c_str(), secs,
                c.time_limit_s);
    failed += o.status == Status::kFail;
    skipped += o.status == Status::kSkip;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 1;
  }
  if (failed) return 1;
  return skipped == ran ? 77 : 0;
}
