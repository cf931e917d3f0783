#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "symrate/errors.hpp"

namespace symrate {

/// Largest entropy gap between two distributions on k symbols whose
/// sup-distance is at most ε. Symmetric about ε = 1/2; zero at 0 and 1.
inline double gen_binary_entropy(double epsilon, std::size_t k) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw invalid_input("epsilon must lie in [0,1]");
  if (k < 2) throw invalid_input("alphabet size must be at least 2");
  const double e = std::min(epsilon, 1.0 - epsilon);
  if (e <= 0.0) return 0.0;
  return e * std::log2(static_cast<double>(k - 1) / e) + (1.0 - e) * std::log2(1.0 / (1.0 - e));
}

struct UncertaintyBound {
  double epsilon_star = 1.0;
  double E = 0.0;
  /// E was capped at log2 k, or no ε0 in (0,1) satisfies the inequality.
  bool vacuous = false;
};

struct BoundTerms {
  double c0;
  double c1;
};

inline BoundTerms bound_constants(std::size_t k) {
  const double e = std::numbers::e;
  const double lk = std::log2(static_cast<double>(k));
  return {(8.0 / e + 8.0 / (e * e)) * static_cast<double>(k - 1), 2.0 / (lk * lk)};
}

/// Left-hand side of the confidence inequality at ε0. Either of `samples`
/// or `p0` may be +inf to drop its term.
inline double bound_lhs(double eps0, double stream_length, std::size_t k, double alpha, double samples, double p0) {
  const auto [c0, c1] = bound_constants(k);
  const double e3 = eps0 * eps0 * eps0;
  return alpha + c0 * (1.0 + eps0 * eps0) / (stream_length * e3) + 2.0 * std::exp(-c1 * samples * eps0 * eps0) +
         std::exp(-eps0 * p0 * stream_length);
}

/// Smallest ε0 satisfying the inequality, and E = ε★ + 2𝔅(ε★, k) capped at
/// log2 k. Every penalty term falls as ε0 grows, so the feasible set is an
/// interval reaching up to 1.
inline UncertaintyBound solve_uncertainty(double stream_length, std::size_t k, double alpha, double samples,
                                          double p0) {
  if (!(stream_length > 0.0) || !(samples > 0.0) || !(p0 > 0.0))
    throw invalid_input("stream length, sample count and p0 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_input("alpha must lie in (0,1)");
  if (k < 2) throw invalid_input("alphabet size must be at least 2");

  const double cap = std::log2(static_cast<double>(k));
  auto feasible = [&](double e) { return bound_lhs(e, stream_length, k, alpha, samples, p0) <= 1.0; };

  constexpr double kLo = 1e-6, kHi = 1.0 - 1e-6;
  if (!feasible(kHi)) return {kHi, cap, true};

  // Log grid from kLo upward for the first feasible point.
  constexpr int kGrid = 400;
  const double step = std::log(kHi / kLo) / kGrid;
  double lo = 0.0, hi = kLo;
  if (!feasible(kLo)) {
    lo = kLo;
    for (int i = 1; i <= kGrid; ++i) {
      hi = i == kGrid ? kHi : kLo * std::exp(step * i);
      if (feasible(hi)) break;
      lo = hi;
    }
  }
  // Bisect the lower boundary; 200 halvings bottom out at double resolution.
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (feasible(mid) ? hi : lo) = mid;
  }

  const double E = hi + 2.0 * gen_binary_entropy(hi, k);
  if (E >= cap) return {hi, cap, true};
  return {hi, E, false};
}

/// (|s|, E) per requested length.
inline std::vector<std::pair<double, double>> bound_curve(std::size_t k, double alpha, double samples, double p0,
                                                          std::span<const double> lengths) {
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(lengths[i] > 0.0)) throw invalid_input("lengths must be positive");
    if (i > 0 && !(lengths[i] > lengths[i - 1])) throw invalid_input("lengths must be ascending");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(lengths.size());
  for (double n : lengths) out.emplace_back(n, solve_uncertainty(n, k, alpha, samples, p0).E);
  return out;
}

/// |D| at which the sample term stops mattering: 1e7 · log2²k.
inline double recommended_sample_size(std::size_t k) {
  const double lk = std::log2(static_cast<double>(k));
  return 1e7 * lk * lk;
}

}  // namespace symrate
