#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "symrate/errors.hpp"
#include "symrate/stream.hpp"

namespace symrate {

using StateDistribution = std::vector<double>;
using TransformationMatrix = Eigen::MatrixXd;

/// Probabilistic finite state automaton: deterministic transitions
/// delta(q, σ) and emission probabilities pi(q, σ). No initial or final
/// states. Construction does not validate; see validate().
class Pfsa {
 public:
  Pfsa(Alphabet alphabet, std::size_t n_states, std::vector<std::size_t> delta, std::vector<double> pi)
      : alphabet_(std::move(alphabet)), n_(n_states), delta_(std::move(delta)), pi_(std::move(pi)) {
    const auto cells = n_ * alphabet_.size();
    if (n_ == 0) throw invalid_input("pfsa needs at least one state");
    if (delta_.size() != cells || pi_.size() != cells)
      throw invalid_input("pfsa tables must have n_states x alphabet_size entries");
  }

  std::size_t n_states() const noexcept { return n_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }

  std::size_t next(std::size_t q, Symbol s) const { return delta_[q * alphabet_.size() + s]; }
  double prob(std::size_t q, Symbol s) const { return pi_[q * alphabet_.size() + s]; }
  std::span<const double> emission(std::size_t q) const {
    return std::span<const double>(pi_).subspan(q * alphabet_.size(), alphabet_.size());
  }

 private:
  Alphabet alphabet_;
  std::size_t n_;
  std::vector<std::size_t> delta_;
  std::vector<double> pi_;
};

struct ValidationReport {
  bool ok = true;
  std::string message;
  explicit operator bool() const noexcept { return ok; }
};

/// Checks every Pfsa invariant; the report names the first violation.
inline ValidationReport validate(const Pfsa& p) {
  const auto n = p.n_states();
  const auto k = p.alphabet_size();
  for (std::size_t q = 0; q < n; ++q) {
    double row = 0.0;
    for (Symbol s = 0; s < k; ++s) {
      const double v = p.prob(q, s);
      if (!(v >= 0.0 && v <= 1.0))
        return {false, "probability out of [0,1] at state " + std::to_string(q) + ", symbol " +
                           p.alphabet().label(s)};
      if (p.next(q, s) >= n)
        return {false, "transition from state " + std::to_string(q) + " on symbol " +
                           p.alphabet().label(s) + " targets missing state " + std::to_string(p.next(q, s))};
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12)
      return {false, "row-stochastic violation: probabilities of state " + std::to_string(q) + " sum to " +
                         std::to_string(row)};
  }

  // Strong connectivity over arcs that can actually be taken.
  auto reaches_all = [&](bool reverse) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (std::size_t q = 0; q < n; ++q)
        for (Symbol s = 0; s < k; ++s) {
          if (p.prob(q, s) <= 0.0) continue;
          const auto src = reverse ? p.next(q, s) : q;
          const auto dst = reverse ? q : p.next(q, s);
          if (src == u && !seen[dst]) {
            seen[dst] = 1;
            stack.push_back(dst);
          }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  if (!reaches_all(false) || !reaches_all(true)) return {false, "not strongly connected"};
  return {};
}

inline void require_valid(const Pfsa& p) {
  if (auto r = validate(p); !r) throw invalid_input("invalid pfsa: " + r.message);
}

/// Induced Markov matrix M_ij = sum of pi(q_i, σ) over σ with delta(q_i, σ) = q_j.
inline Eigen::MatrixXd transition_matrix(const Pfsa& p) {
  const auto n = static_cast<Eigen::Index>(p.n_states());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < p.n_states(); ++q)
    for (Symbol s = 0; s < p.alphabet_size(); ++s)
      m(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p.next(q, s))) += p.prob(q, s);
  return m;
}

/// Gamma_σ: entry (i, j) is pi(q_i, σ) when delta(q_i, σ) = q_j.
inline TransformationMatrix gamma(const Pfsa& p, Symbol s) {
  if (s >= p.alphabet_size()) throw invalid_input("symbol outside the pfsa alphabet");
  const auto n = static_cast<Eigen::Index>(p.n_states());
  TransformationMatrix g = TransformationMatrix::Zero(n, n);
  for (std::size_t q = 0; q < p.n_states(); ++q)
    g(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(p.next(q, s))) = p.prob(q, s);
  return g;
}

namespace detail {

inline constexpr std::size_t kDenseStationaryLimit = 64;

inline double stationary_residual(const Eigen::MatrixXd& m, const Eigen::RowVectorXd& v) {
  return (v * m - v).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Left fixed vector of the induced Markov matrix, normalized to sum 1.
/// Dense solve up to 64 states, power iteration on the lazy chain above.
inline StateDistribution stationary_distribution(const Pfsa& p) {
  require_valid(p);
  const Eigen::MatrixXd m = transition_matrix(p);
  const auto n = m.rows();
  Eigen::RowVectorXd v(n);

  if (static_cast<std::size_t>(n) <= detail::kDenseStationaryLimit) {
    // (M^T - I) v^T = 0 with the last equation replaced by sum(v) = 1.
    Eigen::MatrixXd a = m.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    v = a.fullPivLu().solve(b).transpose();
  } else {
    const Eigen::MatrixXd lazy = 0.5 * (m + Eigen::MatrixXd::Identity(n, n));
    v = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
    constexpr int kMaxIterations = 1'000'000;
    int it = 0;
    for (; it < kMaxIterations; ++it) {
      Eigen::RowVectorXd next = v * lazy;
      const double delta = (next - v).cwiseAbs().maxCoeff();
      v = next;
      if (delta < 1e-15) break;
    }
    if (it == kMaxIterations) throw numeric_error("stationary distribution: power iteration did not converge");
  }

  v = v.cwiseMax(0.0);
  v /= v.sum();
  if (detail::stationary_residual(m, v) > 1e-10)
    throw numeric_error("stationary distribution: residual above 1e-10");
  return StateDistribution(v.data(), v.data() + n);
}

/// Entropy rate in bits: stationary-weighted mean of per-state emission entropies.
inline double analytical_entropy_rate(const Pfsa& p) {
  const auto w = stationary_distribution(p);
  double h = 0.0;
  for (std::size_t q = 0; q < p.n_states(); ++q) h += w[q] * entropy(p.emission(q));
  return h;
}

/// Mixture of emission rows weighted by d.
inline Distribution symbol_distribution(const Pfsa& p, std::span<const double> d) {
  if (d.size() != p.n_states()) throw invalid_input("state distribution has the wrong size");
  std::vector<double> out(p.alphabet_size(), 0.0);
  for (std::size_t q = 0; q < p.n_states(); ++q)
    for (Symbol s = 0; s < p.alphabet_size(); ++s) out[s] += d[q] * p.prob(q, s);
  double sum = 0.0;
  for (double v : out) sum += v;
  for (double& v : out) v /= sum;
  return Distribution(std::move(out));
}

/// Applies d <- d Gamma_σ / |d Gamma_σ|_1 for each symbol of x in turn.
inline StateDistribution evolve(const Pfsa& p, std::span<const double> d, std::span<const Symbol> x) {
  if (d.size() != p.n_states()) throw invalid_input("state distribution has the wrong size");
  StateDistribution cur(d.begin(), d.end());
  StateDistribution next(p.n_states());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Symbol s = x[i];
    if (s >= p.alphabet_size()) throw invalid_input("symbol outside the pfsa alphabet");
    std::fill(next.begin(), next.end(), 0.0);
    double mass = 0.0;
    for (std::size_t q = 0; q < p.n_states(); ++q) {
      const double w = cur[q] * p.prob(q, s);
      next[p.next(q, s)] += w;
      mass += w;
    }
    if (!(mass > 0.0))
      throw impossible_evolution("string has probability zero at position " + std::to_string(i));
    for (double& v : next) v /= mass;
    cur.swap(next);
  }
  return cur;
}

/// Draws n symbols along the automaton. The start state is q_init when
/// given, otherwise a draw from the stationary distribution.
inline SymbolStream simulate(const Pfsa& p, std::size_t n, std::uint64_t seed,
                             std::optional<std::size_t> q_init = std::nullopt) {
  require_valid(p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto draw = [&](std::span<const double> weights) {
    const double u = unit(rng);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last = i;
      acc += weights[i];
      if (u < acc) return i;
    }
    return last;
  };

  std::size_t q;
  if (q_init) {
    if (*q_init >= p.n_states()) throw invalid_input("initial state out of range");
    q = *q_init;
  } else {
    const auto w = stationary_distribution(p);
    q = draw(w);
  }

  std::vector<Symbol> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<Symbol>(draw(p.emission(q)));
    out.push_back(s);
    q = p.next(q, s);
  }
  return SymbolStream(p.alphabet(), std::move(out));
}

// ---------------------------------------------------------------------------
// The two-state binary machines used throughout the tests and benchmarks.
// ---------------------------------------------------------------------------

namespace machines {

/// q0: 0|0.85 -> q0, 1|0.15 -> q1; q1: 0|0.25 -> q0, 1|0.75 -> q1.
/// The last symbol always identifies the state.
inline Pfsa synchronizable() {
  return Pfsa(Alphabet::of_size(2), 2, {0, 1, 0, 1}, {0.85, 0.15, 0.25, 0.75});
}

/// q0: 0|0.85 -> q0, 1|0.15 -> q1; q1: 0|0.25 -> q1, 1|0.75 -> q0.
/// Symbol 1 toggles the state, so no finite history pins it down.
inline Pfsa non_synchronizable() {
  return Pfsa(Alphabet::of_size(2), 2, {0, 1, 1, 0}, {0.85, 0.15, 0.25, 0.75});
}

/// Single state emitting symbols i.i.d. with the given probabilities.
inline Pfsa iid(const Distribution& d) {
  const auto k = d.size();
  return Pfsa(Alphabet::of_size(k), 1, std::vector<std::size_t>(k, 0),
              std::vector<double>(d.probs().begin(), d.probs().end()));
}

}  // namespace machines

}  // namespace symrate
