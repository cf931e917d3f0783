#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "symrate/errors.hpp"
#include "symrate/stream.hpp"

namespace symrate {

/// x <- 1 - r x^2, read through the sign partition at 0.
struct ChaoticMapConfig {
  double r = 1.7499;
  double x0 = 0.1;
  std::uint64_t burn_in = 10'000;
  std::uint64_t n = 100'000;
};

/// Emits 1 when the iterate is >= 0, else 0, after discarding burn_in steps.
inline SymbolStream chaotic_stream(const ChaoticMapConfig& cfg) {
  if (!(cfg.r > 0.0 && cfg.r <= 2.0)) throw invalid_input("map parameter r must lie in (0, 2]");
  if (!(cfg.x0 > -1.0 && cfg.x0 < 1.0)) throw invalid_input("initial condition must lie in (-1, 1)");
  double x = cfg.x0;
  auto step = [&](std::uint64_t i) {
    x = 1.0 - cfg.r * x * x;
    if (!(std::abs(x) <= 1.0 + 1e-9))
      throw invalid_input("iterate left [-1, 1] at step " + std::to_string(i) + " (r = " + std::to_string(cfg.r) + ")");
  };
  for (std::uint64_t i = 0; i < cfg.burn_in; ++i) step(i);
  std::vector<Symbol> out(cfg.n);
  for (std::uint64_t i = 0; i < cfg.n; ++i) {
    step(cfg.burn_in + i);
    out[i] = x >= 0.0 ? 1 : 0;
  }
  return SymbolStream(Alphabet::of_size(2), std::move(out));
}

/// n independent draws from p over symbols 0..k-1.
inline SymbolStream iid_stream(const Distribution& p, std::uint64_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<unsigned> draw(p.probs().begin(), p.probs().end());
  std::vector<Symbol> out(n);
  for (auto& v : out) v = static_cast<Symbol>(draw(rng));
  return SymbolStream(Alphabet::of_size(p.size()), std::move(out));
}

/// a..z followed by the space symbol.
inline Alphabet text_alphabet() {
  std::vector<std::string> labels;
  for (char c = 'a'; c <= 'z'; ++c) labels.emplace_back(1, c);
  labels.emplace_back(" ");
  return Alphabet(std::move(labels));
}

/// ASCII letters lowercased; each run of other bytes becomes one space;
/// no leading or trailing space.
inline SymbolStream normalize_text(std::string_view bytes) {
  constexpr Symbol kSpace = 26;
  std::vector<Symbol> out;
  out.reserve(bytes.size());
  bool gap = false;
  for (unsigned char c : bytes) {
    Symbol sym;
    if (c >= 'a' && c <= 'z') sym = static_cast<Symbol>(c - 'a');
    else if (c >= 'A' && c <= 'Z') sym = static_cast<Symbol>(c - 'A');
    else {
      gap = true;
      continue;
    }
    if (gap && !out.empty()) out.push_back(kSpace);
    gap = false;
    out.push_back(sym);
  }
  return SymbolStream(text_alphabet(), std::move(out));
}

}  // namespace symrate
