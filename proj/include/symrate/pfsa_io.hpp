#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "symrate/errors.hpp"
#include "symrate/pfsa.hpp"

namespace symrate::io {

// Text format:
//
//   pfsa <n_states> <symbol> <symbol> ...
//   <src_state> <symbol> <dst_state> <probability>
//   ...
//
// One arc line per (state, symbol) pair. Blank lines and '#' comments are
// ignored.

inline Pfsa parse_pfsa(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) -> invalid_input {
    return invalid_input("pfsa line " + std::to_string(lineno) + ": " + what);
  };
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_content_line()) throw invalid_input("pfsa: empty input");
  const std::size_t header_line = lineno;
  std::istringstream header(line);
  std::string tag;
  long long n_states = -1;
  header >> tag >> n_states;
  if (tag != "pfsa" || !header || n_states <= 0)
    throw fail("expected header 'pfsa <n_states> <symbols...>'");
  std::vector<std::string> labels;
  for (std::string l; header >> l;) labels.push_back(l);
  std::optional<Alphabet> alphabet;
  try {
    alphabet.emplace(labels);
  } catch (const invalid_input& e) {
    throw fail(e.what());
  }

  const auto n = static_cast<std::size_t>(n_states);
  const auto k = alphabet->size();
  std::vector<std::size_t> delta(n * k, 0);
  std::vector<double> pi(n * k, 0.0);
  std::vector<std::size_t> defined_at(n * k, 0);

  while (next_content_line()) {
    std::istringstream arc(line);
    long long src = -1, dst = -1;
    std::string sym;
    double prob = -1.0;
    arc >> src >> sym >> dst >> prob;
    std::string extra;
    if (!arc || (arc >> extra)) throw fail("expected '<src_state> <symbol> <dst_state> <probability>'");
    if (src < 0 || static_cast<std::size_t>(src) >= n) throw fail("source state out of range");
    if (dst < 0 || static_cast<std::size_t>(dst) >= n) throw fail("destination state out of range");
    auto s = alphabet->find(sym);
    if (!s) throw fail("symbol '" + sym + "' is not declared in the header");
    if (!(prob >= 0.0 && prob <= 1.0)) throw fail("probability outside [0,1]");
    const auto cell = static_cast<std::size_t>(src) * k + *s;
    if (defined_at[cell] != 0)
      throw fail("duplicate arc (also on line " + std::to_string(defined_at[cell]) + ")");
    defined_at[cell] = lineno;
    delta[cell] = static_cast<std::size_t>(dst);
    pi[cell] = prob;
  }

  for (std::size_t q = 0; q < n; ++q)
    for (std::size_t s = 0; s < k; ++s)
      if (defined_at[q * k + s] == 0)
        throw invalid_input("pfsa: missing arc for state " + std::to_string(q) + ", symbol " +
                            alphabet->label(static_cast<Symbol>(s)));

  for (std::size_t q = 0; q < n; ++q) {
    double row = 0.0;
    std::size_t last = 0;
    for (std::size_t s = 0; s < k; ++s) {
      row += pi[q * k + s];
      last = std::max(last, defined_at[q * k + s]);
    }
    if (std::abs(row - 1.0) > 1e-12) {
      lineno = last;
      throw fail("row-stochastic violation: probabilities of state " + std::to_string(q) + " sum to " +
                 std::to_string(row));
    }
  }

  Pfsa p(*alphabet, n, std::move(delta), std::move(pi));
  if (auto r = validate(p); !r) {
    lineno = header_line;
    throw fail(r.message);
  }
  return p;
}

inline Pfsa parse_pfsa(const std::string& text) {
  std::istringstream in(text);
  return parse_pfsa(in);
}

inline void write_pfsa(std::ostream& out, const Pfsa& p) {
  out << "pfsa " << p.n_states();
  for (const auto& l : p.alphabet().labels()) out << ' ' << l;
  out << '\n';
  out.precision(17);
  for (std::size_t q = 0; q < p.n_states(); ++q)
    for (Symbol s = 0; s < p.alphabet_size(); ++s)
      out << q << ' ' << p.alphabet().label(s) << ' ' << p.next(q, s) << ' ' << p.prob(q, s) << '\n';
}

}  // namespace symrate::io
