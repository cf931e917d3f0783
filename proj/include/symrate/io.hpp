#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "symrate/errors.hpp"
#include "symrate/stream.hpp"

namespace symrate::io {

/// Reads a whole file as bytes.
inline std::vector<char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Alphabet map: one symbol label per line, in index order. Lines are taken
/// verbatim apart from a trailing '\r', so a line holding a single space is
/// the label " ". Empty lines are skipped.
inline Alphabet read_alphabet_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open alphabet map '" + path.string() + "'");
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) labels.push_back(line);
  }
  return Alphabet(std::move(labels));
}

inline void write_alphabet_map(const std::filesystem::path& path, const Alphabet& a) {
  std::ofstream out(path);
  if (!out) throw invalid_input("cannot write alphabet map '" + path.string() + "'");
  for (const auto& l : a.labels()) out << l << '\n';
}

/// Sidecar path used when no alphabet map is given explicitly.
inline std::filesystem::path default_alphabet_path(const std::filesystem::path& symbols) {
  auto p = symbols;
  p += ".alphabet";
  return p;
}

/// Raw symbol file: one byte per symbol index.
inline SymbolStream read_symbol_file(const std::filesystem::path& path, const Alphabet& alphabet) {
  const auto bytes = read_bytes(path);
  std::vector<Symbol> data(bytes.begin(), bytes.end());
  return SymbolStream(alphabet, std::move(data));
}

inline void write_symbol_file(const std::filesystem::path& path, const SymbolStream& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot write '" + path.string() + "'");
  const auto d = s.data();
  out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size()));
}

}  // namespace symrate::io
