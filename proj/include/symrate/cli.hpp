#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "symrate/bounds.hpp"
#include "symrate/errors.hpp"
#include "symrate/estimator.hpp"
#include "symrate/generators.hpp"
#include "symrate/io.hpp"
#include "symrate/lz.hpp"
#include "symrate/manifest.hpp"
#include "symrate/pfsa.hpp"
#include "symrate/pfsa_io.hpp"
#include "symrate/stream.hpp"
#include "symrate/sync.hpp"

namespace symrate::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInsufficient = 2 };

namespace detail {

inline std::string num(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string brief(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Round-trippable form for manifests.
inline std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw invalid_input(what + ": cannot parse '" + text + "' as a number");
  }
}

inline std::uint64_t parse_count(const std::string& text, const std::string& what) {
  const double v = parse_double(text, what);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e18) throw invalid_input(what + ": '" + text + "' is not a positive integer");
  return static_cast<std::uint64_t>(v);
}

/// Where a stream comes from: a file on disk or one of the generators.
struct SourceOptions {
  std::string source = "file";
  std::string input;
  std::string alphabet_map;
  std::string machine = "sync";
  std::string pfsa_file;
  double r = 1.7499;
  double x0 = 0.1;
  std::uint64_t burn_in = 10'000;
  std::vector<double> probs{0.5, 0.5};
  std::string length = "30000";
  std::uint64_t seed = 1;

  void add_to(CLI::App& app, bool generator_default) {
    if (generator_default) source = "pfsa";
    app.add_option("--source", source, "file | text | pfsa | chaos | iid")
        ->check(CLI::IsMember({"file", "text", "pfsa", "chaos", "iid"}))
        ->capture_default_str();
    app.add_option("--input", input, "symbol file (file source) or corpus (text source)");
    app.add_option("--alphabet-map", alphabet_map, "label file; default <input>.alphabet");
    app.add_option("--machine", machine, "built-in pfsa: sync | nonsync")
        ->check(CLI::IsMember({"sync", "nonsync"}))
        ->capture_default_str();
    app.add_option("--pfsa", pfsa_file, "pfsa description file (overrides --machine)");
    app.add_option("--r", r, "map parameter")->capture_default_str();
    app.add_option("--x0", x0, "map initial condition")->capture_default_str();
    app.add_option("--burn-in", burn_in, "map iterations discarded")->capture_default_str();
    app.add_option("--probs", probs, "i.i.d. symbol probabilities")->delimiter(',');
    app.add_option("--length,-n", length, "generated stream length")->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();
  }

  /// Loads or generates the stream and records how in the manifest.
  /// `reference` receives the analytical rate when the source is a pfsa.
  SymbolStream load(RunManifest& m, std::optional<double>* reference = nullptr) const {
    m.set("source", source);
    if (source == "file" || source == "text") {
      if (input.empty()) throw invalid_input("--input is required for source '" + source + "'");
      const auto bytes = io::read_bytes(input);
      const auto digest =
          hex64(fnv1a(std::span(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size())));
      m.set("input", input).set("input_digest", digest);
      if (source == "text") return normalize_text(std::string_view(bytes.data(), bytes.size()));
      const auto map_path = alphabet_map.empty() ? io::default_alphabet_path(input) : std::filesystem::path(alphabet_map);
      if (!std::filesystem::exists(map_path))
        throw invalid_input("alphabet map '" + map_path.string() + "' not found (pass --alphabet-map)");
      const auto alpha = io::read_alphabet_map(map_path);
      m.set("alphabet_map", map_path.string()).set("alphabet_digest", hex64(fnv1a(io_text(map_path))));
      return SymbolStream(alpha, std::vector<Symbol>(bytes.begin(), bytes.end()));
    }
    const auto n = parse_count(length, "--length");
    m.set("length", std::to_string(n)).set("seed", std::to_string(seed));
    if (source == "pfsa") {
      std::optional<Pfsa> p;
      if (!pfsa_file.empty()) {
        std::ifstream in(pfsa_file);
        if (!in) throw invalid_input("cannot open '" + pfsa_file + "'");
        p.emplace(io::parse_pfsa(in));
        m.set("pfsa", pfsa_file).set("pfsa_digest", hex64(fnv1a(io_text(pfsa_file))));
      } else {
        p.emplace(machine == "sync" ? machines::synchronizable() : machines::non_synchronizable());
        m.set("machine", machine);
      }
      if (reference) *reference = analytical_entropy_rate(*p);
      return simulate(*p, n, seed);
    }
    if (source == "chaos") {
      m.set("r", exact(r)).set("x0", exact(x0)).set("burn_in", std::to_string(burn_in));
      return chaotic_stream({r, x0, burn_in, n});
    }
    // iid
    std::string ps;
    for (double p : probs) ps += (ps.empty() ? "" : ",") + exact(p);
    m.set("probs", ps);
    const Distribution d(probs);
    if (reference) *reference = entropy(d);
    return iid_stream(d, n, seed);
  }

 private:
  static std::string io_text(const std::filesystem::path& p) {
    const auto b = io::read_bytes(p);
    return std::string(b.begin(), b.end());
  }
};

struct EstimatorOptions {
  EstimatorConfig cfg;
  std::uint64_t samples = 0;
  std::optional<std::size_t> ext_max, ext_min;
  bool no_widen = false;

  void add_to(CLI::App& app, bool with_seed) {
    app.add_option("--epsilon", cfg.epsilon, "tolerance in (0,1)")->capture_default_str();
    app.add_option("--alpha", cfg.alpha, "confidence level in (0,1)")->capture_default_str();
    app.add_option("--samples", samples, "extension sample size |D| (default 1e7 log2^2 k)");
    app.add_option("--ext-max", ext_max, "longest extension (default round(12 / log2 k))");
    app.add_option("--ext-min", ext_min, "shortest extension (default ceil(ext-max / 2))");
    app.add_option("--nmin", cfg.n_min, "minimum occurrences of x0 x")->capture_default_str();
    if (with_seed) app.add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
    app.add_flag("--strict-vertices", no_widen, "only exact hull vertices may serve as x0");
  }

  EstimatorConfig resolved(std::size_t k) const {
    EstimatorConfig c = cfg;
    c.sample_size = samples;
    if (ext_max) c.max_extension_length = *ext_max;
    if (ext_min) c.min_extension_length = *ext_min;
    c.widen = !no_widen;
    return c.resolved(k);
  }

  void record(RunManifest& m, const EstimatorConfig& c) const {
    // threads are left out: they never change the output.
    m.set("epsilon", exact(c.epsilon))
        .set("alpha", exact(c.alpha))
        .set("samples", std::to_string(c.sample_size))
        .set("ext", std::to_string(c.min_extension_length) + ".." + std::to_string(c.max_extension_length))
        .set("nmin", std::to_string(c.n_min))
        .set("sample_seed", std::to_string(c.seed))
        .set("widen", c.widen ? "1" : "0");
  }
};

/// stdout unless --out names a file.
class Sink {
 public:
  Sink(std::ostream& fallback, const std::string& path) : out_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw invalid_input("cannot write '" + path + "'");
      out_ = file_.get();
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ostream* out_;
  std::unique_ptr<std::ofstream> file_;
};

inline std::vector<std::uint64_t> parse_checkpoints(const std::vector<std::string>& raw) {
  std::vector<std::uint64_t> out;
  for (const auto& s : raw)
    if (!s.empty()) out.push_back(parse_count(s, "--checkpoints"));
  if (out.empty()) throw invalid_input("--checkpoints: at least one length is required");
  return out;
}

}  // namespace detail

/// Runs the tool; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Entropy rate of symbolic streams with explicit uncertainty bounds", "symrate"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string out_path;
  bool tsv = false;

  // estimate ------------------------------------------------------------
  auto* est = app.add_subcommand("estimate", "entropy rate and uncertainty of a stream");
  detail::SourceOptions est_src;
  detail::EstimatorOptions est_opt;
  std::string method = "paper";
  est->add_option("--input", est_src.input, "symbol file, or corpus with --text")->required();
  est->add_option("--alphabet-map", est_src.alphabet_map, "label file; default <input>.alphabet");
  bool text_mode = false;
  est->add_flag("--text", text_mode, "read --input as text and normalize to a-z plus space");
  est->add_option("--method", method, "paper | lz78 | lz76")
      ->check(CLI::IsMember({"paper", "lz78", "lz76"}))
      ->capture_default_str();
  est->add_flag("--tsv", tsv, "print one tab-separated result line");
  est->add_option("--out", out_path, "write output here instead of stdout");
  est_opt.add_to(*est, true);

  // sync ----------------------------------------------------------------
  auto* syn = app.add_subcommand("sync", "synchronizing string search only");
  detail::SourceOptions syn_src;
  detail::EstimatorOptions syn_opt;
  syn->add_option("--input", syn_src.input, "symbol file, or corpus with --text")->required();
  syn->add_option("--alphabet-map", syn_src.alphabet_map, "label file; default <input>.alphabet");
  bool syn_text = false;
  syn->add_flag("--text", syn_text, "read --input as text");
  syn->add_option("--out", out_path, "write output here instead of stdout");
  syn->add_option("--epsilon", syn_opt.cfg.epsilon, "tolerance in (0,1)")->capture_default_str();
  syn->add_option("--alpha", syn_opt.cfg.alpha, "confidence level in (0,1)")->capture_default_str();
  syn->add_option("--nmin", syn_opt.cfg.n_min, "minimum occurrences")->capture_default_str();
  syn->add_flag("--strict-vertices", syn_opt.no_widen, "only exact hull vertices may serve as x0");

  // bounds --------------------------------------------------------------
  auto* bnd = app.add_subcommand("bounds", "uncertainty E against stream length");
  std::size_t bk = 2;
  std::vector<double> alphas{0.95};
  std::vector<std::string> lengths_raw;
  double from = 1e3, to = 1e9;
  std::size_t points = 25;
  std::string samples_raw, p0_raw = "inf";
  bnd->add_option("--k", bk, "alphabet size")->capture_default_str();
  bnd->add_option("--alpha", alphas, "confidence levels")->delimiter(',');
  bnd->add_option("--lengths", lengths_raw, "explicit stream lengths")->delimiter(',');
  bnd->add_option("--from", from, "smallest length of the log grid")->capture_default_str();
  bnd->add_option("--to", to, "largest length of the log grid")->capture_default_str();
  bnd->add_option("--points", points, "log grid size")->capture_default_str();
  bnd->add_option("--samples", samples_raw, "|D|; default 1e7 log2^2 k, 'inf' drops the term");
  bnd->add_option("--p0", p0_raw, "occurrence probability of x0; 'inf' drops the term")->capture_default_str();
  bnd->add_option("--out", out_path, "write output here instead of stdout");

  // benchmark -----------------------------------------------------------
  auto* bench = app.add_subcommand("benchmark", "estimator and LZ baselines on growing prefixes");
  detail::SourceOptions bench_src;
  detail::EstimatorOptions bench_opt;
  std::vector<std::string> checkpoints_raw;
  bench_src.add_to(*bench, true);
  bench_opt.add_to(*bench, false);
  bench->add_option("--checkpoints", checkpoints_raw, "prefix lengths, ascending")->delimiter(',')->required();
  bench->add_option("--out", out_path, "write output here instead of stdout");

  // generate ------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "write a symbol file and its alphabet map");
  detail::SourceOptions gen_src;
  gen_src.add_to(*gen, true);
  gen->add_option("--out", out_path, "symbol file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    app.exit(e, err, err);
    return kUsage;
  }

  try {
    if (*est || *syn) {
      const bool is_est = est->parsed();
      auto& src = is_est ? est_src : syn_src;
      src.source = (is_est ? text_mode : syn_text) ? "text" : "file";
      RunManifest m{is_est ? "estimate" : "sync", {}};
      const auto s = src.load(m);
      const std::size_t k = s.alphabet().size();
      detail::Sink sink(out, out_path);
      auto& o = *sink;

      if (is_est && method != "paper") {
        m.set("method", method);
        const double h = method == "lz78" ? lz78_entropy_estimate(s) : lz76_entropy_estimate(s);
        if (tsv) {
          o << "# manifest " << m.digest() << "\n# method\th\tstream_length\n";
          o << method << '\t' << detail::num(h) << '\t' << s.size() << '\n';
        } else {
          o << "# manifest " << m.digest() << '\n';
          o << "method         " << method << '\n';
          o << "stream_length  " << s.size() << '\n';
          o << "h              " << detail::num(h) << " bits/symbol\n";
        }
        return kOk;
      }

      if (!is_est) {
        auto cfg = syn_opt.cfg;
        cfg.validate();
        const auto len = candidate_length(cfg.epsilon, k, cfg.length_cap);
        const auto t = build_count_table(s, len);
        m.set("epsilon", detail::exact(cfg.epsilon))
            .set("alpha", detail::exact(cfg.alpha))
            .set("nmin", std::to_string(cfg.n_min))
            .set("widen", syn_opt.no_widen ? "0" : "1");
        const auto heap = build_heap(t, len, heap_min_count(cfg.epsilon, cfg.alpha, cfg.n_min));
        const auto r = select_sync_string(heap, t, cfg.epsilon,
                                          syn_opt.no_widen ? std::nullopt : std::optional<double>(cfg.alpha));
        o << "# manifest " << m.digest() << '\n';
        o << "x0             " << s.alphabet().display(r.x0) << '\n';
        o << "p0             " << detail::num(r.p0) << '\n';
        o << "x0_count       " << r.x0_count << '\n';
        o << "heap_size      " << heap.size() << '\n';
        o << "max_length     " << len << '\n';
        o << "# hull vertices: word\tcount\tderivative\n";
        for (const auto& [w, d] : r.hull_vertices) {
          o << s.alphabet().display(w) << '\t' << heap.entries.at(w).count;
          for (double v : d.probs()) o << '\t' << detail::num(v);
          o << '\n';
        }
        return kOk;
      }

      const auto cfg = est_opt.resolved(k);
      m.set("method", "paper");
      est_opt.record(m, cfg);
      const auto r = estimate_entropy_rate(s, cfg);
      const auto x0 = s.alphabet().display(r.x0);
      if (tsv) {
        o << "# manifest " << m.digest() << '\n';
        o << "# h\tE\talpha\tepsilon_star\tx0\tp0\tsamples_used\tstream_length\n";
        o << detail::num(r.h) << '\t' << detail::num(r.E) << '\t' << detail::brief(r.alpha) << '\t'
          << detail::num(r.epsilon_star, 9) << '\t' << x0 << '\t' << detail::num(r.p0) << '\t' << r.samples_used
          << '\t' << r.stream_length << '\n';
      } else {
        o << "# manifest " << m.digest() << '\n';
        o << "method             paper\n";
        o << "stream_length      " << r.stream_length << '\n';
        o << "alphabet_size      " << k << '\n';
        o << "h                  " << detail::num(r.h) << " bits/symbol\n";
        o << "E                  " << detail::num(r.E) << " bits/symbol"
          << (r.vacuous ? "  (vacuous: capped at log2 k)" : "") << '\n';
        o << "alpha              " << detail::brief(r.alpha) << '\n';
        o << "epsilon            " << detail::brief(r.epsilon) << '\n';
        o << "epsilon_star       " << detail::num(r.epsilon_star, 9) << '\n';
        o << "x0                 " << x0 << '\n';
        o << "p0                 " << detail::num(r.p0) << '\n';
        o << "samples_used       " << r.samples_used << '\n';
        o << "samples_discarded  " << r.samples_discarded << '\n';
        o << "clusters           " << r.clusters << '\n';
        o << "extension_lengths  " << r.min_extension_length << ".." << r.max_extension_length << '\n';
      }
      return kOk;
    }

    if (*bnd) {
      if (bk < 2 || bk > 256) throw invalid_input("--k must lie in [2, 256]");
      if (alphas.empty()) throw invalid_input("--alpha needs at least one level");
      std::vector<double> lengths;
      if (!lengths_raw.empty()) {
        for (const auto& s : lengths_raw) lengths.push_back(detail::parse_double(s, "--lengths"));
      } else {
        if (!(from > 0.0 && to > from) || points < 2) throw invalid_input("need 0 < --from < --to and --points >= 2");
        for (std::size_t i = 0; i < points; ++i)
          lengths.push_back(std::round(from * std::pow(to / from, static_cast<double>(i) / (points - 1))));
      }
      const double samples =
          samples_raw.empty() ? recommended_sample_size(bk) : detail::parse_double(samples_raw, "--samples");
      const double p0 = detail::parse_double(p0_raw, "--p0");
      RunManifest m{"bounds", {}};
      m.set("k", std::to_string(bk)).set("samples", detail::exact(samples)).set("p0", detail::exact(p0));
      std::string as, ls;
      for (double a : alphas) as += (as.empty() ? "" : ",") + detail::exact(a);
      for (double l : lengths) ls += (ls.empty() ? "" : ",") + detail::exact(l);
      m.set("alpha", as).set("lengths", ls);

      std::vector<std::vector<std::pair<double, double>>> curves;
      for (double a : alphas) curves.push_back(bound_curve(bk, a, samples, p0, lengths));
      detail::Sink sink(out, out_path);
      auto& o = *sink;
      o << "# manifest " << m.digest() << "  k=" << bk << " samples=" << detail::brief(samples)
        << " p0=" << detail::brief(p0) << '\n';
      o << "# length";
      for (double a : alphas) o << "\tE_alpha=" << detail::brief(a);
      o << '\n';
      for (std::size_t i = 0; i < lengths.size(); ++i) {
        o << detail::num(lengths[i], 0);
        for (const auto& c : curves) o << '\t' << detail::num(c[i].second);
        o << '\n';
      }
      return kOk;
    }

    if (*bench) {
      const auto cps = detail::parse_checkpoints(checkpoints_raw);
      RunManifest m{"benchmark", {}};
      std::optional<double> reference;
      const auto s = bench_src.load(m, &reference);
      if (cps.back() > s.size())
        throw invalid_input("checkpoint " + std::to_string(cps.back()) + " exceeds the stream length " +
                            std::to_string(s.size()));
      auto cfg = bench_opt.resolved(s.alphabet().size());
      cfg.seed = bench_src.seed;
      bench_opt.record(m, cfg);
      std::string cs;
      for (auto c : cps) cs += (cs.empty() ? "" : ",") + std::to_string(c);
      m.set("checkpoints", cs);

      const auto lz = lz76_curve(s, cps);
      const auto lz78 = lz78_curve(s, cps);
      detail::Sink sink(out, out_path);
      auto& o = *sink;
      o << "# manifest " << m.digest();
      if (reference) o << "  reference_h=" << detail::num(*reference);
      o << '\n';
      o << "# length\th_main\tE_main\th_lz\th_lz78\n";
      for (std::size_t i = 0; i < cps.size(); ++i) {
        double h = std::numeric_limits<double>::quiet_NaN(), e = h;
        try {
          const auto r = estimate_entropy_rate(s.prefix(cps[i]), cfg);
          h = r.h;
          e = r.E;
        } catch (const insufficient_data&) {
          // short prefixes: reported as nan
        }
        o << cps[i] << '\t' << detail::num(h) << '\t' << detail::num(e) << '\t' << detail::num(lz[i].second)
          << '\t' << detail::num(lz78[i].second) << '\n';
      }
      return kOk;
    }

    if (*gen) {
      RunManifest m{"generate", {}};
      const auto s = gen_src.load(m);
      io::write_symbol_file(out_path, s);
      io::write_alphabet_map(io::default_alphabet_path(out_path), s.alphabet());
      out << "wrote " << s.size() << " symbols to " << out_path << " (alphabet map "
          << io::default_alphabet_path(out_path).string() << ", manifest " << m.digest() << ")\n";
      return kOk;
    }
  } catch (const insufficient_data& e) {
    err << "symrate: insufficient data: " << e.what() << '\n';
    return kInsufficient;
  } catch (const std::exception& e) {
    err << "symrate: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace symrate::cli
