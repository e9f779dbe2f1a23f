#pragma once

// Benchmark harness: runs a grid of (phantom, noise level, angle range,
// seed, method) cells and emits one CSV row per cell with psnr, ssim,
// iteration count and wall time.
//
// Config files are plain key=value lines ('#' comments allowed):
//   phantoms=threedot,shepplogan      size=128
//   P=1e3,3.1623e5                    r=65,90        step=1
//   seeds=1..10 (or 1,2,3)            methods=fbp,sfbp,sirt,fsirt,sfsirt
//   filter=ramlak                     fsirt_filter=cosine
//   max_iters=100  eps=1e-3  relax=1  noise=scaled   detectors=0
//
// Rows are sorted by (method, scenario, seed); reruns with the same config
// are byte-identical. The noisy sinogram for a (scenario, seed) cell is
// shared across methods so per-seed comparisons are paired.

#include <chrono>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tomo/core.hpp"
#include "tomo/io.hpp"
#include "tomo/iterative.hpp"
#include "tomo/metrics.hpp"
#include "tomo/simulation.hpp"
#include "tomo/sparse_filter.hpp"
#include "tomo/spectral.hpp"

namespace tomo {

struct BenchConfig {
  std::vector<std::string> phantoms;
  int size = 128;
  std::vector<std::string> p_tokens;
  std::vector<double> p_values;
  std::vector<std::string> r_tokens;
  std::vector<double> r_values;
  double step = 1.0;
  std::vector<long long> seeds;
  std::vector<std::string> methods;
  FilterTag fbp_filter = FilterTag::RamLak;
  FilterTag fsirt_filter = FilterTag::Cosine;
  int max_iters = 100;
  double eps = 1e-3;
  double relax = 1.0;
  NoiseModel noise = NoiseModel::PoissonScaled;
  int detectors = 0;  // 0 = default for the image size
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    require(pos == s.size(), "bench config: bad number for " + key);
    return v;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("bench config: bad number for " + key + ": '" + s + "'");
  }
}

inline FilterTag parse_filter(const std::string& s) {
  if (s == "ramlak") return FilterTag::RamLak;
  if (s == "hann") return FilterTag::Hann;
  if (s == "cosine") return FilterTag::Cosine;
  throw std::invalid_argument("bench config: unknown filter '" + s + "'");
}

inline PhantomKind parse_phantom(const std::string& s) {
  if (s == "box") return PhantomKind::Box;
  if (s == "threedot") return PhantomKind::ThreeDot;
  if (s == "shepplogan") return PhantomKind::SheppLogan;
  if (s == "thoraxlike") return PhantomKind::ThoraxLike;
  throw std::invalid_argument("unknown phantom '" + s + "'");
}

}  // namespace detail

inline BenchConfig parse_bench_config(std::istream& in) {
  BenchConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "bench config: expected key=value at line " + std::to_string(lineno));
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);

    if (key == "phantoms") {
      cfg.phantoms = detail::split_list(val);
      for (const auto& p : cfg.phantoms) detail::parse_phantom(p);
    } else if (key == "size") {
      cfg.size = int(detail::parse_double(val, key));
    } else if (key == "P") {
      cfg.p_tokens = detail::split_list(val);
      cfg.p_values.clear();
      for (const auto& t : cfg.p_tokens) cfg.p_values.push_back(detail::parse_double(t, key));
    } else if (key == "r") {
      cfg.r_tokens = detail::split_list(val);
      cfg.r_values.clear();
      for (const auto& t : cfg.r_tokens) cfg.r_values.push_back(detail::parse_double(t, key));
    } else if (key == "step") {
      cfg.step = detail::parse_double(val, key);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      const auto dots = val.find("..");
      if (dots != std::string::npos) {
        const long long a = (long long)detail::parse_double(val.substr(0, dots), key);
        const long long b = (long long)detail::parse_double(val.substr(dots + 2), key);
        require(a <= b, "bench config: empty seed range");
        for (long long s = a; s <= b; ++s) cfg.seeds.push_back(s);
      } else {
        for (const auto& t : detail::split_list(val))
          cfg.seeds.push_back((long long)detail::parse_double(t, key));
      }
    } else if (key == "methods") {
      cfg.methods = detail::split_list(val);
    } else if (key == "filter") {
      cfg.fbp_filter = detail::parse_filter(val);
    } else if (key == "fsirt_filter") {
      cfg.fsirt_filter = detail::parse_filter(val);
    } else if (key == "max_iters") {
      cfg.max_iters = int(detail::parse_double(val, key));
    } else if (key == "eps") {
      cfg.eps = detail::parse_double(val, key);
    } else if (key == "relax") {
      cfg.relax = detail::parse_double(val, key);
    } else if (key == "noise") {
      if (val == "scaled") cfg.noise = NoiseModel::PoissonScaled;
      else if (val == "transmission") cfg.noise = NoiseModel::PoissonTransmission;
      else throw std::invalid_argument("bench config: unknown noise model '" + val + "'");
    } else if (key == "detectors") {
      cfg.detectors = int(detail::parse_double(val, key));
    } else {
      throw std::invalid_argument("bench config: unknown key '" + key + "'");
    }
  }
  require(!cfg.phantoms.empty(), "bench config: phantoms missing");
  require(!cfg.p_tokens.empty(), "bench config: P missing");
  require(!cfg.r_tokens.empty(), "bench config: r missing");
  require(!cfg.seeds.empty(), "bench config: seeds missing");
  require(!cfg.methods.empty(), "bench config: methods missing");
  return cfg;
}

struct BenchRow {
  std::string method;
  std::string scenario;
  long long seed = 0;
  double psnr_db = 0.0;
  double ssim_val = 0.0;
  int iterations = 0;
  bool iterative = false;
  double wall_ms = 0.0;
};

inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (std::size_t pi = 0; pi < cfg.phantoms.size(); ++pi) {
    const PhantomKind kind = detail::parse_phantom(cfg.phantoms[pi]);
    const ImageGrid truth = make_phantom(kind, cfg.size);
    const double L = [&] {
      const auto& v = truth.values();
      return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
    }();
    for (std::size_t ri = 0; ri < cfg.r_tokens.size(); ++ri) {
      const ProjectionGeometry geom = ProjectionGeometry::for_image(
          truth, open_range_angles(cfg.r_values[ri], cfg.step),
          cfg.detectors > 0 ? std::optional<int>(cfg.detectors) : std::nullopt);
      const Sinogram clean = radon_forward(truth, geom);
      for (std::size_t qi = 0; qi < cfg.p_tokens.size(); ++qi) {
        const std::string scenario = cfg.phantoms[pi] + "_n" + std::to_string(cfg.size) +
                                     "_P" + cfg.p_tokens[qi] + "_r" + cfg.r_tokens[ri];
        for (long long seed : cfg.seeds) {
          const Sinogram noisy =
              add_poisson_noise(clean, {cfg.noise, cfg.p_values[qi], seed});
          for (const auto& method : cfg.methods) {
            BenchRow row;
            row.method = method;
            row.scenario = scenario;
            row.seed = seed;
            const auto t0 = std::chrono::steady_clock::now();
            ImageGrid rec(1);
            if (method == "fbp") {
              rec = fbp_reconstruct(noisy, Filter::classical(cfg.fbp_filter), geom);
            } else if (method == "sfbp") {
              rec = sfbp_reconstruct(noisy, geom).image;
            } else if (method == "sirt" || method == "fsirt" || method == "sfsirt") {
              ReconConfig rc;
              rc.method = method == "sirt" ? Method::SIRT
                          : method == "fsirt" ? Method::FSIRT
                                              : Method::SFSIRT;
              rc.filter_kind = method == "sfsirt" ? FilterTag::Sparse
                               : method == "fsirt" ? cfg.fsirt_filter
                                                   : FilterTag::RamLak;
              rc.max_iters = cfg.max_iters;
              rc.stop_eps = cfg.eps;
              rc.relaxation = cfg.relax;
              rc.rng_seed = seed;
              const ReconReport rep = run_iterative(noisy, geom, rc);
              rec = rep.image;
              row.iterations = rep.iterations;
              row.iterative = true;
            } else {
              throw std::invalid_argument("bench: unknown method '" + method + "'");
            }
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            row.psnr_db = psnr(rec, truth);
            row.ssim_val = ssim(rec, truth, L);
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.method != b.method) return a.method < b.method;
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    return a.seed < b.seed;
  });
  return rows;
}

inline void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const auto& r : rows) {
    cells.push_back({r.method, r.scenario, std::to_string(r.seed), fmt_fixed(r.psnr_db, 6),
                     fmt_fixed(r.ssim_val, 6), r.iterative ? std::to_string(r.iterations) : "",
                     fmt_fixed(r.wall_ms, 3)});
  }
  write_csv(os, {"method", "scenario", "seed", "psnr_db", "ssim", "iterations", "wall_ms"},
            cells);
}

}  // namespace tomo
