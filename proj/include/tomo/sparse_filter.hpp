#pragma once

// Data-dependent sparse filtered backprojection (sFBP): pick the frequency
// support W of the backprojection filter by hard thresholding per-frequency
// energies, with the threshold chosen by the gMDL model-selection score.
//
// Per-bin energies are alpha_i = sum_theta |c(omega_i, theta)|^2. For a
// fixed threshold lambda, W = { i : alpha_i >= lambda } minimizes
//   sum_{omega not in W} sum_theta |c|^2  +  lambda * |W|
// over all subsets of the frequency grid. Candidate thresholds are the
// energies themselves, ordered descending; gMDL scores the top-k choice as
//   gMDL(k) = (|Omega|/2) log( R_k / (|Omega|-k) )
//           + (k/2) log( (S_k/k) / (R_k/(|Omega|-k)) )
//           + log|Omega|
// where S_k and R_k are the selected / residual norms, accumulated from the
// ramp-weighted energies by Parseval. Norms enter unsquared by default
// (GmdlNorm::Paper); GmdlNorm::Rss uses the summed squares instead.
//
// Both terms work with per-coefficient means (Hansen & Yu's form). A raw
// residual norm in the first log would shrink without bound as k grows and
// drag the argmin to k = |Omega|-1 on any noisy spectrum; the mean form has
// its minimum at the signal/noise knee.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "tomo/core.hpp"
#include "tomo/spectral.hpp"

namespace tomo {

/// alpha_i = sum over angles of |c(omega_i, theta_j)|^2, one entry per bin.
inline std::vector<double> spectral_energy(const SpectralSinogram& sp) {
  const int nf = sp.n_freq();
  const int na = sp.n_angles();
  std::vector<double> alpha(nf, 0.0);
  for (int m = 0; m < nf; ++m) {
    double s = 0.0;
    for (int a = 0; a < na; ++a) s += std::norm(sp.at(m, a));
    alpha[std::size_t(m)] = s;
  }
  return alpha;
}

/// Hard thresholding: support = { i : energies[i] >= lambda }.
inline FrequencySupport threshold_support(const std::vector<double>& energies, double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0, "threshold_support: lambda must be >= 0");
  require(all_finite(energies), "threshold_support: energies must be finite");
  FrequencySupport fs;
  fs.energies = energies;
  fs.lambda = lambda;
  for (std::size_t i = 0; i < energies.size(); ++i)
    if (energies[i] >= lambda) fs.bins.push_back(std::int32_t(i));
  fs.k_star = int(fs.bins.size());
  return fs;
}

/// gMDL score of keeping the k largest energies out of |Omega| =
/// sorted_energies.size(). Energies must be sorted descending and already
/// carry whatever weighting the caller wants in the norms.
inline double gmdl_score(int k, std::span<const double> sorted_energies, double total_energy,
                         GmdlNorm norm = GmdlNorm::Paper) {
  const int n = int(sorted_energies.size());
  require(k >= 1 && k <= n - 1, "gmdl_score: k must lie in [1, |Omega|-1]");
  double s2 = 0.0;
  for (int i = 0; i < k; ++i) s2 += sorted_energies[std::size_t(i)];
  const double r2 = total_energy - s2;
  if (!(r2 > 0.0))
    throw std::runtime_error(
        "gmdl_score: zero residual; full support is exact, use the lambda = 0 path");
  const double s = norm == GmdlNorm::Paper ? std::sqrt(s2) : s2;
  const double r = norm == GmdlNorm::Paper ? std::sqrt(r2) : r2;
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  const double r_mean = r / (n - k);
  const double s_mean = s / k;
  return 0.5 * n * std::log(r_mean) + 0.5 * k * std::log(s_mean / r_mean) + std::log(double(n));
}

struct SelectOptions {
  GmdlNorm norm = GmdlNorm::Paper;
  bool ramp_weighted = true;                  // weight energies by omega^2 in the gMDL norms
  std::optional<double> lambda_override;      // skip selection, threshold directly
};

/// Selects the frequency support of the sparse filter: sorts energies
/// descending (ties broken by lower bin index), scores every admissible
/// k in [1, |Omega|-1], and thresholds at lambda = alpha_{i(k*)}. Ties at
/// exactly lambda extend the support so the hard-thresholding identity
/// holds verbatim.
inline FrequencySupport select_support(const SpectralSinogram& sp,
                                       const SelectOptions& opt = {}) {
  const int nf = sp.n_freq();
  const std::vector<double> alpha = spectral_energy(sp);

  double total_alpha = 0.0;
  for (double a : alpha) total_alpha += a;
  require(total_alpha > 0.0, "select_support: empty signal (all-zero spectrum)");

  if (opt.lambda_override.has_value()) return threshold_support(alpha, *opt.lambda_override);

  // Paired bins of a real-input spectrum carry bit-identical energies, so
  // thresholding keeps Hermitian pairs together by itself.
  for (int m = 0; m < nf; ++m)
    require(alpha[std::size_t(m)] == alpha[std::size_t(sp.pair_bin(m))],
            "select_support: spectrum is not Hermitian (paired energies differ)");

  std::vector<double> weighted(alpha.size());
  for (int m = 0; m < nf; ++m) {
    const double w = opt.ramp_weighted ? sp.frequency(m) * sp.frequency(m) : 1.0;
    weighted[std::size_t(m)] = alpha[std::size_t(m)] * w;
  }

  std::vector<int> order(alpha.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (alpha[std::size_t(a)] != alpha[std::size_t(b)]) return alpha[std::size_t(a)] > alpha[std::size_t(b)];
    return a < b;
  });

  double total_weighted = 0.0;
  for (double w : weighted) total_weighted += w;

  FrequencySupport fs;
  fs.energies = alpha;
  fs.gmdl_scores.assign(alpha.size(), std::numeric_limits<double>::quiet_NaN());

  int k_star = -1;
  double best = std::numeric_limits<double>::infinity();
  double prefix = 0.0;
  for (int k = 1; k <= nf - 1; ++k) {
    prefix += weighted[std::size_t(order[std::size_t(k - 1)])];
    const double s2 = prefix;
    const double r2 = total_weighted - prefix;
    if (!(r2 > 0.0)) {
      // residual is (numerically) zero: the top-k bins reconstruct exactly,
      // which dominates any finite score
      fs.gmdl_scores[std::size_t(k)] = -std::numeric_limits<double>::infinity();
      k_star = k;
      break;
    }
    const double s = opt.norm == GmdlNorm::Paper ? std::sqrt(s2) : s2;
    const double r = opt.norm == GmdlNorm::Paper ? std::sqrt(r2) : r2;
    double score;
    if (!(s > 0.0)) {
      score = std::numeric_limits<double>::infinity();  // e.g. DC-only under ramp weighting
    } else {
      const double r_mean = r / (nf - k);
      const double s_mean = s / k;
      score = 0.5 * nf * std::log(r_mean) + 0.5 * k * std::log(s_mean / r_mean) +
              std::log(double(nf));
    }
    fs.gmdl_scores[std::size_t(k)] = score;
    if (score < best) {
      best = score;
      k_star = k;
    }
  }
  require(k_star >= 1, "select_support: no admissible support candidate");

  fs.k_star = k_star;
  fs.lambda = alpha[std::size_t(order[std::size_t(k_star - 1)])];
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] >= fs.lambda) fs.bins.push_back(std::int32_t(i));
  return fs;
}

struct SfbpResult {
  ImageGrid image;
  FrequencySupport support;
};

/// Sparse filtered backprojection: transform, select the support on the
/// padded grid, reconstruct with the masked ramp filter.
inline SfbpResult sfbp_reconstruct(const Sinogram& s, const ProjectionGeometry& g,
                                   const SelectOptions& opt = {}) {
  const auto spec = dft_detector_axis(s, fbp_padded_length(s.n_detectors()));
  FrequencySupport support = select_support(spec, opt);
  ImageGrid img = fbp_from_spectrum(spec, Filter::sparse(support), g);
  return {std::move(img), std::move(support)};
}

}  // namespace tomo
