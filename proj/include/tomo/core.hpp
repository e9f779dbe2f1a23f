#pragma once

// Shared value types for the reconstruction toolkit: image grids, sinograms,
// detector-axis spectra, frequency supports and run configuration.
//
// Conventions fixed here and inherited by every other module:
//   - images are square, row-major (y-major, then x), pixel (0,0) top-left,
//     grid center at pixel coordinate ((n-1)/2, (n-1)/2);
//   - detector bin i sits at signed offset (i - (N_d-1)/2) * detector_spacing
//     from the rotation axis;
//   - all internal arithmetic is 64-bit; containers on disk store 32-bit.
//
// Types are immutable after construction and safe to share across threads.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tomo {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double l2_diff_norm(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "l2_diff_norm: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Square real-valued pixel grid. Row-major, y-major then x.
class ImageGrid {
 public:
  ImageGrid(int size_n, double pixel_size = 1.0)
      : size_n_(size_n), pixel_size_(pixel_size) {
    validate_dims();
    values_.assign(std::size_t(size_n_) * size_n_, 0.0);
  }

  ImageGrid(int size_n, double pixel_size, std::vector<double> values)
      : size_n_(size_n), pixel_size_(pixel_size), values_(std::move(values)) {
    validate_dims();
    require(values_.size() == std::size_t(size_n_) * size_n_,
            "ImageGrid: values must have size_n^2 entries");
    require(all_finite(values_), "ImageGrid: values must be finite");
  }

  int size_n() const { return size_n_; }
  double pixel_size() const { return pixel_size_; }
  const std::vector<double>& values() const { return values_; }

  double at(int ix, int iy) const { return values_[std::size_t(iy) * size_n_ + ix]; }

  /// Continuous pixel-center coordinate of index i (same rule for x and y).
  double coord(int i) const { return (i - center()) * pixel_size_; }
  double center() const { return 0.5 * (size_n_ - 1); }

  bool same_shape(const ImageGrid& o) const {
    return size_n_ == o.size_n_ && pixel_size_ == o.pixel_size_;
  }

 private:
  void validate_dims() const {
    require(size_n_ > 0, "ImageGrid: size_n must be positive");
    require(std::isfinite(pixel_size_) && pixel_size_ > 0,
            "ImageGrid: pixel_size must be positive");
  }

  int size_n_;
  double pixel_size_;
  std::vector<double> values_;
};

/// Strictly increasing tilt angles in degrees, each in (-90, 90].
class AngleSet {
 public:
  explicit AngleSet(std::vector<double> angles_deg) : deg_(std::move(angles_deg)) {
    require(!deg_.empty(), "AngleSet: must not be empty");
    for (std::size_t i = 0; i < deg_.size(); ++i) {
      require(std::isfinite(deg_[i]), "AngleSet: angles must be finite");
      require(deg_[i] > -90.0 && deg_[i] <= 90.0, "AngleSet: angles must lie in (-90, 90]");
      if (i > 0) require(deg_[i] > deg_[i - 1], "AngleSet: angles must be strictly increasing");
    }
  }

  int size() const { return int(deg_.size()); }
  double deg(int i) const { return deg_[i]; }
  double rad(int i) const { return deg_[i] * std::numbers::pi / 180.0; }
  const std::vector<double>& degrees() const { return deg_; }

  bool operator==(const AngleSet& o) const { return deg_ == o.deg_; }

 private:
  std::vector<double> deg_;
};

/// Projection data p(r, theta) on an N_d x N_theta lattice, detector-major.
class Sinogram {
 public:
  Sinogram(int n_detectors, AngleSet angles, double detector_spacing,
           std::vector<double> values)
      : n_detectors_(n_detectors),
        angles_(std::move(angles)),
        detector_spacing_(detector_spacing),
        values_(std::move(values)) {
    require(n_detectors_ > 0, "Sinogram: n_detectors must be positive");
    require(std::isfinite(detector_spacing_) && detector_spacing_ > 0,
            "Sinogram: detector_spacing must be positive");
    require(values_.size() == std::size_t(n_detectors_) * angles_.size(),
            "Sinogram: values must have n_detectors * n_angles entries");
    require(all_finite(values_), "Sinogram: values must be finite");
  }

  Sinogram(int n_detectors, AngleSet angles, double detector_spacing)
      : Sinogram(n_detectors, angles, detector_spacing,
                 std::vector<double>(std::size_t(n_detectors) * angles.size(), 0.0)) {}

  int n_detectors() const { return n_detectors_; }
  int n_angles() const { return angles_.size(); }
  const AngleSet& angles() const { return angles_; }
  double detector_spacing() const { return detector_spacing_; }
  const std::vector<double>& values() const { return values_; }

  double at(int detector, int angle) const {
    return values_[std::size_t(detector) * n_angles() + angle];
  }

  /// Signed offset of detector bin i from the rotation axis.
  double offset(int i) const { return (i - 0.5 * (n_detectors_ - 1)) * detector_spacing_; }

  bool same_shape(const Sinogram& o) const {
    return n_detectors_ == o.n_detectors_ && detector_spacing_ == o.detector_spacing_ &&
           angles_ == o.angles_;
  }

 private:
  int n_detectors_;
  AngleSet angles_;
  double detector_spacing_;
  std::vector<double> values_;
};

/// Complex 1-D DFT coefficients c(omega, theta) of a sinogram along the
/// detector axis, frequency-major. n_freq may exceed n_detectors when the
/// transform was zero-padded; n_detectors remembers the original length.
class SpectralSinogram {
 public:
  SpectralSinogram(int n_freq, int n_detectors, double detector_spacing, AngleSet angles,
                   std::vector<std::complex<double>> coeffs)
      : n_freq_(n_freq),
        n_detectors_(n_detectors),
        detector_spacing_(detector_spacing),
        angles_(std::move(angles)),
        coeffs_(std::move(coeffs)) {
    require(n_freq_ > 0, "SpectralSinogram: n_freq must be positive");
    require(n_detectors_ > 0 && n_detectors_ <= n_freq_,
            "SpectralSinogram: n_detectors must be in [1, n_freq]");
    require(std::isfinite(detector_spacing_) && detector_spacing_ > 0,
            "SpectralSinogram: detector_spacing must be positive");
    require(coeffs_.size() == std::size_t(n_freq_) * angles_.size(),
            "SpectralSinogram: coeffs must have n_freq * n_angles entries");
    for (const auto& c : coeffs_)
      require(std::isfinite(c.real()) && std::isfinite(c.imag()),
              "SpectralSinogram: coeffs must be finite");
  }

  int n_freq() const { return n_freq_; }
  int n_detectors() const { return n_detectors_; }
  int n_angles() const { return angles_.size(); }
  const AngleSet& angles() const { return angles_; }
  double detector_spacing() const { return detector_spacing_; }
  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

  std::complex<double> at(int bin, int angle) const {
    return coeffs_[std::size_t(bin) * n_angles() + angle];
  }

  /// Signed frequency of DFT bin m in cycles per unit length.
  double frequency(int m) const {
    const int n = n_freq_;
    const int s = (m <= n / 2) ? m : m - n;
    return s / (n * detector_spacing_);
  }

  double nyquist() const { return 0.5 / detector_spacing_; }

  /// Bin holding the mirrored frequency -omega of bin m.
  int pair_bin(int m) const { return m == 0 ? 0 : n_freq_ - m; }

  /// Relative Hermitian-symmetry defect, 0 for spectra of real sinograms.
  double hermitian_defect() const {
    double num = 0.0, den = 0.0;
    for (int m = 0; m < n_freq_; ++m) {
      const int p = pair_bin(m);
      for (int a = 0; a < n_angles(); ++a) {
        num += std::norm(at(p, a) - std::conj(at(m, a)));
        den += std::norm(at(m, a));
      }
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
  }

 private:
  int n_freq_;
  int n_detectors_;
  double detector_spacing_;
  AngleSet angles_;
  std::vector<std::complex<double>> coeffs_;
};

/// Selected frequency subset W with its threshold and selection trace.
/// Invariant: bins == { i : energies[i] >= lambda } (hard thresholding),
/// which keeps Hermitian pairs together because paired bins of a real
/// sinogram spectrum carry equal energy.
struct FrequencySupport {
  std::vector<std::int32_t> bins;    // sorted ascending
  double lambda = 0.0;               // threshold on per-bin energies
  std::vector<double> energies;      // alpha_i per bin, size |Omega|
  std::vector<double> gmdl_scores;   // score per candidate k (index k), NaN where undefined
  int k_star = 0;                    // selected cardinality before tie extension

  int num_bins() const { return int(energies.size()); }

  bool contains(int bin) const {
    return std::binary_search(bins.begin(), bins.end(), std::int32_t(bin));
  }

  std::vector<std::uint8_t> mask() const {
    std::vector<std::uint8_t> m(energies.size(), 0);
    for (auto b : bins) m[std::size_t(b)] = 1;
    return m;
  }
};

enum class Method { FBP, SFBP, SIRT, FSIRT, SFSIRT };
enum class FilterTag { RamLak, Hann, Cosine, Sparse };
enum class GmdlNorm { Paper, Rss };

std::string to_string(Method m);
std::string to_string(FilterTag f);

inline std::string to_string(Method m) {
  switch (m) {
    case Method::FBP: return "fbp";
    case Method::SFBP: return "sfbp";
    case Method::SIRT: return "sirt";
    case Method::FSIRT: return "fsirt";
    case Method::SFSIRT: return "sfsirt";
  }
  return "?";
}

inline std::string to_string(FilterTag f) {
  switch (f) {
    case FilterTag::RamLak: return "ramlak";
    case FilterTag::Hann: return "hann";
    case FilterTag::Cosine: return "cosine";
    case FilterTag::Sparse: return "sparse";
  }
  return "?";
}

/// Reconstruction run configuration. Defaults satisfy validate().
struct ReconConfig {
  Method method = Method::FBP;
  FilterTag filter_kind = FilterTag::RamLak;
  int max_iters = 100;
  double stop_eps = 1e-3;      // relative L2 change between iterates
  double relaxation = 1.0;     // SIRT step size with normalized operators
  long long rng_seed = 0;
  GmdlNorm gmdl_norm = GmdlNorm::Paper;
  bool freeze_support = false;  // sfSIRT: select W once on the first residual
};

/// Checks field invariants and method/filter compatibility.
inline void validate(const ReconConfig& c) {
  require(c.max_iters >= 1, "max_iters: must be >= 1");
  require(std::isfinite(c.stop_eps) && c.stop_eps > 0.0, "stop_eps: must be > 0");
  require(std::isfinite(c.relaxation) && c.relaxation > 0.0, "relaxation: must be > 0");
  const bool sparse = c.filter_kind == FilterTag::Sparse;
  switch (c.method) {
    case Method::FBP:
    case Method::FSIRT:
      require(!sparse, "filter_kind: Sparse is only meaningful inside sfbp/sfsirt");
      break;
    case Method::SIRT:
      // plain backprojection, filter_kind unused
      require(!sparse, "filter_kind: Sparse is only meaningful inside sfbp/sfsirt");
      break;
    case Method::SFBP:
    case Method::SFSIRT:
      require(sparse, "filter_kind: sfbp/sfsirt select their own sparse filter");
      break;
  }
  if (c.freeze_support)
    require(c.method == Method::SFSIRT, "freeze_support: only applies to sfsirt");
}

}  // namespace tomo
