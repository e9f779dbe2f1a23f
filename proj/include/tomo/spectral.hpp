#pragma once

// Detector-axis DFT, classical frequency-domain filters and filtered
// backprojection.
//
// The DFT is unitary (1/sqrt(N) both ways). Spectra of real sinograms are
// made exactly Hermitian by mirroring the lower half, so paired bins carry
// bit-identical energies. Filtered backprojection zero-pads the detector
// axis to the next power of two >= 2*N_d before transforming to suppress
// circular-convolution wrap; frequency supports for the sparse filter live
// on that padded grid.
//
// Scaling: with the unitary convention and physical bin frequencies
// omega_m (cycles per unit length), the ramp-filtered projection is exactly
// idft(|omega| * dft(p)), and the image is the backprojection of that
// scaled by (pi / N_theta) * (detector_spacing / pixel_size^2) - the
// angular quadrature weight times the geometry factor of the adjoint-pair
// backprojector.

#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "tomo/core.hpp"
#include "tomo/fft.hpp"
#include "tomo/projection.hpp"

namespace tomo {

/// Frequency-domain filter: a classical window or a sparse support mask.
struct Filter {
  FilterTag tag = FilterTag::RamLak;
  std::optional<FrequencySupport> support;  // required iff tag == Sparse

  static Filter ram_lak() { return {FilterTag::RamLak, std::nullopt}; }
  static Filter hann() { return {FilterTag::Hann, std::nullopt}; }
  static Filter cosine() { return {FilterTag::Cosine, std::nullopt}; }
  static Filter sparse(FrequencySupport s) { return {FilterTag::Sparse, std::move(s)}; }
  static Filter classical(FilterTag t) {
    require(t != FilterTag::Sparse, "Filter: sparse needs a FrequencySupport");
    return {t, std::nullopt};
  }
};

/// Ramp-based filter weight at signed frequency f; even in f, zero at f=0.
inline double filter_weight(FilterTag tag, double freq, double nyquist) {
  const double a = std::abs(freq);
  switch (tag) {
    case FilterTag::RamLak:
      return a;
    case FilterTag::Hann:
      return a * 0.5 * (1.0 + std::cos(std::numbers::pi * freq / nyquist));
    case FilterTag::Cosine:
      return a * std::cos(std::numbers::pi * freq / (2.0 * nyquist));
    case FilterTag::Sparse:
      break;
  }
  throw std::invalid_argument("filter_weight: sparse filters carry their own mask");
}

/// Padded transform length used by the FBP pipeline.
inline int fbp_padded_length(int n_detectors) {
  int n = 1;
  while (n < 2 * n_detectors) n <<= 1;
  return n;
}

/// Per-angle unitary DFT along the detector axis, zero-padded to n_freq.
/// Output is exactly Hermitian (lower half mirrored).
inline SpectralSinogram dft_detector_axis(const Sinogram& s, int n_freq) {
  require(n_freq >= s.n_detectors(), "dft_detector_axis: n_freq must be >= n_detectors");
  const int nd = s.n_detectors();
  const int na = s.n_angles();
  const int nf = n_freq;
  const double scale = 1.0 / std::sqrt(double(nf));
  std::vector<std::complex<double>> coeffs(std::size_t(nf) * na);

#pragma omp parallel for schedule(static)
  for (int a = 0; a < na; ++a) {
    std::vector<std::complex<double>> buf(nf, {0.0, 0.0});
    for (int d = 0; d < nd; ++d) buf[d] = s.at(d, a);
    detail::dft_inplace(buf, false);
    buf[0] = {buf[0].real() * scale, 0.0};
    if (nf % 2 == 0) buf[nf / 2] = {buf[nf / 2].real() * scale, 0.0};
    for (int m = 1; m < (nf + 1) / 2; ++m) {
      buf[m] *= scale;
      buf[nf - m] = std::conj(buf[m]);
    }
    for (int m = 0; m < nf; ++m) coeffs[std::size_t(m) * na + a] = buf[m];
  }
  return SpectralSinogram(nf, nd, s.detector_spacing(), s.angles(), std::move(coeffs));
}

inline SpectralSinogram dft_detector_axis(const Sinogram& s) {
  return dft_detector_axis(s, s.n_detectors());
}

/// Inverse of dft_detector_axis; recovers the first n_detectors samples.
/// Rejects inputs whose inverse has a relative imaginary residue above 1e-6
/// (i.e. spectra that are not Hermitian).
inline Sinogram idft_detector_axis(const SpectralSinogram& sp) {
  const int nf = sp.n_freq();
  const int nd = sp.n_detectors();
  const int na = sp.n_angles();
  const double scale = 1.0 / std::sqrt(double(nf));
  std::vector<double> vals(std::size_t(nd) * na, 0.0);
  double imag_sq = 0.0, total_sq = 0.0;

  for (int a = 0; a < na; ++a) {
    std::vector<std::complex<double>> buf(nf);
    for (int m = 0; m < nf; ++m) buf[m] = sp.at(m, a);
    detail::dft_inplace(buf, true);
    for (int m = 0; m < nf; ++m) {
      buf[m] *= scale;
      imag_sq += buf[m].imag() * buf[m].imag();
      total_sq += std::norm(buf[m]);
    }
    for (int d = 0; d < nd; ++d) vals[std::size_t(d) * na + a] = buf[d].real();
  }
  if (imag_sq > 1e-12 * total_sq)
    throw std::invalid_argument("idft_detector_axis: spectrum is not Hermitian");
  return Sinogram(nd, sp.angles(), sp.detector_spacing(), std::move(vals));
}

/// Scales every coefficient by the filter weight w(omega). Hermitian
/// symmetry is preserved (all weights are even in omega).
inline SpectralSinogram apply_filter(const SpectralSinogram& sp, const Filter& filt) {
  const int nf = sp.n_freq();
  const int na = sp.n_angles();
  std::vector<double> w(nf);
  if (filt.tag == FilterTag::Sparse) {
    require(filt.support.has_value(), "apply_filter: sparse filter without support");
    require(filt.support->num_bins() == nf,
            "apply_filter: support bin count differs from n_freq");
    const auto mask = filt.support->mask();
    for (int m = 0; m < nf; ++m)
      w[m] = mask[std::size_t(m)] ? std::abs(sp.frequency(m)) : 0.0;
  } else {
    for (int m = 0; m < nf; ++m) w[m] = filter_weight(filt.tag, sp.frequency(m), sp.nyquist());
  }
  std::vector<std::complex<double>> coeffs(std::size_t(nf) * na);
  for (int m = 0; m < nf; ++m)
    for (int a = 0; a < na; ++a)
      coeffs[std::size_t(m) * na + a] = sp.at(m, a) * w[m];
  return SpectralSinogram(nf, sp.n_detectors(), sp.detector_spacing(), sp.angles(),
                          std::move(coeffs));
}

/// Filtered backprojection of an already-transformed sinogram.
inline ImageGrid fbp_from_spectrum(const SpectralSinogram& spec, const Filter& filt,
                                   const ProjectionGeometry& g) {
  const Sinogram filtered = idft_detector_axis(apply_filter(spec, filt));
  const ImageGrid b = backproject(filtered, g);
  const double scale = (std::numbers::pi / g.angles.size()) *
                       (g.detector_spacing / (g.pixel_size * g.pixel_size));
  std::vector<double> vals = b.values();
  for (double& v : vals) v *= scale;
  return ImageGrid(b.size_n(), b.pixel_size(), std::move(vals));
}

/// Standard filtered backprojection. Sparse filters must be defined on the
/// padded grid (fbp_padded_length bins).
inline ImageGrid fbp_reconstruct(const Sinogram& s, const Filter& filt,
                                 const ProjectionGeometry& g) {
  const auto spec = dft_detector_axis(s, fbp_padded_length(s.n_detectors()));
  return fbp_from_spectrum(spec, filt, g);
}

}  // namespace tomo
