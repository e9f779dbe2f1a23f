#pragma once

// Phantom generation, Poisson noise injection and limited-angle scenario
// construction.
//
// Phantom geometries are fixed (see docs/phantoms.md for the exact
// rectangle/ellipse tables) so that every number derived from them is
// reproducible. All generators are deterministic; noise is driven by an
// explicit per-call seed with no global state.

#include <cmath>
#include <random>
#include <vector>

#include "tomo/core.hpp"
#include "tomo/projection.hpp"

namespace tomo {

enum class PhantomKind { Box, ThreeDot, SheppLogan, ThoraxLike };

inline std::string to_string(PhantomKind k) {
  switch (k) {
    case PhantomKind::Box: return "box";
    case PhantomKind::ThreeDot: return "threedot";
    case PhantomKind::SheppLogan: return "shepplogan";
    case PhantomKind::ThoraxLike: return "thoraxlike";
  }
  return "?";
}

enum class NoiseModel { PoissonScaled, PoissonTransmission };

struct NoiseSpec {
  NoiseModel model = NoiseModel::PoissonScaled;
  double intensity_P = 1e5;
  long long seed = 0;
};

namespace detail {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;

  bool contains(double u, double v) const {
    const double phi = phi_deg * std::numbers::pi / 180.0;
    const double du = u - x0, dv = v - y0;
    const double eu = du * std::cos(phi) + dv * std::sin(phi);
    const double ev = -du * std::sin(phi) + dv * std::cos(phi);
    return (eu * eu) / (a * a) + (ev * ev) / (b * b) <= 1.0;
  }
};

// Modified Shepp-Logan head phantom (10 ellipses, values in [0, 1]).
inline const std::vector<Ellipse>& shepp_logan_ellipses() {
  static const std::vector<Ellipse> e = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  return e;
}

// Ellipse-composite chest surrogate: body, two lungs, spine, sternum and
// two mediastinal vessels.
inline const std::vector<Ellipse>& thorax_ellipses() {
  static const std::vector<Ellipse> e = {
      {0.40, 0.88, 0.62, 0.0, 0.0, 0.0},
      {-0.30, 0.30, 0.40, -0.40, -0.04, 8.0},
      {-0.30, 0.30, 0.40, 0.40, -0.04, -8.0},
      {0.45, 0.11, 0.11, 0.0, 0.42, 0.0},
      {0.20, 0.16, 0.05, 0.0, -0.54, 0.0},
      {0.30, 0.045, 0.045, -0.07, 0.06, 0.0},
      {0.30, 0.045, 0.045, 0.07, 0.14, 0.0},
  };
  return e;
}

}  // namespace detail

/// Deterministic grayscale phantom in [0, 1], supported inside the
/// inscribed circle. Coordinates are normalized to [-1, 1] across the grid.
inline ImageGrid make_phantom(PhantomKind kind, int size_n) {
  require(size_n >= 16, "make_phantom: size_n must be >= 16");
  const int n = size_n;
  const double c = 0.5 * (n - 1);
  std::vector<double> vals(std::size_t(n) * n, 0.0);

  auto for_each_pixel = [&](auto&& fn) {
    for (int iy = 0; iy < n; ++iy) {
      const double v = (iy - c) * 2.0 / n;
      for (int ix = 0; ix < n; ++ix) {
        const double u = (ix - c) * 2.0 / n;
        vals[std::size_t(iy) * n + ix] = fn(u, v);
      }
    }
  };

  switch (kind) {
    case PhantomKind::Box:
      // two nested axis-aligned rectangles, half-open in u and v
      for_each_pixel([](double u, double v) {
        double f = 0.0;
        if (u >= -0.5 && u < 0.5 && v >= -0.6 && v < 0.2) f = 0.5;
        if (u >= -0.3 && u < 0.1 && v >= -0.4 && v < 0.0) f = 1.0;
        return f;
      });
      break;
    case PhantomKind::ThreeDot:
      // three discs of radius 0.14 on a uniform disc background
      for_each_pixel([](double u, double v) {
        double f = 0.0;
        if (u * u + v * v <= 0.92 * 0.92) f = 0.25;
        const double cx[3] = {-0.4, 0.0, 0.4};
        for (double x0 : cx) {
          const double du = u - x0;
          if (du * du + v * v <= 0.14 * 0.14) f = 1.0;
        }
        return f;
      });
      break;
    case PhantomKind::SheppLogan:
      for_each_pixel([](double u, double v) {
        double f = 0.0;
        for (const auto& e : detail::shepp_logan_ellipses())
          if (e.contains(u, v)) f += e.value;
        return f;
      });
      break;
    case PhantomKind::ThoraxLike:
      for_each_pixel([](double u, double v) {
        double f = 0.0;
        for (const auto& e : detail::thorax_ellipses())
          if (e.contains(u, v)) f += e.value;
        return f;
      });
      break;
  }
  return ImageGrid(n, 1.0, std::move(vals));
}

/// Poisson observation noise at intensity P. PoissonScaled draws
/// Poisson(P * p / p_max) * p_max / P per bin (unbiased, variance
/// p * p_max / P); PoissonTransmission runs the counts through a
/// Beer-Lambert transmission model with attenuation mu = 4.
inline Sinogram add_poisson_noise(const Sinogram& s, const NoiseSpec& spec) {
  require(std::isfinite(spec.intensity_P) && spec.intensity_P > 0,
          "add_poisson_noise: intensity_P must be positive");
  const auto& v = s.values();
  const double p_max = *std::max_element(v.begin(), v.end());
  const double p_min = *std::min_element(v.begin(), v.end());
  if (p_max == 0.0 && p_min == 0.0) return s;  // all-zero sinogram passes through

  std::mt19937_64 rng(std::uint64_t(spec.seed));
  std::vector<double> out(v.size());
  const double P = spec.intensity_P;

  if (spec.model == NoiseModel::PoissonScaled) {
    require(p_min >= 0.0, "add_poisson_noise: PoissonScaled needs non-negative sinogram values");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double mean = P * v[i] / p_max;
      double draw = 0.0;
      if (mean > 0.0) {
        std::poisson_distribution<long long> d(mean);
        draw = double(d(rng));
      }
      out[i] = draw * p_max / P;
    }
  } else {
    require(p_max > 0.0, "add_poisson_noise: transmission model needs positive values");
    constexpr double mu = 4.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double mean = P * std::exp(-mu * v[i] / p_max);
      std::poisson_distribution<long long> d(mean);
      const double counts = std::max<double>(double(d(rng)), 1.0);
      out[i] = -(p_max / mu) * std::log(counts / P);
    }
  }
  return Sinogram(s.n_detectors(), s.angles(), s.detector_spacing(), std::move(out));
}

/// Integer-step tilt angles strictly inside the open interval (-r, r).
inline AngleSet open_range_angles(double range_r, double step = 1.0) {
  require(std::isfinite(range_r) && range_r > 0 && range_r <= 90.0,
          "open_range_angles: range must lie in (0, 90]");
  require(std::isfinite(step) && step >= 1e-3, "open_range_angles: step must be >= 0.001");
  std::vector<double> deg;
  const int kmax = int(std::floor((range_r - 1e-9) / step));
  for (int k = -kmax; k <= kmax; ++k) deg.push_back(k * step);
  return AngleSet(std::move(deg));
}

struct Scenario {
  ImageGrid ground_truth;
  Sinogram noisy;
  ProjectionGeometry geometry;
};

/// Full experiment cell: phantom, limited-angle sinogram, Poisson noise.
inline Scenario make_scenario(PhantomKind kind, int size_n, double angle_range_r,
                              double angle_step, const NoiseSpec& noise) {
  ImageGrid truth = make_phantom(kind, size_n);
  ProjectionGeometry geom =
      ProjectionGeometry::for_image(truth, open_range_angles(angle_range_r, angle_step));
  Sinogram clean = radon_forward(truth, geom);
  Sinogram noisy = add_poisson_noise(clean, noise);
  return {std::move(truth), std::move(noisy), std::move(geom)};
}

}  // namespace tomo
