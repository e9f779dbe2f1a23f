#pragma once

// Discrete parallel-beam Radon transform A and its backprojection A^T.
//
// The forward projector is ray-driven: each ray r = x cos(t) + y sin(t) is
// sampled at pixel_size/2 steps and the image is read with bilinear
// interpolation, so p(r, theta) ~ h * sum_k f(ray sample k). The
// backprojector is the exact matrix transpose of that sampling: for every
// pixel it gathers the bilinear scatter weights of all ray samples whose
// footprint touches it. Keeping the pair an exact transpose makes the
// adjoint identity <Af, p> = <f, A^T p> hold to rounding, which SIRT and
// the operator tests rely on.
//
// Per-angle (forward) and per-row (backprojection) loops are independent;
// each output element is accumulated in a fixed order, so results do not
// depend on scheduling.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tomo/core.hpp"

namespace tomo {

struct ProjectionGeometry {
  int image_n;
  double pixel_size;
  int n_detectors;
  double detector_spacing;
  AngleSet angles;

  ProjectionGeometry(int image_n_, double pixel_size_, int n_detectors_,
                     double detector_spacing_, AngleSet angles_)
      : image_n(image_n_),
        pixel_size(pixel_size_),
        n_detectors(n_detectors_),
        detector_spacing(detector_spacing_),
        angles(std::move(angles_)) {
    require(image_n > 0, "ProjectionGeometry: image_n must be positive");
    require(std::isfinite(pixel_size) && pixel_size > 0,
            "ProjectionGeometry: pixel_size must be positive");
    require(n_detectors > 0, "ProjectionGeometry: n_detectors must be positive");
    require(std::isfinite(detector_spacing) && detector_spacing > 0,
            "ProjectionGeometry: detector_spacing must be positive");
  }

  /// ceil(sqrt(2) * n) rounded up to even, so diagonal projections are not
  /// clipped.
  static int default_detector_count(int image_n) {
    int d = int(std::ceil(std::numbers::sqrt2 * image_n));
    if (d % 2 != 0) ++d;
    return d;
  }

  static ProjectionGeometry for_image(const ImageGrid& img, AngleSet angles,
                                      std::optional<int> n_detectors = std::nullopt) {
    const int nd = n_detectors.value_or(default_detector_count(img.size_n()));
    return ProjectionGeometry(img.size_n(), img.pixel_size(), nd, img.pixel_size(),
                              std::move(angles));
  }

  double detector_offset(int i) const {
    return (i - 0.5 * (n_detectors - 1)) * detector_spacing;
  }
};

namespace detail {

// Clips the ray point r*u + t*v to |x|,|y| <= lim; returns false on a miss.
inline bool clip_ray_to_box(double pos_x, double dir_x, double pos_y, double dir_y,
                            double lim, double& t0, double& t1) {
  t0 = -std::numeric_limits<double>::infinity();
  t1 = std::numeric_limits<double>::infinity();
  const double pos[2] = {pos_x, pos_y};
  const double dir[2] = {dir_x, dir_y};
  for (int ax = 0; ax < 2; ++ax) {
    if (std::abs(dir[ax]) < 1e-300) {
      if (std::abs(pos[ax]) > lim) return false;
      continue;
    }
    const double ta = (-lim - pos[ax]) / dir[ax];
    const double tb = (lim - pos[ax]) / dir[ax];
    t0 = std::max(t0, std::min(ta, tb));
    t1 = std::min(t1, std::max(ta, tb));
  }
  return t0 <= t1;
}

}  // namespace detail

/// Forward Radon transform: line integrals of the image, ray-driven with
/// bilinear interpolation at pixel_size/2 steps. Linear in the image.
inline Sinogram radon_forward(const ImageGrid& img, const ProjectionGeometry& g) {
  require(img.size_n() == g.image_n && img.pixel_size() == g.pixel_size,
          "radon_forward: image does not match geometry");
  const int n = g.image_n;
  const int nd = g.n_detectors;
  const int na = g.angles.size();
  const double px = g.pixel_size;
  const double h = 0.5 * px;
  const double c = 0.5 * (n - 1);
  const double lim = (c + 1.0) * px;  // bilinear footprints end here
  const double* f = img.values().data();
  std::vector<double> out(std::size_t(nd) * na, 0.0);

#pragma omp parallel for schedule(static)
  for (int j = 0; j < na; ++j) {
    const double th = g.angles.rad(j);
    const double ct = std::cos(th), st = std::sin(th);
    for (int i = 0; i < nd; ++i) {
      const double r = g.detector_offset(i);
      double t0, t1;
      if (!detail::clip_ray_to_box(r * ct, -st, r * st, ct, lim, t0, t1)) continue;
      const long m0 = long(std::ceil(t0 / h));
      const long m1 = long(std::floor(t1 / h));
      double x = r * ct - double(m0) * h * st;
      double y = r * st + double(m0) * h * ct;
      const double dx = -h * st, dy = h * ct;
      double acc = 0.0;
      for (long m = m0; m <= m1; ++m, x += dx, y += dy) {
        const double gx = x / px + c;
        const double gy = y / px + c;
        const int ix0 = int(std::floor(gx));
        const int iy0 = int(std::floor(gy));
        const double fx = gx - ix0, fy = gy - iy0;
        const bool x0ok = ix0 >= 0 && ix0 < n, x1ok = ix0 + 1 >= 0 && ix0 + 1 < n;
        const bool y0ok = iy0 >= 0 && iy0 < n, y1ok = iy0 + 1 >= 0 && iy0 + 1 < n;
        double v = 0.0;
        if (y0ok) {
          const double* row = f + std::size_t(iy0) * n;
          if (x0ok) v += row[ix0] * (1.0 - fx) * (1.0 - fy);
          if (x1ok) v += row[ix0 + 1] * fx * (1.0 - fy);
        }
        if (y1ok) {
          const double* row = f + std::size_t(iy0 + 1) * n;
          if (x0ok) v += row[ix0] * (1.0 - fx) * fy;
          if (x1ok) v += row[ix0 + 1] * fx * fy;
        }
        acc += v;
      }
      out[std::size_t(i) * na + j] = acc * h;
    }
  }
  return Sinogram(nd, g.angles, g.detector_spacing, std::move(out));
}

/// Backprojection, the exact transpose of radon_forward. Implemented in
/// gather form: per pixel, enumerate the ray samples of each angle whose
/// bilinear footprint covers the pixel.
inline ImageGrid backproject(const Sinogram& s, const ProjectionGeometry& g) {
  require(s.n_detectors() == g.n_detectors && s.detector_spacing() == g.detector_spacing &&
              s.angles() == g.angles,
          "backproject: sinogram does not match geometry");
  const int n = g.image_n;
  const int nd = g.n_detectors;
  const int na = g.angles.size();
  const double px = g.pixel_size;
  const double h = 0.5 * px;
  const double c = 0.5 * (n - 1);
  const double cd = 0.5 * (nd - 1);
  const double dr = g.detector_spacing;
  const double reach = std::numbers::sqrt2 * px;  // |rho - r_i| beyond this has zero weight
  const double* sv = s.values().data();

  std::vector<double> ct(na), st(na);
  for (int j = 0; j < na; ++j) {
    ct[j] = std::cos(g.angles.rad(j));
    st[j] = std::sin(g.angles.rad(j));
  }

  std::vector<double> vals(std::size_t(n) * n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const double X = (ix - c) * px;
      const double Y = (iy - c) * px;
      double acc = 0.0;
      for (int j = 0; j < na; ++j) {
        const double rho = X * ct[j] + Y * st[j];
        const double tau = -X * st[j] + Y * ct[j];
        int i0 = int(std::ceil((rho - reach) / dr + cd));
        int i1 = int(std::floor((rho + reach) / dr + cd));
        i0 = std::max(i0, 0);
        i1 = std::min(i1, nd - 1);
        for (int i = i0; i <= i1; ++i) {
          const double drr = rho - (i - cd) * dr;
          // dt interval where both |dx| < px and |dy| < px, with
          // (dx, dy) = drr*(cos,sin) + dt*(-sin,cos)
          double lo = -std::numeric_limits<double>::infinity();
          double hi = std::numeric_limits<double>::infinity();
          if (std::abs(st[j]) > 1e-300) {
            const double b1 = (drr * ct[j] - px) / st[j];
            const double b2 = (drr * ct[j] + px) / st[j];
            lo = std::max(lo, std::min(b1, b2));
            hi = std::min(hi, std::max(b1, b2));
          } else if (std::abs(drr * ct[j]) >= px) {
            continue;
          }
          if (std::abs(ct[j]) > 1e-300) {
            const double b1 = (-px - drr * st[j]) / ct[j];
            const double b2 = (px - drr * st[j]) / ct[j];
            lo = std::max(lo, std::min(b1, b2));
            hi = std::min(hi, std::max(b1, b2));
          } else if (std::abs(drr * st[j]) >= px) {
            continue;
          }
          if (!(lo < hi)) continue;
          const long m0 = long(std::ceil((tau - hi) / h));
          const long m1 = long(std::floor((tau - lo) / h));
          double w = 0.0;
          for (long m = m0; m <= m1; ++m) {
            const double dt = tau - double(m) * h;
            const double ax = std::abs(drr * ct[j] - dt * st[j]);
            const double ay = std::abs(drr * st[j] + dt * ct[j]);
            if (ax < px && ay < px) w += (1.0 - ax / px) * (1.0 - ay / px);
          }
          acc += w * sv[std::size_t(i) * na + j];
        }
      }
      vals[std::size_t(iy) * n + ix] = acc * h;
    }
  }
  return ImageGrid(n, px, std::move(vals));
}

/// Per-ray and per-pixel weight sums of the projection matrix, used for the
/// normalized SIRT update. row(i,j) = sum over pixels of the ray weights,
/// col(pixel) = sum over rays of that pixel's weights.
struct OperatorSums {
  std::vector<double> row;  // N_d x N_theta, detector-major
  std::vector<double> col;  // n x n, row-major
};

inline OperatorSums operator_row_col_sums(const ProjectionGeometry& g) {
  const ImageGrid ones_img(g.image_n, g.pixel_size,
                           std::vector<double>(std::size_t(g.image_n) * g.image_n, 1.0));
  const Sinogram ones_sino(
      g.n_detectors, g.angles, g.detector_spacing,
      std::vector<double>(std::size_t(g.n_detectors) * g.angles.size(), 1.0));
  OperatorSums sums;
  sums.row = radon_forward(ones_img, g).values();
  sums.col = backproject(ones_sino, g).values();
  return sums;
}

}  // namespace tomo
