#pragma once

// Reconstruction quality metrics: MSE, PSNR and SSIM.
//
// SSIM follows Wang et al.: 11x11 Gaussian window (sigma 1.5), windows fully
// inside the image, exponents alpha = beta = gamma = 1 and constants
// C1 = (0.01 L)^2, C2 = (0.03 L)^2, C3 = C2 / 2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tomo/core.hpp"

namespace tomo {

/// Mean squared pixel difference.
inline double mse(const ImageGrid& f_hat, const ImageGrid& f0) {
  require(f_hat.same_shape(f0), "mse: image dimensions differ");
  const auto& a = f_hat.values();
  const auto& b = f0.values();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / double(a.size());
}

/// Peak signal-to-noise ratio in dB: 10 log10(f0_max^2 / MSE), with f0_max
/// the maximum entry of the ground truth. Returns +inf when MSE is zero.
inline double psnr(const ImageGrid& f_hat, const ImageGrid& f0) {
  require(f_hat.same_shape(f0), "psnr: image dimensions differ");
  const double f0_max = *std::max_element(f0.values().begin(), f0.values().end());
  require(f0_max != 0.0, "psnr: ground truth is all zeros (max entry is 0)");
  const double e = mse(f_hat, f0);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(f0_max * f0_max / e);
}

namespace detail {

inline const std::vector<double>& ssim_window() {
  static const std::vector<double> w = [] {
    constexpr int half = 5;
    constexpr double sigma = 1.5;
    std::vector<double> win(11 * 11);
    double sum = 0.0;
    for (int dy = -half; dy <= half; ++dy)
      for (int dx = -half; dx <= half; ++dx) {
        const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        win[std::size_t(dy + half) * 11 + (dx + half)] = g;
        sum += g;
      }
    for (double& v : win) v /= sum;
    return win;
  }();
  return w;
}

}  // namespace detail

/// Mean over sliding windows of luminance * contrast * structure. L is the
/// dynamic range entering the stabilizing constants.
inline double ssim(const ImageGrid& f_hat, const ImageGrid& f0, double L) {
  require(f_hat.same_shape(f0), "ssim: image dimensions differ");
  require(std::isfinite(L) && L > 0.0, "ssim: L must be positive");
  const int n = f_hat.size_n();
  constexpr int win = 11;
  require(n >= win, "ssim: image smaller than the 11x11 window");

  const double c1 = (0.01 * L) * (0.01 * L);
  const double c2 = (0.03 * L) * (0.03 * L);
  const double c3 = c2 / 2.0;
  const auto& w = detail::ssim_window();
  const auto& x = f_hat.values();
  const auto& y = f0.values();

  double total = 0.0;
  long count = 0;
  for (int oy = 0; oy + win <= n; ++oy) {
    for (int ox = 0; ox + win <= n; ++ox) {
      double mx = 0.0, my = 0.0;
      for (int dy = 0; dy < win; ++dy)
        for (int dx = 0; dx < win; ++dx) {
          const double wv = w[std::size_t(dy) * win + dx];
          const std::size_t idx = std::size_t(oy + dy) * n + (ox + dx);
          mx += wv * x[idx];
          my += wv * y[idx];
        }
      double vx = 0.0, vy = 0.0, cxy = 0.0;
      for (int dy = 0; dy < win; ++dy)
        for (int dx = 0; dx < win; ++dx) {
          const double wv = w[std::size_t(dy) * win + dx];
          const std::size_t idx = std::size_t(oy + dy) * n + (ox + dx);
          const double ex = x[idx] - mx;
          const double ey = y[idx] - my;
          vx += wv * ex * ex;
          vy += wv * ey * ey;
          cxy += wv * ex * ey;
        }
      vx = std::max(vx, 0.0);
      vy = std::max(vy, 0.0);
      // sigma_x * sigma_y as sqrt(vx * vy): keeps ssim(f, f) exactly 1
      const double sxsy = std::sqrt(vx * vy);
      const double a = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
      const double b = (2.0 * sxsy + c2) / (vx + vy + c2);
      const double c = (cxy + c3) / (sxsy + c3);
      total += a * b * c;
      ++count;
    }
  }
  return total / double(count);
}

}  // namespace tomo
