#pragma once

// SIRT-family iterative reconstruction.
//
//   f^(k+1) = f^(k) + relaxation * U(p - A f^(k))
//
// where the residual-to-image update U is one of
//   Plain          : C .* A^T (R .* s), the normalized SIRT backprojection
//                    (R, C = reciprocal row/column weight sums of A);
//   Filtered       : filtered backprojection with a low-pass window (fSIRT);
//   SparseFiltered : sFBP, support re-selected on each residual (sfSIRT),
//                    optionally frozen after the first iteration.
//
// The stopping rule is relative: ||f^(k+1) - f^(k)|| / ||f^(k)|| <= eps
// (absolute norm on the first step, where f^(0) = 0). A divergence guard
// aborts once the criterion exceeds 1e6 times its first value.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tomo/core.hpp"
#include "tomo/metrics.hpp"
#include "tomo/projection.hpp"
#include "tomo/sparse_filter.hpp"
#include "tomo/spectral.hpp"

namespace tomo {

enum class BackOp { Plain, Filtered, SparseFiltered };

struct IterRecord {
  int k = 0;
  double delta = 0.0;                 // stopping-criterion value at this step
  std::optional<double> psnr_db;      // vs ground truth, when supplied
  double wall_ms = 0.0;
};

struct IterTrace {
  std::vector<IterRecord> records;
};

struct ReconReport {
  ImageGrid image;
  IterTrace trace;
  std::vector<FrequencySupport> supports;  // per-iteration selections (sfSIRT)
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline bool all_zero(std::span<const double> v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

}  // namespace detail

/// One SIRT update. `sums` may carry precomputed operator weight sums for
/// the Plain back-op (computed on the fly when absent); `selected` receives
/// the sparse support chosen for this residual when back_op is
/// SparseFiltered.
inline ImageGrid sirt_step(const ImageGrid& f_k, const Sinogram& sino,
                           const ProjectionGeometry& geom, BackOp back_op,
                           const Filter& low_pass = Filter::cosine(),
                           double relaxation = 1.0,
                           const OperatorSums* sums = nullptr,
                           const SelectOptions& sfbp_opt = {},
                           FrequencySupport* selected = nullptr) {
  require(f_k.size_n() == geom.image_n && f_k.pixel_size() == geom.pixel_size,
          "sirt_step: image does not match geometry");
  const Sinogram proj = radon_forward(f_k, geom);
  require(proj.same_shape(sino), "sirt_step: sinogram does not match geometry");

  std::vector<double> residual(sino.values().size());
  for (std::size_t i = 0; i < residual.size(); ++i)
    residual[i] = sino.values()[i] - proj.values()[i];

  // exact data consistency is a fixed point for every back-op
  if (detail::all_zero(residual)) return f_k;

  const int n = geom.image_n;
  std::vector<double> update;
  switch (back_op) {
    case BackOp::Plain: {
      OperatorSums local;
      const OperatorSums* s = sums;
      if (s == nullptr) {
        local = operator_row_col_sums(geom);
        s = &local;
      }
      for (std::size_t i = 0; i < residual.size(); ++i)
        residual[i] = s->row[i] > 0.0 ? residual[i] / s->row[i] : 0.0;
      const Sinogram rs(sino.n_detectors(), sino.angles(), sino.detector_spacing(),
                        std::move(residual));
      update = backproject(rs, geom).values();
      for (std::size_t i = 0; i < update.size(); ++i)
        update[i] = s->col[i] > 0.0 ? update[i] / s->col[i] : 0.0;
      break;
    }
    case BackOp::Filtered: {
      const Sinogram rs(sino.n_detectors(), sino.angles(), sino.detector_spacing(),
                        std::move(residual));
      update = fbp_reconstruct(rs, low_pass, geom).values();
      break;
    }
    case BackOp::SparseFiltered: {
      const Sinogram rs(sino.n_detectors(), sino.angles(), sino.detector_spacing(),
                        std::move(residual));
      auto res = sfbp_reconstruct(rs, geom, sfbp_opt);
      update = std::move(res.image).values();
      if (selected != nullptr) *selected = std::move(res.support);
      break;
    }
  }

  std::vector<double> next = f_k.values();
  for (std::size_t i = 0; i < next.size(); ++i) next[i] += relaxation * update[i];
  return ImageGrid(n, geom.pixel_size, std::move(next));
}

/// Runs SIRT / fSIRT / sfSIRT from a zero initial image until the stopping
/// criterion or max_iters. Records the per-iteration trace and, for sfSIRT,
/// the selected supports. Throws "diverged" if the criterion blows up.
inline ReconReport run_iterative(const Sinogram& sino, const ProjectionGeometry& geom,
                                 const ReconConfig& config,
                                 const ImageGrid* ground_truth = nullptr) {
  validate(config);
  BackOp op;
  switch (config.method) {
    case Method::SIRT: op = BackOp::Plain; break;
    case Method::FSIRT: op = BackOp::Filtered; break;
    case Method::SFSIRT: op = BackOp::SparseFiltered; break;
    default:
      throw std::invalid_argument("run_iterative: method must be sirt, fsirt or sfsirt");
  }
  const Filter low_pass = op == BackOp::Filtered ? Filter::classical(config.filter_kind)
                                                 : Filter::cosine();
  SelectOptions sfbp_opt;
  sfbp_opt.norm = config.gmdl_norm;

  std::optional<OperatorSums> sums;
  if (op == BackOp::Plain) sums = operator_row_col_sums(geom);

  ReconReport report{ImageGrid(geom.image_n, geom.pixel_size), {}, {}, 0, false};
  ImageGrid f = report.image;
  double delta0 = 0.0;

  for (int k = 0; k < config.max_iters; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    FrequencySupport picked;
    // a frozen support turns later sfSIRT steps into plain filtered
    // backprojections with the first iteration's sparse mask
    BackOp op_k = op;
    Filter filt_k = low_pass;
    if (op == BackOp::SparseFiltered && config.freeze_support && !report.supports.empty()) {
      op_k = BackOp::Filtered;
      filt_k = Filter::sparse(report.supports.front());
    }
    ImageGrid f_next = sirt_step(f, sino, geom, op_k, filt_k, config.relaxation,
                                 sums ? &*sums : nullptr, sfbp_opt,
                                 op_k == BackOp::SparseFiltered ? &picked : nullptr);
    const auto t1 = std::chrono::steady_clock::now();

    const double diff = l2_diff_norm(f_next.values(), f.values());
    const double fnorm = l2_norm(f.values());
    const double delta =
        k == 0 ? diff : diff / std::max(fnorm, std::numeric_limits<double>::min());

    IterRecord rec;
    rec.k = k;
    rec.delta = delta;
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (ground_truth != nullptr) rec.psnr_db = psnr(f_next, *ground_truth);
    report.trace.records.push_back(rec);
    if (op_k == BackOp::SparseFiltered && !picked.energies.empty())
      report.supports.push_back(std::move(picked));

    if (k == 0) delta0 = delta;
    if (k > 0 && delta0 > 0.0 && delta > 1e6 * delta0)
      throw std::runtime_error("run_iterative: diverged");

    f = std::move(f_next);
    report.iterations = k + 1;
    if (delta <= config.stop_eps) {
      report.converged = true;
      break;
    }
  }
  report.image = std::move(f);
  return report;
}

}  // namespace tomo
