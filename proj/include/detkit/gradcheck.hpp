// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/gradcheck.hpp
 * @brief Finite-difference verification of the analytic loss gradients.
 *
 * The checker draws random (target, prediction) pairs, evaluates the analytic
 * gradient, and compares it against a central finite difference computed only
 * from loss values. Pairs that sit on or near a kink of the loss (tied min /
 * max selections, boxes exactly touching) are resampled rather than checked:
 * a two-sided difference quotient straddling a kink does not estimate either
 * one-sided derivative, so such points say nothing about correctness.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "detkit/geometry.hpp"
#include "detkit/losses.hpp"
#include "detkit/rng.hpp"

namespace detkit {

/// Central finite-difference gradient of `kind` at (gt, pred). The step is
/// `step_rel` times the enclosing-box diagonal, one coordinate at a time.
inline std::array<double, 4> fd_gradient(LossKind kind, const PixelBox& gt,
                                         const PixelBox& pred,
                                         const M2IoUParams& p = {},
                                         double step_rel = 1e-5) {
  const double h = step_rel * std::sqrt(enclosing_diag_sq(gt, pred));
  std::array<double, 4> out{};
  const std::array<double, 4> c = {pred.x_min, pred.y_min, pred.x_max,
                                   pred.y_max};
  for (int k = 0; k < 4; ++k) {
    std::array<double, 4> hi = c;
    std::array<double, 4> lo = c;
    hi[k] += h;
    lo[k] -= h;
    const double up =
        loss_value(kind, gt, PixelBox(hi[0], hi[1], hi[2], hi[3]), p);
    const double dn =
        loss_value(kind, gt, PixelBox(lo[0], lo[1], lo[2], lo[3]), p);
    out[k] = (up - dn) / (2.0 * h);
  }
  return out;
}

/// Outcome of a randomized gradient check for one loss kind.
struct GradCheckReport {
  LossKind kind = LossKind::kIoU;
  int pairs_checked = 0;
  int pairs_resampled = 0;  ///< draws discarded for sitting near a kink
  double max_rel_err = 0.0;
  double tolerance = 1e-4;
  bool pass = true;
  std::array<double, 4> worst_gt{};        ///< corners of the worst pair
  std::array<double, 4> worst_pred{};
  std::array<double, 4> worst_analytic{};
  std::array<double, 4> worst_fd{};
};

namespace detail {

inline PixelBox random_box_px(std::mt19937_64& rng, double canvas) {
  const double w = uniform_real(rng, 0.05 * canvas, 0.5 * canvas);
  const double h = uniform_real(rng, 0.05 * canvas, 0.5 * canvas);
  const double x0 = uniform_real(rng, 0.0, canvas - w);
  const double y0 = uniform_real(rng, 0.0, canvas - h);
  return PixelBox(x0, y0, x0 + w, y0 + h);
}

/// True when the pair is comfortably away from every kink, so that a central
/// difference with step ~1e-5 * diag stays inside a single smooth branch.
inline bool fd_safe(LossKind kind, const PixelBox& g, const PixelBox& p,
                    double step_rel) {
  const double scale = std::sqrt(enclosing_diag_sq(g, p));
  const double guard = 100.0 * step_rel * scale;

  if (std::abs(p.x_min - g.x_min) < guard) return false;
  if (std::abs(p.y_min - g.y_min) < guard) return false;
  if (std::abs(p.x_max - g.x_max) < guard) return false;
  if (std::abs(p.y_max - g.y_max) < guard) return false;

  const double iw = std::min(g.x_max, p.x_max) - std::max(g.x_min, p.x_min);
  const double ih = std::min(g.y_max, p.y_max) - std::max(g.y_min, p.y_min);
  if (std::abs(iw) < guard || std::abs(ih) < guard) return false;

  if (kind == LossKind::kM2IoU) {
    const CornerTerms ct = corner_terms(g, p);
    // A step of h moves either squared distance by at most ~2 * scale * h.
    if (std::abs(ct.d2_max - ct.d2_min) < 400.0 * step_rel * scale * scale)
      return false;
  }
  return true;
}

}  // namespace detail

/**
 * @brief Check `n_pairs` random pairs of one loss kind against central
 *        finite differences.
 *
 * The error metric is || analytic - fd ||_inf / max(|| fd ||_inf, 1e-9),
 * recorded per pair; the report carries the maximum over all pairs and the
 * worst offender. Pass means max_rel_err <= tolerance.
 */
inline GradCheckReport run_gradcheck(LossKind kind, int n_pairs,
                                     std::uint64_t seed,
                                     double tolerance = 1e-4,
                                     const M2IoUParams& p = {},
                                     double step_rel = 1e-5) {
  GradCheckReport rep;
  rep.kind = kind;
  rep.tolerance = tolerance;

  constexpr double kCanvas = 100.0;
  for (int i = 0; i < n_pairs; ++i) {
    std::mt19937_64 rng(child_seed(seed, static_cast<std::uint64_t>(i)));
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const PixelBox gt = detail::random_box_px(rng, kCanvas);
      PixelBox pred = detail::random_box_px(rng, kCanvas);
      if (bounded(rng, 2) == 0) {
        // Half the draws jitter the target instead, biasing toward the
        // overlapping regime where most branches live.
        const double jw = 0.4 * gt.width();
        const double jh = 0.4 * gt.height();
        const double x0 = gt.x_min + uniform_real(rng, -jw, jw);
        const double y0 = gt.y_min + uniform_real(rng, -jh, jh);
        const double x1 = gt.x_max + uniform_real(rng, -jw, jw);
        const double y1 = gt.y_max + uniform_real(rng, -jh, jh);
        if (!(x0 < x1 && y0 < y1)) continue;
        pred = PixelBox(x0, y0, x1, y1);
      }
      if (!detail::fd_safe(kind, gt, pred, step_rel)) {
        ++rep.pairs_resampled;
        continue;
      }
      const LossGrad an = loss_gradient(kind, gt, pred, p);
      if (an.subgradient) {
        ++rep.pairs_resampled;
        continue;
      }
      const std::array<double, 4> fd = fd_gradient(kind, gt, pred, p, step_rel);

      double diff = 0.0;
      double mag = 0.0;
      for (int k = 0; k < 4; ++k) {
        diff = std::max(diff, std::abs(an.d[k] - fd[k]));
        mag = std::max(mag, std::abs(fd[k]));
      }
      const double rel = diff / std::max(mag, 1e-9);
      if (rel > rep.max_rel_err) {
        rep.max_rel_err = rel;
        rep.worst_gt = {gt.x_min, gt.y_min, gt.x_max, gt.y_max};
        rep.worst_pred = {pred.x_min, pred.y_min, pred.x_max, pred.y_max};
        rep.worst_analytic = an.d;
        rep.worst_fd = fd;
      }
      ++rep.pairs_checked;
      break;
    }
  }
  rep.pass = rep.max_rel_err <= tolerance && rep.pairs_checked == n_pairs;
  return rep;
}

}  // namespace detkit
