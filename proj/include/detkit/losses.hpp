// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/losses.hpp
 * @brief IoU-family regression losses for box fitting, with analytic
 *        gradients with respect to the predicted corners.
 *
 * Three losses are provided, all of the form 1 - IoU + penalty:
 *
 *   iou_loss    penalty = 0. Flat (zero gradient) wherever the boxes do not
 *               overlap, which is what makes it useless for pulling a far-off
 *               prediction toward its target.
 *
 *   ciou_loss   penalty = rho^2 / c^2 + alpha_c * v, the center-distance plus
 *               aspect-ratio penalty. rho^2 is the squared distance between
 *               box centers, c^2 the squared diagonal of the enclosing box,
 *               v = (4/pi^2) * (atan(w_g/h_g) - atan(w_p/h_p))^2, and
 *               alpha_c = v / ((1 - IoU) + v) with alpha_c = 0 when the boxes
 *               coincide exactly.
 *
 *   m2iou_loss  penalty = (alpha * D2_min + (1 - alpha) * D2_max) / c^2 where
 *               D2_min / D2_max are the smaller and larger of the squared
 *               distances between corresponding corner pairs (top-left to
 *               top-left, bottom-right to bottom-right). Weighting the two
 *               corner errors asymmetrically keeps a useful gradient even
 *               when centers already align, and alpha in [0, 1] tunes how
 *               much the better-aligned corner still contributes.
 *
 * Gradients are exact wherever the loss is differentiable. At ties of the
 * min/max selections (corner distances equal, enclosing box edge shared,
 * boxes merely touching) the loss has a kink; loss_gradient then commits to
 * the branch in which the predicted coordinate is the active one, returns
 * that one-sided derivative, and sets `subgradient` so callers can tell the
 * value is a valid descent direction but not a two-sided derivative. The one
 * exception is exact coincidence of prediction and target: that is the global
 * minimum of every kind, and the gradient returned is the zero vector.
 */

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "detkit/geometry.hpp"

namespace detkit {

// ===================== kinds and parameters =====================

/// Which regression loss to evaluate.
enum class LossKind { kIoU, kCIoU, kM2IoU };

inline const char* loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::kIoU: return "iou";
    case LossKind::kCIoU: return "ciou";
    case LossKind::kM2IoU: return "m2iou";
  }
  return "?";
}

/// Corner-weighting parameter for the M2IoU penalty.
struct M2IoUParams {
  double alpha = 0.25;

  M2IoUParams() = default;
  explicit M2IoUParams(double a) : alpha(a) {
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("M2IoUParams: alpha must lie in [0, 1]");
  }
};

// ===================== shared terms =====================

/// The raw ingredients of the corner penalty.
struct CornerTerms {
  double d2_min;  ///< smaller squared corner-pair distance
  double d2_max;  ///< larger squared corner-pair distance
  double c2;      ///< squared diagonal of the enclosing box
};

/// Corner-pair distances and enclosing diagonal for a (target, prediction)
/// pair. c2 is strictly positive because both boxes have positive extent.
inline CornerTerms corner_terms(const PixelBox& gt, const PixelBox& pred) {
  const double d_tl = dist_sq(gt.top_left(), pred.top_left());
  const double d_br = dist_sq(gt.bottom_right(), pred.bottom_right());
  return {std::min(d_tl, d_br), std::max(d_tl, d_br),
          enclosing_diag_sq(gt, pred)};
}

// ===================== loss values =====================

inline double iou_loss(const PixelBox& gt, const PixelBox& pred) {
  return 1.0 - iou(gt, pred);
}

inline double ciou_loss(const PixelBox& gt, const PixelBox& pred) {
  constexpr double kPi = 3.14159265358979323846;
  const double i = iou(gt, pred);
  const double dx = pred.center_x() - gt.center_x();
  const double dy = pred.center_y() - gt.center_y();
  const double rho2 = dx * dx + dy * dy;
  const double c2 = enclosing_diag_sq(gt, pred);
  const double t =
      std::atan(gt.width() / gt.height()) - std::atan(pred.width() / pred.height());
  const double v = (4.0 / (kPi * kPi)) * t * t;
  const double s = 1.0 - i;
  const double alpha_c = (s + v) > 0.0 ? v / (s + v) : 0.0;
  return s + rho2 / c2 + alpha_c * v;
}

inline double m2iou_loss(const PixelBox& gt, const PixelBox& pred,
                         const M2IoUParams& p = {}) {
  const CornerTerms ct = corner_terms(gt, pred);
  return 1.0 - iou(gt, pred) +
         (p.alpha * ct.d2_min + (1.0 - p.alpha) * ct.d2_max) / ct.c2;
}

/// Dispatch on LossKind. alpha is ignored except for kM2IoU.
inline double loss_value(LossKind kind, const PixelBox& gt,
                         const PixelBox& pred, const M2IoUParams& p = {}) {
  switch (kind) {
    case LossKind::kIoU: return iou_loss(gt, pred);
    case LossKind::kCIoU: return ciou_loss(gt, pred);
    case LossKind::kM2IoU: return m2iou_loss(gt, pred, p);
  }
  throw std::invalid_argument("loss_value: unknown kind");
}

// ===================== gradients =====================

/**
 * @brief Gradient of a loss with respect to the predicted corners, in the
 *        order (x_min, y_min, x_max, y_max).
 *
 * `subgradient` is true when the evaluation point sits on a kink (any min or
 * max selection tied, or the boxes exactly touching); the vector returned is
 * then the one-sided derivative of the branch in which the predicted
 * coordinate stays active.
 */
struct LossGrad {
  std::array<double, 4> d{0.0, 0.0, 0.0, 0.0};
  bool subgradient = false;
};

namespace detail {

/// Partial derivatives of one scalar with respect to the four pred corners.
using Grad4 = std::array<double, 4>;

inline Grad4 add(const Grad4& a, const Grad4& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}

inline Grad4 scale(const Grad4& a, double k) {
  return {a[0] * k, a[1] * k, a[2] * k, a[3] * k};
}

/// Everything the three loss kinds share: IoU with its gradient, enclosing
/// diagonal with its gradient, and the tie bookkeeping.
struct IoUParts {
  double iou = 0.0;
  Grad4 d_iou{0, 0, 0, 0};
  double c2 = 0.0;
  Grad4 d_c2{0, 0, 0, 0};
  bool tie = false;
};

inline IoUParts iou_parts(const PixelBox& g, const PixelBox& p) {
  IoUParts out;

  // Enclosing box. The pred coordinate is the active branch on ties.
  const double cw = std::max(g.x_max, p.x_max) - std::min(g.x_min, p.x_min);
  const double ch = std::max(g.y_max, p.y_max) - std::min(g.y_min, p.y_min);
  out.c2 = cw * cw + ch * ch;
  if (p.x_min == g.x_min || p.x_max == g.x_max || p.y_min == g.y_min ||
      p.y_max == g.y_max)
    out.tie = true;
  const double dcw_dx0 = p.x_min <= g.x_min ? -1.0 : 0.0;
  const double dcw_dx1 = p.x_max >= g.x_max ? 1.0 : 0.0;
  const double dch_dy0 = p.y_min <= g.y_min ? -1.0 : 0.0;
  const double dch_dy1 = p.y_max >= g.y_max ? 1.0 : 0.0;
  out.d_c2 = {2.0 * cw * dcw_dx0, 2.0 * ch * dch_dy0, 2.0 * cw * dcw_dx1,
              2.0 * ch * dch_dy1};

  // Intersection and union.
  const double iw = std::min(g.x_max, p.x_max) - std::max(g.x_min, p.x_min);
  const double ih = std::min(g.y_max, p.y_max) - std::max(g.y_min, p.y_min);
  if (iw == 0.0 || ih == 0.0) out.tie = true;  // exact touching
  if (iw <= 0.0 || ih <= 0.0) {
    // Disjoint: IoU is identically zero in a neighborhood (or one-sidedly
    // so at exact contact), gradient zero.
    out.iou = 0.0;
    out.d_iou = {0, 0, 0, 0};
    return out;
  }

  const double inter = iw * ih;
  const double area_g = box_area(g);
  const double area_p = box_area(p);
  const double uni = area_g + area_p - inter;
  out.iou = inter / uni;

  const double pw = p.width();
  const double ph = p.height();
  const Grad4 d_area_p = {-ph, -pw, ph, pw};

  const double diw_dx0 = p.x_min >= g.x_min ? -1.0 : 0.0;
  const double diw_dx1 = p.x_max <= g.x_max ? 1.0 : 0.0;
  const double dih_dy0 = p.y_min >= g.y_min ? -1.0 : 0.0;
  const double dih_dy1 = p.y_max <= g.y_max ? 1.0 : 0.0;
  const Grad4 d_inter = {ih * diw_dx0, iw * dih_dy0, ih * diw_dx1,
                         iw * dih_dy1};

  for (int k = 0; k < 4; ++k) {
    const double d_uni = d_area_p[k] - d_inter[k];
    out.d_iou[k] = (d_inter[k] * uni - inter * d_uni) / (uni * uni);
  }
  return out;
}

}  // namespace detail

/**
 * @brief Analytic gradient of the selected loss at (gt, pred).
 *
 * Matches central finite differences to high accuracy away from kinks. An
 * exactly coincident pair returns the zero vector with the subgradient flag
 * set, since every kind attains its global minimum there.
 */
inline LossGrad loss_gradient(LossKind kind, const PixelBox& gt,
                              const PixelBox& pred,
                              const M2IoUParams& p = {}) {
  using detail::Grad4;

  LossGrad out;
  if (gt == pred) {
    out.subgradient = true;
    return out;
  }

  const detail::IoUParts parts = detail::iou_parts(gt, pred);
  out.subgradient = parts.tie;

  // d(1 - IoU) = -dIoU for every kind.
  Grad4 g = detail::scale(parts.d_iou, -1.0);

  if (kind == LossKind::kM2IoU) {
    const double a = p.alpha;
    if (!(a >= 0.0 && a <= 1.0))
      throw std::invalid_argument("loss_gradient: alpha must lie in [0, 1]");
    const double dx0 = pred.x_min - gt.x_min;
    const double dy0 = pred.y_min - gt.y_min;
    const double dx1 = pred.x_max - gt.x_max;
    const double dy1 = pred.y_max - gt.y_max;
    const double d_tl = dx0 * dx0 + dy0 * dy0;
    const double d_br = dx1 * dx1 + dy1 * dy1;
    const Grad4 grad_tl = {2.0 * dx0, 2.0 * dy0, 0.0, 0.0};
    const Grad4 grad_br = {0.0, 0.0, 2.0 * dx1, 2.0 * dy1};

    // Tied corner distances: treat the top-left pair as the min branch.
    if (d_tl == d_br) out.subgradient = true;
    const double w_tl = d_tl <= d_br ? a : 1.0 - a;
    const double w_br = d_tl <= d_br ? 1.0 - a : a;

    const double num = w_tl * d_tl + w_br * d_br;
    const Grad4 d_num =
        detail::add(detail::scale(grad_tl, w_tl), detail::scale(grad_br, w_br));
    const double c2 = parts.c2;
    for (int k = 0; k < 4; ++k)
      g[k] += (d_num[k] * c2 - num * parts.d_c2[k]) / (c2 * c2);
  } else if (kind == LossKind::kCIoU) {
    constexpr double kPi = 3.14159265358979323846;

    const double ddx = pred.center_x() - gt.center_x();
    const double ddy = pred.center_y() - gt.center_y();
    const double rho2 = ddx * ddx + ddy * ddy;
    const Grad4 d_rho2 = {ddx, ddy, ddx, ddy};
    const double c2 = parts.c2;
    for (int k = 0; k < 4; ++k)
      g[k] += (d_rho2[k] * c2 - rho2 * parts.d_c2[k]) / (c2 * c2);

    // Aspect term, differentiated through alpha_c:
    //   alpha_c * v = v^2 / (S + v)   with S = 1 - IoU.
    const double pw = pred.width();
    const double ph = pred.height();
    const double t =
        std::atan(gt.width() / gt.height()) - std::atan(pw / ph);
    const double v = (4.0 / (kPi * kPi)) * t * t;
    const double S = 1.0 - parts.iou;

    const double r = pw / ph;
    const double datan = -1.0 / (1.0 + r * r);  // d t / d r
    const Grad4 d_r = {-1.0 / ph, pw / (ph * ph), 1.0 / ph,
                       -pw / (ph * ph)};
    const double dv_dr = (8.0 / (kPi * kPi)) * t * datan;
    const Grad4 d_v = detail::scale(d_r, dv_dr);
    const Grad4 d_S = detail::scale(parts.d_iou, -1.0);

    const double denom = S + v;
    if (denom > 0.0) {
      for (int k = 0; k < 4; ++k)
        g[k] += (2.0 * v * d_v[k] * denom - v * v * (d_S[k] + d_v[k])) /
                (denom * denom);
    }
  } else if (kind != LossKind::kIoU) {
    throw std::invalid_argument("loss_gradient: unknown kind");
  }

  out.d = g;
  return out;
}

}  // namespace detkit
