// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/geometry.hpp
 * @brief Axis-aligned boxes, normalized labels, IoU, and affine transforms.
 *
 * Boxes live in corner form (x_min, y_min, x_max, y_max) everywhere inside
 * the library. The normalized center/size form used by YOLO label files only
 * appears at serialization boundaries, via NormLabel.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace detkit {

// ===================== points and sizes =====================

/// 2-D point, pixel coordinates.
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2D&) const = default;
};

/// Squared Euclidean distance between two points.
inline double dist_sq(const Point2D& a, const Point2D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Integer image dimensions. Always at least 1x1.
struct Size2D {
  int width = 1;
  int height = 1;

  Size2D() = default;
  Size2D(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1)
      throw std::invalid_argument("Size2D: dimensions must be at least 1x1");
  }

  bool operator==(const Size2D&) const = default;
};

// ===================== boxes =====================

/**
 * @brief Axis-aligned box in absolute pixel coordinates, corner form.
 *
 * Construction enforces x_min < x_max and y_min < y_max with finite values,
 * so a PixelBox always has strictly positive area. Code receiving a PixelBox
 * never needs to re-check validity.
 */
struct PixelBox {
  double x_min;
  double y_min;
  double x_max;
  double y_max;

  PixelBox(double x0, double y0, double x1, double y1)
      : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
    if (!(std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
          std::isfinite(y1)))
      throw std::invalid_argument("PixelBox: coordinates must be finite");
    if (!(x0 < x1 && y0 < y1))
      throw std::invalid_argument(
          "PixelBox: needs x_min < x_max and y_min < y_max");
  }

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
  Point2D top_left() const { return {x_min, y_min}; }
  Point2D bottom_right() const { return {x_max, y_max}; }

  bool operator==(const PixelBox&) const = default;
};

/// Box area. Strictly positive by construction.
inline double box_area(const PixelBox& b) { return b.width() * b.height(); }

/**
 * @brief Intersection-over-union of two boxes.
 *
 * Returns a value in [0, 1]. Boxes that merely touch along an edge or at a
 * corner have zero intersection area and therefore IoU 0. Because the ratio
 * is scale-free per axis, the result is identical whether the boxes are
 * expressed in pixels or in normalized fractions of the same image.
 */
inline double iou(const PixelBox& a, const PixelBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (box_area(a) + box_area(b) - inter);
}

/// Squared diagonal length of the smallest box enclosing both arguments.
inline double enclosing_diag_sq(const PixelBox& a, const PixelBox& b) {
  const double cw = std::max(a.x_max, b.x_max) - std::min(a.x_min, b.x_min);
  const double ch = std::max(a.y_max, b.y_max) - std::min(a.y_min, b.y_min);
  return cw * cw + ch * ch;
}

// ===================== normalized labels =====================

namespace detail {
/// Slack allowed when checking that a normalized box stays inside the unit
/// square. Covers accumulated floating-point error, nothing more.
inline constexpr double kNormEdgeTol = 1e-9;
}  // namespace detail

/**
 * @brief One object annotation in YOLO text-label form.
 *
 * Center and size are fractions of the image. Construction checks that the
 * class id is non-negative, that width and height are strictly positive, and
 * that the implied corners stay inside [0, 1] up to a 1e-9 slack.
 */
struct NormLabel {
  int class_id;
  double cx;
  double cy;
  double w;
  double h;

  NormLabel(int cls, double cx_, double cy_, double w_, double h_)
      : class_id(cls), cx(cx_), cy(cy_), w(w_), h(h_) {
    if (cls < 0) throw std::invalid_argument("NormLabel: negative class id");
    if (!(std::isfinite(cx_) && std::isfinite(cy_) && std::isfinite(w_) &&
          std::isfinite(h_)))
      throw std::invalid_argument("NormLabel: values must be finite");
    if (!(w_ > 0.0 && h_ > 0.0))
      throw std::invalid_argument("NormLabel: width/height must be positive");
    const double t = detail::kNormEdgeTol;
    if (cx_ - 0.5 * w_ < -t || cx_ + 0.5 * w_ > 1.0 + t ||
        cy_ - 0.5 * h_ < -t || cy_ + 0.5 * h_ > 1.0 + t)
      throw std::invalid_argument("NormLabel: box leaves the unit square");
  }

  bool operator==(const NormLabel&) const = default;
};

/**
 * @brief Normalized label -> absolute pixel box.
 *
 * Corners are clamped into [0, width] x [0, height]; a valid NormLabel can
 * only overhang by the constructor's 1e-9 slack, so the clamp is a no-op for
 * anything but rounding dust. A label that collapses to zero extent after
 * clamping is corrupt and raises std::invalid_argument.
 */
inline PixelBox to_pixel(const NormLabel& l, const Size2D& dims) {
  const double W = static_cast<double>(dims.width);
  const double H = static_cast<double>(dims.height);
  const double x0 = std::clamp((l.cx - 0.5 * l.w) * W, 0.0, W);
  const double x1 = std::clamp((l.cx + 0.5 * l.w) * W, 0.0, W);
  const double y0 = std::clamp((l.cy - 0.5 * l.h) * H, 0.0, H);
  const double y1 = std::clamp((l.cy + 0.5 * l.h) * H, 0.0, H);
  if (!(x0 < x1 && y0 < y1))
    throw std::invalid_argument("to_pixel: label collapses to zero extent");
  return PixelBox(x0, y0, x1, y1);
}

/**
 * @brief Absolute pixel box -> normalized label.
 *
 * The box must lie inside the image up to a tolerance of 1e-6 of the
 * corresponding dimension; anything past that is treated as a caller bug.
 */
inline NormLabel to_norm(const PixelBox& b, const Size2D& dims,
                         int class_id = 0) {
  const double W = static_cast<double>(dims.width);
  const double H = static_cast<double>(dims.height);
  if (b.x_min < -1e-6 * W || b.x_max > W * (1.0 + 1e-6) ||
      b.y_min < -1e-6 * H || b.y_max > H * (1.0 + 1e-6))
    throw std::invalid_argument("to_norm: box outside image bounds");
  const double x0 = std::clamp(b.x_min, 0.0, W);
  const double x1 = std::clamp(b.x_max, 0.0, W);
  const double y0 = std::clamp(b.y_min, 0.0, H);
  const double y1 = std::clamp(b.y_max, 0.0, H);
  if (!(x0 < x1 && y0 < y1))
    throw std::invalid_argument("to_norm: box collapses to zero extent");
  return NormLabel(class_id, 0.5 * (x0 + x1) / W, 0.5 * (y0 + y1) / H,
                   (x1 - x0) / W, (y1 - y0) / H);
}

/// Clip a box to the image. Returns std::nullopt when nothing with positive
/// area remains (box fully outside, or touching only along the border).
inline std::optional<PixelBox> clip_box(const PixelBox& b,
                                        const Size2D& dims) {
  const double x0 = std::max(b.x_min, 0.0);
  const double y0 = std::max(b.y_min, 0.0);
  const double x1 = std::min(b.x_max, static_cast<double>(dims.width));
  const double y1 = std::min(b.y_max, static_cast<double>(dims.height));
  if (!(x0 < x1 && y0 < y1)) return std::nullopt;
  return PixelBox(x0, y0, x1, y1);
}

// ===================== affine maps =====================

/**
 * @brief 2x3 affine transform of the plane, row-major.
 *
 *   x' = m[0]*x + m[1]*y + m[2]
 *   y' = m[3]*x + m[4]*y + m[5]
 *
 * The linear part must be invertible (|det| > 1e-12); the flip and rotation
 * factories below always satisfy that.
 */
struct AffineMap {
  std::array<double, 6> m;

  explicit AffineMap(const std::array<double, 6>& coeffs) : m(coeffs) {
    if (std::abs(det()) <= 1e-12)
      throw std::invalid_argument("AffineMap: linear part is singular");
  }

  double det() const { return m[0] * m[4] - m[1] * m[3]; }

  Point2D apply(const Point2D& p) const {
    return {m[0] * p.x + m[1] * p.y + m[2], m[3] * p.x + m[4] * p.y + m[5]};
  }

  /// Composite that applies `this` first, then `next`.
  AffineMap then(const AffineMap& next) const {
    const auto& a = next.m;
    const auto& b = m;
    return AffineMap({a[0] * b[0] + a[1] * b[3], a[0] * b[1] + a[1] * b[4],
                      a[0] * b[2] + a[1] * b[5] + a[2],
                      a[3] * b[0] + a[4] * b[3], a[3] * b[1] + a[4] * b[4],
                      a[3] * b[2] + a[4] * b[5] + a[5]});
  }

  AffineMap inverse() const {
    const double d = det();
    const double ia = m[4] / d;
    const double ib = -m[1] / d;
    const double ic = -m[3] / d;
    const double id = m[0] / d;
    return AffineMap({ia, ib, -(ia * m[2] + ib * m[5]), ic, id,
                      -(ic * m[2] + id * m[5])});
  }

  static AffineMap identity() { return AffineMap({1, 0, 0, 0, 1, 0}); }

  static AffineMap translate(double tx, double ty) {
    return AffineMap({1, 0, tx, 0, 1, ty});
  }

  /// Mirror across the vertical center line of an image `width` wide.
  static AffineMap hflip(double width) {
    return AffineMap({-1, 0, width, 0, 1, 0});
  }

  /// Mirror across the horizontal center line of an image `height` tall.
  static AffineMap vflip(double height) {
    return AffineMap({1, 0, 0, 0, -1, height});
  }

  /// Counterclockwise rotation by `deg` degrees about (cx, cy), in the usual
  /// image convention where y grows downward.
  static AffineMap rotate_deg_about(double deg, double cx, double cy) {
    const double rad = deg * 3.14159265358979323846 / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    return AffineMap({c, s, cx - c * cx - s * cy, -s, c,
                      cy + s * cx - c * cy});
  }
};

/**
 * @brief Axis-aligned bounding box of a box's image under an affine map.
 *
 * All four corners are transformed and re-boxed, which is exact for flips
 * and axis-aligned moves and the standard conservative hull for rotations.
 * Raises std::invalid_argument if the output degenerates to zero extent.
 */
inline PixelBox apply_affine_to_box(const PixelBox& b, const AffineMap& map) {
  const Point2D p0 = map.apply({b.x_min, b.y_min});
  const Point2D p1 = map.apply({b.x_max, b.y_min});
  const Point2D p2 = map.apply({b.x_min, b.y_max});
  const Point2D p3 = map.apply({b.x_max, b.y_max});
  const double x0 = std::min({p0.x, p1.x, p2.x, p3.x});
  const double x1 = std::max({p0.x, p1.x, p2.x, p3.x});
  const double y0 = std::min({p0.y, p1.y, p2.y, p3.y});
  const double y1 = std::max({p0.y, p1.y, p2.y, p3.y});
  return PixelBox(x0, y0, x1, y1);
}

}  // namespace detkit
