// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/augment.hpp
 * @brief The ten-fold augmentation set (flips, 45-degree rotations, Gaussian
 *        blur, and their composites) with matching label transforms, plus
 *        CLAHE preprocessing.
 *
 * Geometric bookkeeping is exact: every kind exposes its pixel-coordinate
 * affine map through affine_for, images are resampled through that map, and
 * labels are pushed through the same map, so the two can never drift apart.
 * Flips are implemented as pure pixel permutations (bit-exact involutions);
 * only rotation actually resamples. Rotation expands the canvas to the
 * smallest integer size containing all four rotated image corners, filling
 * the uncovered area with black, so no label can ever be pushed off-canvas
 * and the label count is invariant across all kinds.
 */

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "detkit/clahe.hpp"
#include "detkit/geometry.hpp"
#include "detkit/image.hpp"

namespace detkit {

// ===================== kinds =====================

/// The ten-fold augmentation family. Original is member zero so that
/// iterating kAllAugmentKinds always emits the untouched sample first.
enum class AugmentKind {
  kOriginal,
  kHFlip,
  kVFlip,
  kHVFlip,
  kRot45,
  kHFlipRot45,
  kVFlipRot45,
  kHVFlipRot45,
  kGaussBlur,
  kGaussBlurRot45,
};

inline constexpr std::array<AugmentKind, 10> kAllAugmentKinds = {
    AugmentKind::kOriginal,      AugmentKind::kHFlip,
    AugmentKind::kVFlip,         AugmentKind::kHVFlip,
    AugmentKind::kRot45,         AugmentKind::kHFlipRot45,
    AugmentKind::kVFlipRot45,    AugmentKind::kHVFlipRot45,
    AugmentKind::kGaussBlur,     AugmentKind::kGaussBlurRot45,
};

/// Short lowercase tag, used in emitted file stems.
inline const char* augment_kind_tag(AugmentKind k) {
  switch (k) {
    case AugmentKind::kOriginal: return "orig";
    case AugmentKind::kHFlip: return "hflip";
    case AugmentKind::kVFlip: return "vflip";
    case AugmentKind::kHVFlip: return "hvflip";
    case AugmentKind::kRot45: return "rot45";
    case AugmentKind::kHFlipRot45: return "hflip_rot45";
    case AugmentKind::kVFlipRot45: return "vflip_rot45";
    case AugmentKind::kHVFlipRot45: return "hvflip_rot45";
    case AugmentKind::kGaussBlur: return "blur";
    case AugmentKind::kGaussBlurRot45: return "blur_rot45";
  }
  return "?";
}

inline bool kind_has_hflip(AugmentKind k) {
  return k == AugmentKind::kHFlip || k == AugmentKind::kHVFlip ||
         k == AugmentKind::kHFlipRot45 || k == AugmentKind::kHVFlipRot45;
}

inline bool kind_has_vflip(AugmentKind k) {
  return k == AugmentKind::kVFlip || k == AugmentKind::kHVFlip ||
         k == AugmentKind::kVFlipRot45 || k == AugmentKind::kHVFlipRot45;
}

inline bool kind_has_rotation(AugmentKind k) {
  return k == AugmentKind::kRot45 || k == AugmentKind::kHFlipRot45 ||
         k == AugmentKind::kVFlipRot45 || k == AugmentKind::kHVFlipRot45 ||
         k == AugmentKind::kGaussBlurRot45;
}

inline bool kind_has_blur(AugmentKind k) {
  return k == AugmentKind::kGaussBlur || k == AugmentKind::kGaussBlurRot45;
}

// ===================== parameters =====================

/// The conventional kernel-size-to-sigma rule; 2.6 for the default kernel 15.
inline double default_blur_sigma(int kernel) {
  return 0.3 * ((kernel - 1) * 0.5 - 1.0) + 0.8;
}

struct AugmentParams {
  double rotation_deg = 45.0;
  int blur_kernel = 15;
  double blur_sigma = default_blur_sigma(15);
  double clahe_clip = 2.0;
  int clahe_tiles_x = 8;
  int clahe_tiles_y = 8;

  void validate() const {
    if (blur_kernel < 1 || blur_kernel % 2 == 0)
      throw std::invalid_argument("AugmentParams: blur_kernel must be odd");
    if (!(blur_sigma > 0.0))
      throw std::invalid_argument("AugmentParams: blur_sigma must be > 0");
    if (!(clahe_clip > 0.0))
      throw std::invalid_argument("AugmentParams: clahe_clip must be > 0");
    if (clahe_tiles_x < 1 || clahe_tiles_y < 1)
      throw std::invalid_argument("AugmentParams: clahe_tiles must be >= 1");
  }
};

// ===================== geometry of each kind =====================

namespace detail {

/// Rotated-canvas size: the smallest integer box containing the four
/// rotated corners of a dims-sized image.
inline Size2D rotated_canvas(Size2D dims, double deg) {
  const double rad = deg * 3.14159265358979323846 / 180.0;
  const double c = std::abs(std::cos(rad));
  const double s = std::abs(std::sin(rad));
  const double w = dims.width * c + dims.height * s;
  const double h = dims.width * s + dims.height * c;
  return Size2D(static_cast<int>(std::ceil(w - 1e-9)),
                static_cast<int>(std::ceil(h - 1e-9)));
}

}  // namespace detail

/**
 * @brief The pixel-coordinate map of a kind's geometric part, with the
 *        output canvas size.
 *
 * Flips keep the canvas; rotation recenters into the expanded canvas. Blur
 * has no geometric part, so GaussBlur maps via the identity.
 */
inline std::pair<AffineMap, Size2D> affine_for(AugmentKind kind, Size2D dims,
                                               double rotation_deg = 45.0) {
  AffineMap map = AffineMap::identity();
  if (kind_has_hflip(kind)) map = map.then(AffineMap::hflip(dims.width));
  if (kind_has_vflip(kind)) map = map.then(AffineMap::vflip(dims.height));
  if (!kind_has_rotation(kind)) return {map, dims};

  const Size2D out = detail::rotated_canvas(dims, rotation_deg);
  const AffineMap rot =
      AffineMap::translate(-0.5 * dims.width, -0.5 * dims.height)
          .then(AffineMap::rotate_deg_about(rotation_deg, 0.0, 0.0))
          .then(AffineMap::translate(0.5 * out.width, 0.5 * out.height));
  return {map.then(rot), out};
}

// ===================== image and label transforms =====================

/// Apply one augmentation kind to an image.
inline ImageBuffer transform_image(const ImageBuffer& img, AugmentKind kind,
                                   const AugmentParams& p = {}) {
  p.validate();
  ImageBuffer work = img;
  if (kind_has_blur(kind))
    work = gaussian_blur(work, p.blur_kernel, p.blur_sigma);
  if (kind_has_hflip(kind)) work = flip_horizontal(work);
  if (kind_has_vflip(kind)) work = flip_vertical(work);
  if (kind_has_rotation(kind)) {
    // Flips are already baked into the pixels, so only the rotation part of
    // the map remains to be resampled.
    const auto [rot, out_dims] =
        affine_for(AugmentKind::kRot45, work.dims, p.rotation_deg);
    work = warp_affine(work, rot, out_dims);
  }
  return work;
}

/// Push labels through a kind's geometric map. Non-geometric kinds return
/// the labels untouched.
inline std::vector<NormLabel> transform_labels(
    const std::vector<NormLabel>& labels, AugmentKind kind, Size2D src,
    const AugmentParams& p = {}) {
  const auto [map, out_dims] = affine_for(kind, src, p.rotation_deg);
  if (kind == AugmentKind::kOriginal || kind == AugmentKind::kGaussBlur)
    return labels;

  std::vector<NormLabel> out;
  out.reserve(labels.size());
  for (const NormLabel& l : labels) {
    const PixelBox px = to_pixel(l, src);
    const PixelBox moved = apply_affine_to_box(px, map);
    out.push_back(to_norm(moved, out_dims, l.class_id));
  }
  return out;
}

// ===================== CLAHE entry point =====================

/// CLAHE preprocessing with the module's parameter block.
inline ImageBuffer clahe(const ImageBuffer& img, const AugmentParams& p = {}) {
  p.validate();
  return clahe_rgb(img, p.clahe_clip, p.clahe_tiles_x, p.clahe_tiles_y);
}

// ===================== ten-fold expansion =====================

/// One augmented output: the image, its labels, and where it came from.
struct AugmentedSample {
  AugmentKind kind;
  ImageBuffer image;
  std::vector<NormLabel> labels;
  std::string provenance;
};

/// Expand one (image, labels) pair into the full ten-kind family. The
/// Original sample carries the input bit-identically.
inline std::vector<AugmentedSample> augment_sample(
    const ImageBuffer& img, const std::vector<NormLabel>& labels,
    const AugmentParams& p = {}, const std::string& provenance = "") {
  p.validate();
  std::vector<AugmentedSample> out;
  out.reserve(kAllAugmentKinds.size());
  for (const AugmentKind kind : kAllAugmentKinds) {
    AugmentedSample s{kind,
                      kind == AugmentKind::kOriginal
                          ? img
                          : transform_image(img, kind, p),
                      transform_labels(labels, kind, img.dims, p),
                      provenance};
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detkit
