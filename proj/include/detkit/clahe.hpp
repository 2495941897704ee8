// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/clahe.hpp
 * @brief Contrast-limited adaptive histogram equalization on the luminance
 *        channel of an RGB image.
 *
 * The image is split into a grid of tiles (8x8 by default). Each tile gets a
 * clipped, renormalized histogram of the luminance plane; the clipped excess
 * is spilled back uniformly across all bins so the tile's mapping keeps full
 * mass. Every output pixel is then remapped by bilinear interpolation
 * between the lookup tables of the four surrounding tile centers, which
 * removes the blocking a per-tile mapping would show.
 *
 * Color handling: RGB converts to BT.601 full-range YCbCr, only Y is
 * equalized, and the original chroma is reattached on the way back. A
 * constant image has constant luminance everywhere, every tile maps that
 * single occupied bin to itself after renormalization, and the output equals
 * the input.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detkit/image.hpp"

namespace detkit {

namespace detail {

/// Clip one 256-bin histogram at `limit` and spread the excess uniformly.
/// The leftover after integer division goes one count at a time to evenly
/// spaced bins, so total mass is preserved exactly.
inline void clip_histogram(std::array<int, 256>& hist, int limit) {
  int excess = 0;
  for (int& b : hist)
    if (b > limit) {
      excess += b - limit;
      b = limit;
    }
  const int add = excess / 256;
  int rest = excess % 256;
  for (int& b : hist) b += add;
  if (rest > 0) {
    const int step = std::max(1, 256 / rest);
    for (int i = 0; i < 256 && rest > 0; i += step, --rest) hist[i]++;
  }
}

}  // namespace detail

/**
 * @brief CLAHE on a single 8-bit plane.
 *
 * `clip` is the contrast limit as a multiple of the average bin height of a
 * uniform tile histogram (so clip = 1 leaves a flat histogram untouched);
 * the per-tile integer limit never drops below 1. Tile counts are clamped to
 * the plane dimensions, and tile boundaries are fractional, so any plane
 * size works without padding.
 */
inline std::vector<std::uint8_t> clahe_plane(
    const std::vector<std::uint8_t>& plane, int width, int height,
    double clip = 2.0, int tiles_x = 8, int tiles_y = 8) {
  if (width < 1 || height < 1 ||
      plane.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("clahe_plane: bad plane dimensions");
  if (clip <= 0.0 || tiles_x < 1 || tiles_y < 1)
    throw std::invalid_argument("clahe_plane: bad parameters");

  const int tx = std::min(tiles_x, width);
  const int ty = std::min(tiles_y, height);
  const double tile_w = static_cast<double>(width) / tx;
  const double tile_h = static_cast<double>(height) / ty;

  const auto tile_of = [](int coord, double tile_span, int tiles) {
    return std::min(tiles - 1, static_cast<int>(coord / tile_span));
  };

  // Histogram per tile, then LUT per tile.
  std::vector<std::array<int, 256>> hist(
      static_cast<std::size_t>(tx) * ty, std::array<int, 256>{});
  std::vector<int> tile_area(static_cast<std::size_t>(tx) * ty, 0);
  for (int y = 0; y < height; ++y) {
    const int tj = tile_of(y, tile_h, ty);
    for (int x = 0; x < width; ++x) {
      const int ti = tile_of(x, tile_w, tx);
      const std::size_t t = static_cast<std::size_t>(tj) * tx + ti;
      hist[t][plane[static_cast<std::size_t>(y) * width + x]]++;
      tile_area[t]++;
    }
  }

  std::vector<std::array<std::uint8_t, 256>> lut(
      static_cast<std::size_t>(tx) * ty);
  for (std::size_t t = 0; t < hist.size(); ++t) {
    const int limit =
        std::max(1, static_cast<int>(clip * tile_area[t] / 256.0));
    detail::clip_histogram(hist[t], limit);
    long cum = 0;
    const double scale = 255.0 / tile_area[t];
    for (int v = 0; v < 256; ++v) {
      cum += hist[t][v];
      lut[t][v] = static_cast<std::uint8_t>(
          std::clamp(std::lround(cum * scale), 0L, 255L));
    }
  }

  // Bilinear interpolation between the four nearest tile LUTs, with tile
  // centers as interpolation nodes and clamping past the outer centers.
  std::vector<std::uint8_t> out(plane.size());
  for (int y = 0; y < height; ++y) {
    const double gy = (y + 0.5) / tile_h - 0.5;
    int j0 = static_cast<int>(std::floor(gy));
    double wy = gy - j0;
    if (j0 < 0) {
      j0 = 0;
      wy = 0.0;
    }
    int j1 = j0 + 1;
    if (j1 > ty - 1) {
      j1 = ty - 1;
      wy = 0.0;
    }
    for (int x = 0; x < width; ++x) {
      const double gx = (x + 0.5) / tile_w - 0.5;
      int i0 = static_cast<int>(std::floor(gx));
      double wx = gx - i0;
      if (i0 < 0) {
        i0 = 0;
        wx = 0.0;
      }
      int i1 = i0 + 1;
      if (i1 > tx - 1) {
        i1 = tx - 1;
        wx = 0.0;
      }
      const std::uint8_t v = plane[static_cast<std::size_t>(y) * width + x];
      const double v00 = lut[static_cast<std::size_t>(j0) * tx + i0][v];
      const double v01 = lut[static_cast<std::size_t>(j0) * tx + i1][v];
      const double v10 = lut[static_cast<std::size_t>(j1) * tx + i0][v];
      const double v11 = lut[static_cast<std::size_t>(j1) * tx + i1][v];
      const double mix = (1 - wy) * ((1 - wx) * v00 + wx * v01) +
                         wy * ((1 - wx) * v10 + wx * v11);
      out[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(mix), 0L, 255L));
    }
  }
  return out;
}

/// CLAHE on the luminance of an RGB image; chroma passes through.
inline ImageBuffer clahe_rgb(const ImageBuffer& img, double clip = 2.0,
                             int tiles_x = 8, int tiles_y = 8) {
  const int w = img.width();
  const int h = img.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;

  std::vector<std::uint8_t> luma(n);
  std::vector<float> cb(n), cr(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = img.data[3 * i];
    const double g = img.data[3 * i + 1];
    const double b = img.data[3 * i + 2];
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    luma[i] = static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
    cb[i] = static_cast<float>(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b);
    cr[i] = static_cast<float>(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b);
  }

  const std::vector<std::uint8_t> eq =
      clahe_plane(luma, w, h, clip, tiles_x, tiles_y);

  ImageBuffer out(img.dims);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = eq[i];
    const double pb = cb[i] - 128.0;
    const double pr = cr[i] - 128.0;
    const double r = y + 1.402 * pr;
    const double g = y - 0.344136 * pb - 0.714136 * pr;
    const double b = y + 1.772 * pb;
    out.data[3 * i] =
        static_cast<std::uint8_t>(std::clamp(std::lround(r), 0L, 255L));
    out.data[3 * i + 1] =
        static_cast<std::uint8_t>(std::clamp(std::lround(g), 0L, 255L));
    out.data[3 * i + 2] =
        static_cast<std::uint8_t>(std::clamp(std::lround(b), 0L, 255L));
  }
  return out;
}

}  // namespace detkit
