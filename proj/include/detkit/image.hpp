// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/image.hpp
 * @brief In-memory 8-bit RGB image with a few pixel-level primitives.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "detkit/geometry.hpp"

namespace detkit {

/// Interleaved RGB, 8 bits per channel, row-major from the top-left pixel.
struct ImageBuffer {
  Size2D dims;
  std::vector<std::uint8_t> data;

  ImageBuffer() : dims(), data(3, 0) {}

  explicit ImageBuffer(Size2D d, std::uint8_t fill = 0)
      : dims(d),
        data(static_cast<std::size_t>(d.width) * d.height * 3, fill) {}

  int width() const { return dims.width; }
  int height() const { return dims.height; }

  std::uint8_t* px(int x, int y) {
    return data.data() + 3 * (static_cast<std::size_t>(y) * dims.width + x);
  }
  const std::uint8_t* px(int x, int y) const {
    return data.data() + 3 * (static_cast<std::size_t>(y) * dims.width + x);
  }

  bool operator==(const ImageBuffer&) const = default;
};

/// Mirror left-right. Exact pixel permutation, an involution.
inline ImageBuffer flip_horizontal(const ImageBuffer& img) {
  ImageBuffer out(img.dims);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* s = img.px(img.width() - 1 - x, y);
      std::uint8_t* d = out.px(x, y);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
    }
  return out;
}

/// Mirror top-bottom. Exact pixel permutation, an involution.
inline ImageBuffer flip_vertical(const ImageBuffer& img) {
  ImageBuffer out(img.dims);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const std::uint8_t* s = img.px(x, img.height() - 1 - y);
      std::uint8_t* d = out.px(x, y);
      d[0] = s[0];
      d[1] = s[1];
      d[2] = s[2];
    }
  return out;
}

/**
 * @brief Warp an image through the inverse of `map` into a canvas of
 *        `out_dims`, sampling bilinearly with black outside the source.
 *
 * `map` takes source coordinates to destination coordinates; each output
 * pixel center is pulled back through map.inverse(). Pixel (i, j) has its
 * center at (i + 0.5, j + 0.5).
 */
inline ImageBuffer warp_affine(const ImageBuffer& img, const AffineMap& map,
                               Size2D out_dims) {
  ImageBuffer out(out_dims, 0);
  const AffineMap inv = map.inverse();
  const int sw = img.width();
  const int sh = img.height();

  for (int y = 0; y < out_dims.height; ++y) {
    for (int x = 0; x < out_dims.width; ++x) {
      const Point2D src = inv.apply({x + 0.5, y + 0.5});
      const double fx = src.x - 0.5;
      const double fy = src.y - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const double wx = fx - x0;
      const double wy = fy - y0;

      double acc[3] = {0, 0, 0};
      const double weights[4] = {(1 - wx) * (1 - wy), wx * (1 - wy),
                                 (1 - wx) * wy, wx * wy};
      const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
      const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int t = 0; t < 4; ++t) {
        if (xs[t] < 0 || xs[t] >= sw || ys[t] < 0 || ys[t] >= sh) continue;
        const std::uint8_t* s = img.px(xs[t], ys[t]);
        acc[0] += weights[t] * s[0];
        acc[1] += weights[t] * s[1];
        acc[2] += weights[t] * s[2];
      }
      std::uint8_t* d = out.px(x, y);
      for (int c = 0; c < 3; ++c)
        d[c] = static_cast<std::uint8_t>(
            std::clamp(std::lround(acc[c]), 0L, 255L));
    }
  }
  return out;
}

/**
 * @brief Separable Gaussian blur with a normalized odd-sized kernel.
 *
 * Borders replicate the edge pixel. sigma <= 0 selects the conventional
 * kernel-size rule 0.3 * ((ksize - 1) * 0.5 - 1) + 0.8.
 */
inline ImageBuffer gaussian_blur(const ImageBuffer& img, int ksize,
                                 double sigma) {
  if (ksize < 1 || ksize % 2 == 0)
    throw std::invalid_argument("gaussian_blur: kernel size must be odd");
  if (sigma <= 0.0) sigma = 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8;

  const int r = ksize / 2;
  std::vector<double> kernel(ksize);
  double sum = 0.0;
  for (int i = 0; i < ksize; ++i) {
    const double d = i - r;
    kernel[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += kernel[i];
  }
  for (double& k : kernel) k /= sum;

  const int w = img.width();
  const int h = img.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h * 3);

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int i = -r; i <= r; ++i) {
        const int xi = std::clamp(x + i, 0, w - 1);
        const std::uint8_t* s = img.px(xi, y);
        const double k = kernel[i + r];
        acc[0] += k * s[0];
        acc[1] += k * s[1];
        acc[2] += k * s[2];
      }
      double* d = &tmp[3 * (static_cast<std::size_t>(y) * w + x)];
      d[0] = acc[0];
      d[1] = acc[1];
      d[2] = acc[2];
    }

  ImageBuffer out(img.dims);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int i = -r; i <= r; ++i) {
        const int yi = std::clamp(y + i, 0, h - 1);
        const double* s = &tmp[3 * (static_cast<std::size_t>(yi) * w + x)];
        const double k = kernel[i + r];
        acc[0] += k * s[0];
        acc[1] += k * s[1];
        acc[2] += k * s[2];
      }
      std::uint8_t* d = out.px(x, y);
      for (int c = 0; c < 3; ++c)
        d[c] = static_cast<std::uint8_t>(
            std::clamp(std::lround(acc[c]), 0L, 255L));
    }
  return out;
}

}  // namespace detkit
