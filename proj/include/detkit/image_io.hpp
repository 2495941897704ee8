// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/image_io.hpp
 * @brief PNG and JPEG file I/O for ImageBuffer, via libpng and libjpeg.
 *
 * Reading sniffs the format from the file's magic bytes, so any extension
 * works. Everything decodes to 8-bit RGB; grayscale and alpha inputs are
 * expanded / composited by the codecs. All failures raise std::runtime_error
 * with the offending path in the message.
 */

#pragma once

#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "detkit/image.hpp"

namespace detkit {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(mgr->jump, 1);
}

inline ImageBuffer read_jpeg_file(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path.string());

  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;

  std::vector<std::uint8_t> pixels;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("JPEG decode failed: " + path.string());
  }

  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  ImageBuffer img(Size2D(w, h));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = img.px(0, static_cast<int>(cinfo.output_scanline));
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return img;
}

inline ImageBuffer read_png_file(const std::filesystem::path& path) {
  png_image pimg;
  std::memset(&pimg, 0, sizeof(pimg));
  pimg.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pimg, path.string().c_str()))
    throw std::runtime_error("PNG open failed: " + path.string() + ": " +
                             pimg.message);
  pimg.format = PNG_FORMAT_RGB;
  ImageBuffer img(Size2D(static_cast<int>(pimg.width),
                         static_cast<int>(pimg.height)));
  if (!png_image_finish_read(&pimg, nullptr, img.data.data(), 0, nullptr)) {
    png_image_free(&pimg);
    throw std::runtime_error("PNG decode failed: " + path.string() + ": " +
                             pimg.message);
  }
  return img;
}

}  // namespace detail

/// True if the file starts with the PNG signature.
inline bool sniff_png(const std::filesystem::path& path) {
  detail::FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path.string());
  unsigned char sig[8] = {0};
  const std::size_t n = std::fread(sig, 1, 8, f.get());
  return n == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

/// Decode a PNG or JPEG file to 8-bit RGB.
inline ImageBuffer read_image(const std::filesystem::path& path) {
  return sniff_png(path) ? detail::read_png_file(path)
                         : detail::read_jpeg_file(path);
}

/// Image dimensions without a full decode (header read only for JPEG).
inline Size2D read_image_dims(const std::filesystem::path& path) {
  if (sniff_png(path)) {
    png_image pimg;
    std::memset(&pimg, 0, sizeof(pimg));
    pimg.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&pimg, path.string().c_str()))
      throw std::runtime_error("PNG open failed: " + path.string());
    const Size2D d(static_cast<int>(pimg.width),
                   static_cast<int>(pimg.height));
    png_image_free(&pimg);
    return d;
  }
  detail::FilePtr f(std::fopen(path.string().c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open " + path.string());
  jpeg_decompress_struct cinfo;
  detail::JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = detail::jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw std::runtime_error("JPEG header read failed: " + path.string());
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  const Size2D d(static_cast<int>(cinfo.image_width),
                 static_cast<int>(cinfo.image_height));
  jpeg_destroy_decompress(&cinfo);
  return d;
}

/// Encode to PNG. Deterministic: the same pixels always give the same bytes.
inline void write_png(const ImageBuffer& img,
                      const std::filesystem::path& path) {
  png_image pimg;
  std::memset(&pimg, 0, sizeof(pimg));
  pimg.version = PNG_IMAGE_VERSION;
  pimg.width = static_cast<png_uint_32>(img.width());
  pimg.height = static_cast<png_uint_32>(img.height());
  pimg.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&pimg, path.string().c_str(), 0,
                               img.data.data(), 0, nullptr))
    throw std::runtime_error("PNG write failed: " + path.string() + ": " +
                             pimg.message);
}

/// Encode to JPEG with the given quality (1..100).
inline void write_jpeg(const ImageBuffer& img,
                       const std::filesystem::path& path, int quality = 92) {
  detail::FilePtr f(std::fopen(path.string().c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open for write: " + path.string());

  jpeg_compress_struct cinfo;
  detail::JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = detail::jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw std::runtime_error("JPEG encode failed: " + path.string());
  }

  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f.get());
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(
        img.px(0, static_cast<int>(cinfo.next_scanline)));
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

}  // namespace detkit
