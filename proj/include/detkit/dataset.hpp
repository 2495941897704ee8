// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

/**
 * @file detkit/dataset.hpp
 * @brief Dataset construction: annotation ingestion, 70/20/10 splitting,
 *        negative-sample injection, training-split augmentation, and
 *        emission of a YOLO-style file tree.
 *
 * Ingestion accepts three source shapes: a JSON file of pixel-coordinate
 * boxes keyed by image id, directories of color-coded segmentation masks
 * (connected components of a class color become boxes), and plain image
 * directories used as negative pools. Records flow through split_dataset and
 * inject_negatives into a DatasetManifest, and build_dataset streams the
 * manifest out to disk, optionally expanding every training record ten-fold
 * through the augmentation family and applying CLAHE to training images.
 *
 * Determinism is a hard guarantee: records are sorted by id before the
 * seeded shuffle, per-image work depends only on the master seed and the
 * image id, PNG re-encoding is deterministic, and the JSON/YAML outputs have
 * stable key order. Identical inputs, seed, and flags give byte-identical
 * trees.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "detkit/augment.hpp"
#include "detkit/geometry.hpp"
#include "detkit/image.hpp"
#include "detkit/image_io.hpp"
#include "detkit/rng.hpp"

namespace detkit::dataset {

namespace fs = std::filesystem;

/// File-system failure during emission or ingestion.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ===================== records and manifests =====================

enum class SourceKind { kBBoxJson, kColorMask, kNegativePool };

inline const char* source_kind_name(SourceKind k) {
  switch (k) {
    case SourceKind::kBBoxJson: return "bbox_json";
    case SourceKind::kColorMask: return "color_mask";
    case SourceKind::kNegativePool: return "negative_pool";
  }
  return "?";
}

enum class Polarity { kPositive, kNegative };

/// One source image with its annotations. Negative exactly when unlabeled.
struct ImageRecord {
  std::string id;
  fs::path path;
  Size2D dims;
  Polarity polarity = Polarity::kPositive;
  std::vector<NormLabel> labels;
  SourceKind source = SourceKind::kBBoxJson;
};

enum class SplitAssignment { kTrain, kVal, kTest };

inline const char* split_name(SplitAssignment s) {
  switch (s) {
    case SplitAssignment::kTrain: return "train";
    case SplitAssignment::kVal: return "val";
    case SplitAssignment::kTest: return "test";
  }
  return "?";
}

struct SplitRecord {
  ImageRecord record;
  SplitAssignment split;
};

/// The assembled dataset before emission.
struct DatasetManifest {
  std::vector<SplitRecord> records;
  std::uint64_t seed = 0;
  double negative_ratio = 0.0;
  std::vector<std::string> class_names = {"polyp"};
};

/// One skipped input with the reason. Ingestion never throws on bad records;
/// it reports them and carries on.
struct IngestError {
  std::string id;
  std::string message;
};

struct IngestReport {
  std::vector<ImageRecord> records;
  std::vector<IngestError> errors;
};

// ===================== label file format =====================

/// One label line in YOLO text form: class then center/size at six decimals.
inline std::string serialize_label_line(const NormLabel& l) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f", l.class_id, l.cx,
                l.cy, l.w, l.h);
  return buf;
}

namespace detail {

/// Six-decimal quantization can push a box edge past the unit square by up
/// to ~1e-6; accept that much and clamp it away. Anything larger is treated
/// as data corruption, not rounding.
inline constexpr double kQuantizationSlack = 2e-6;

inline NormLabel make_label_clamped(int cls, double cx, double cy, double w,
                                    double h, double slack) {
  double x0 = cx - 0.5 * w;
  double x1 = cx + 0.5 * w;
  double y0 = cy - 0.5 * h;
  double y1 = cy + 0.5 * h;
  if (x0 < -slack || x1 > 1.0 + slack || y0 < -slack || y1 > 1.0 + slack)
    throw std::invalid_argument("label leaves the unit square");
  x0 = std::clamp(x0, 0.0, 1.0);
  x1 = std::clamp(x1, 0.0, 1.0);
  y0 = std::clamp(y0, 0.0, 1.0);
  y1 = std::clamp(y1, 0.0, 1.0);
  if (!(x0 < x1 && y0 < y1))
    throw std::invalid_argument("label has zero extent");
  return NormLabel(cls, 0.5 * (x0 + x1), 0.5 * (y0 + y1), x1 - x0, y1 - y0);
}

}  // namespace detail

/**
 * @brief Parse one YOLO label file (possibly empty, for negatives).
 *
 * Each line is `class cx cy w h`. Values are validated like NormLabel but
 * with a small extra slack for six-decimal quantization, which is clamped
 * away so the parsed labels are exactly valid.
 */
inline std::vector<NormLabel> parse_label_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file: " + path.string());
  std::vector<NormLabel> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ss(line);
    int cls;
    double cx, cy, w, h;
    if (!(ss >> cls >> cx >> cy >> w >> h))
      throw std::invalid_argument("malformed label line " +
                                  std::to_string(lineno) + " in " +
                                  path.string());
    std::string rest;
    if (ss >> rest)
      throw std::invalid_argument("trailing tokens on label line " +
                                  std::to_string(lineno) + " in " +
                                  path.string());
    try {
      out.push_back(detail::make_label_clamped(cls, cx, cy, w, h,
                                               detail::kQuantizationSlack));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + " at line " +
                                  std::to_string(lineno) + " in " +
                                  path.string());
    }
  }
  return out;
}

// ===================== ingestion =====================

namespace detail {

/// Find `<stem>.<ext>` in `dir` across the supported image extensions.
inline std::optional<fs::path> find_image_by_stem(const fs::path& dir,
                                                  const std::string& stem) {
  for (const char* ext : {".jpg", ".jpeg", ".png", ".JPG", ".JPEG", ".PNG"}) {
    fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  // The id may already carry its extension.
  fs::path direct = dir / stem;
  if (fs::exists(direct) && fs::is_regular_file(direct)) return direct;
  return std::nullopt;
}

inline bool has_image_extension(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e == ".png" || e == ".jpg" || e == ".jpeg";
}

/// Sorted list of image files directly inside `dir`.
inline std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && has_image_extension(e.path()))
      out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/**
 * @brief Ingest a JSON annotation file of pixel-coordinate boxes.
 *
 * The document maps image ids to objects with `height`, `width`, and a
 * `bbox` array of {xmin, ymin, xmax, ymax, label}. Every image becomes one
 * positive record with class 0 labels. Records with a missing image file, a
 * degenerate box, a box outside the image beyond 1e-3 of the dimension, or
 * no boxes at all are reported as errors and skipped; boxes inside that
 * tolerance are clamped to the image.
 */
inline IngestReport ingest_bbox_json(const fs::path& images_dir,
                                     const fs::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open annotation file: " + json_path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed JSON in " + json_path.string() +
                                ": " + e.what());
  }
  if (!doc.is_object())
    throw std::invalid_argument("annotation root must be an object: " +
                                json_path.string());

  IngestReport report;
  for (const auto& [id, entry] : doc.items()) {
    try {
      if (!entry.is_object() || !entry.contains("height") ||
          !entry.contains("width") || !entry.contains("bbox"))
        throw std::invalid_argument("entry missing height/width/bbox");
      const int w = entry.at("width").get<int>();
      const int h = entry.at("height").get<int>();
      const Size2D dims(w, h);

      const auto img = detail::find_image_by_stem(images_dir, id);
      if (!img) throw std::invalid_argument("image file not found");

      std::vector<NormLabel> labels;
      for (const auto& box : entry.at("bbox")) {
        const double x0 = box.at("xmin").get<double>();
        const double y0 = box.at("ymin").get<double>();
        const double x1 = box.at("xmax").get<double>();
        const double y1 = box.at("ymax").get<double>();
        const double tol_x = 1e-3 * w;
        const double tol_y = 1e-3 * h;
        if (x0 < -tol_x || y0 < -tol_y || x1 > w + tol_x || y1 > h + tol_y)
          throw std::invalid_argument("box outside image bounds");
        const double cx0 = std::clamp(x0, 0.0, double(w));
        const double cx1 = std::clamp(x1, 0.0, double(w));
        const double cy0 = std::clamp(y0, 0.0, double(h));
        const double cy1 = std::clamp(y1, 0.0, double(h));
        if (!(cx0 < cx1 && cy0 < cy1))
          throw std::invalid_argument("degenerate box");
        labels.push_back(to_norm(PixelBox(cx0, cy0, cx1, cy1), dims, 0));
      }
      if (labels.empty()) throw std::invalid_argument("entry has no boxes");

      report.records.push_back(ImageRecord{id, *img, dims,
                                           Polarity::kPositive,
                                           std::move(labels),
                                           SourceKind::kBBoxJson});
    } catch (const std::exception& e) {
      report.errors.push_back({id, e.what()});
    }
  }
  return report;
}

/// One class color for mask ingestion, matched channel-wise within +-tol.
struct MaskClassColor {
  std::uint8_t r, g, b;
  int class_id;
  int tol = 40;
};

/**
 * @brief Extract boxes from a color-coded segmentation mask.
 *
 * For each class color, pixels within the per-channel tolerance are grouped
 * into 4-connected components; every component covering at least `min_area`
 * pixels contributes its axis-aligned bounding box as a label. Smaller
 * components are treated as annotation noise.
 */
inline std::vector<NormLabel> mask_to_boxes(
    const ImageBuffer& mask, const std::vector<MaskClassColor>& colors,
    int min_area = 64) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<NormLabel> out;

  std::vector<char> match(static_cast<std::size_t>(w) * h);
  std::vector<char> seen(static_cast<std::size_t>(w) * h);
  std::vector<int> stack;

  for (const MaskClassColor& cc : colors) {
    std::fill(match.begin(), match.end(), 0);
    std::fill(seen.begin(), seen.end(), 0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::uint8_t* p = mask.px(x, y);
        match[static_cast<std::size_t>(y) * w + x] =
            std::abs(int(p[0]) - cc.r) <= cc.tol &&
            std::abs(int(p[1]) - cc.g) <= cc.tol &&
            std::abs(int(p[2]) - cc.b) <= cc.tol;
      }

    for (int sy = 0; sy < h; ++sy)
      for (int sx = 0; sx < w; ++sx) {
        const std::size_t start = static_cast<std::size_t>(sy) * w + sx;
        if (!match[start] || seen[start]) continue;

        int x_lo = sx, x_hi = sx, y_lo = sy, y_hi = sy, area = 0;
        stack.clear();
        stack.push_back(static_cast<int>(start));
        seen[start] = 1;
        while (!stack.empty()) {
          const int idx = stack.back();
          stack.pop_back();
          const int x = idx % w;
          const int y = idx / w;
          ++area;
          x_lo = std::min(x_lo, x);
          x_hi = std::max(x_hi, x);
          y_lo = std::min(y_lo, y);
          y_hi = std::max(y_hi, y);
          const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1},
                                 {x, y + 1}};
          for (const auto& [nx, ny] : nbr) {
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
            if (match[ni] && !seen[ni]) {
              seen[ni] = 1;
              stack.push_back(static_cast<int>(ni));
            }
          }
        }
        if (area >= min_area)
          out.push_back(to_norm(PixelBox(x_lo, y_lo, x_hi + 1, y_hi + 1),
                                mask.dims, cc.class_id));
      }
  }
  return out;
}

/**
 * @brief Ingest a directory of color masks paired with an image directory.
 *
 * Masks and images are paired by file stem. Dimension mismatches, missing
 * images, unreadable files, and masks yielding no components are reported
 * per record.
 */
inline IngestReport ingest_color_masks(const fs::path& images_dir,
                                       const fs::path& masks_dir,
                                       const std::vector<MaskClassColor>& colors,
                                       int min_area = 64) {
  IngestReport report;
  for (const fs::path& mask_path : detail::list_images(masks_dir)) {
    const std::string id = mask_path.stem().string();
    try {
      const auto img = detail::find_image_by_stem(images_dir, id);
      if (!img) throw std::invalid_argument("image file not found");
      const ImageBuffer mask = read_image(mask_path);
      const Size2D img_dims = read_image_dims(*img);
      if (!(img_dims == mask.dims))
        throw std::invalid_argument("mask dims do not match image dims");
      std::vector<NormLabel> labels = mask_to_boxes(mask, colors, min_area);
      if (labels.empty())
        throw std::invalid_argument("mask has no usable components");
      report.records.push_back(ImageRecord{id, *img, img_dims,
                                           Polarity::kPositive,
                                           std::move(labels),
                                           SourceKind::kColorMask});
    } catch (const std::exception& e) {
      report.errors.push_back({id, e.what()});
    }
  }
  return report;
}

/// Ingest a plain image directory as unlabeled negatives.
inline IngestReport ingest_negative_pool(const fs::path& dir) {
  IngestReport report;
  for (const fs::path& p : detail::list_images(dir)) {
    const std::string id = p.stem().string();
    try {
      report.records.push_back(ImageRecord{id, p, read_image_dims(p),
                                           Polarity::kNegative,
                                           {},
                                           SourceKind::kNegativePool});
    } catch (const std::exception& e) {
      report.errors.push_back({id, e.what()});
    }
  }
  return report;
}

// ===================== splitting and negatives =====================

namespace detail {

/// First floor(0.7 N) -> Train, next floor(0.2 N) -> Val, remainder -> Test.
/// Integer arithmetic: floor(0.7 N) = (7 N) / 10 exactly, immune to the
/// rounding of 0.7 in binary floating point.
inline SplitAssignment split_for_index(std::size_t i, std::size_t n) {
  const std::size_t n_train = 7 * n / 10;
  const std::size_t n_val = 2 * n / 10;
  if (i < n_train) return SplitAssignment::kTrain;
  if (i < n_train + n_val) return SplitAssignment::kVal;
  return SplitAssignment::kTest;
}

}  // namespace detail

/**
 * @brief Assign records to train/val/test by the 70/20/10 floor rule.
 *
 * Records are sorted by id and then permuted by a seeded Fisher-Yates
 * shuffle, so the assignment never depends on input or directory order.
 */
inline std::vector<SplitRecord> split_dataset(std::vector<ImageRecord> records,
                                              std::uint64_t seed) {
  if (records.empty())
    throw std::invalid_argument("split_dataset: no records");
  std::sort(records.begin(), records.end(),
            [](const ImageRecord& a, const ImageRecord& b) {
              return a.id < b.id;
            });
  std::mt19937_64 rng(seed);
  fisher_yates(records, rng);

  std::vector<SplitRecord> out;
  out.reserve(records.size());
  const std::size_t n = records.size();
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(SplitRecord{std::move(records[i]),
                              detail::split_for_index(i, n)});
  return out;
}

/**
 * @brief Add unlabeled negatives at `ratio` of the positive count.
 *
 * The total negative count is round(ratio * positives); the chosen negatives
 * are drawn without replacement from the pool (sorted by id, then seeded
 * shuffle on an independent stream of `seed`) and themselves assigned
 * 70/20/10 by the same floor rule, mirroring how the positives were split.
 */
inline DatasetManifest inject_negatives(DatasetManifest manifest,
                                        std::vector<ImageRecord> pool,
                                        double ratio, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio < 1.0))
    throw std::invalid_argument("inject_negatives: ratio must be in [0, 1)");
  for (const auto& r : pool)
    if (r.polarity != Polarity::kNegative || !r.labels.empty())
      throw std::invalid_argument(
          "inject_negatives: pool must contain only unlabeled negatives");

  manifest.negative_ratio = ratio;
  if (ratio == 0.0) return manifest;

  std::size_t positives = 0;
  for (const auto& sr : manifest.records)
    if (sr.record.polarity == Polarity::kPositive) ++positives;

  const std::size_t n_total = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(positives)));
  if (n_total == 0) return manifest;
  if (pool.size() < n_total) {
    std::ostringstream msg;
    msg << "inject_negatives: pool has " << pool.size() << " images but "
        << n_total << " are required (short by " << (n_total - pool.size())
        << ")";
    throw std::runtime_error(msg.str());
  }

  std::sort(pool.begin(), pool.end(),
            [](const ImageRecord& a, const ImageRecord& b) {
              return a.id < b.id;
            });
  std::mt19937_64 rng(child_seed(seed, 0x6e656761ULL));  // negatives stream
  fisher_yates(pool, rng);

  for (std::size_t i = 0; i < n_total; ++i)
    manifest.records.push_back(SplitRecord{std::move(pool[i]),
                                           detail::split_for_index(i, n_total)});
  return manifest;
}

// ===================== emission =====================

/// Flags controlling build_dataset.
struct BuildOptions {
  AugmentParams params;
  bool augment_train = true;
  bool augment_negatives = true;  ///< expand negatives ten-fold too
  bool clahe = false;             ///< CLAHE on emitted training images
};

/// Per-split emission tallies.
struct SplitCounts {
  int images = 0;
  int boxes = 0;
  int positives = 0;
  int negatives = 0;
};

struct BuildSummary {
  SplitCounts train, val, test;
  std::vector<std::string> io_errors;

  const SplitCounts& of(SplitAssignment s) const {
    return s == SplitAssignment::kTrain
               ? train
               : (s == SplitAssignment::kVal ? val : test);
  }
};

namespace detail {

inline SplitCounts& counts_of(BuildSummary& s, SplitAssignment a) {
  return a == SplitAssignment::kTrain ? s.train
                                      : (a == SplitAssignment::kVal ? s.val
                                                                    : s.test);
}

inline void write_text_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + p.string());
  out << content;
  if (!out) throw IoError("write failed: " + p.string());
}

inline void write_label_file(const fs::path& p,
                             const std::vector<NormLabel>& labels) {
  std::string body;
  for (const NormLabel& l : labels) {
    body += serialize_label_line(l);
    body += '\n';
  }
  write_text_file(p, body);
}

inline void copy_file_bytes(const fs::path& from, const fs::path& to) {
  std::error_code ec;
  fs::copy_file(from, to, fs::copy_options::overwrite_existing, ec);
  if (ec)
    throw IoError("copy failed: " + from.string() + " -> " + to.string() +
                  ": " + ec.message());
}

inline std::string norm_extension(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e;
}

inline nlohmann::json manifest_json(const DatasetManifest& m,
                                    const BuildOptions& opts,
                                    const BuildSummary& summary) {
  nlohmann::json j;
  j["seed"] = m.seed;
  j["negative_ratio"] = m.negative_ratio;
  j["class_names"] = m.class_names;
  j["flags"] = {{"augment_train", opts.augment_train},
                {"augment_negatives", opts.augment_negatives},
                {"clahe", opts.clahe}};
  j["augment_params"] = {{"rotation_deg", opts.params.rotation_deg},
                         {"blur_kernel", opts.params.blur_kernel},
                         {"blur_sigma", opts.params.blur_sigma},
                         {"clahe_clip", opts.params.clahe_clip},
                         {"clahe_tiles",
                          {opts.params.clahe_tiles_x,
                           opts.params.clahe_tiles_y}}};
  for (const char* name : {"train", "val", "test"}) {
    const SplitCounts& c = name == std::string("train")
                               ? summary.train
                               : (name == std::string("val") ? summary.val
                                                             : summary.test);
    j["counts"][name] = {{"images", c.images},
                         {"boxes", c.boxes},
                         {"positives", c.positives},
                         {"negatives", c.negatives}};
  }
  auto& records = j["records"] = nlohmann::json::array();
  for (const SplitRecord& sr : m.records) {
    nlohmann::json r;
    r["id"] = sr.record.id;
    r["split"] = split_name(sr.split);
    r["polarity"] =
        sr.record.polarity == Polarity::kPositive ? "positive" : "negative";
    r["source"] = source_kind_name(sr.record.source);
    r["path"] = sr.record.path.string();
    auto& labels = r["labels"] = nlohmann::json::array();
    for (const NormLabel& l : sr.record.labels)
      labels.push_back({l.class_id, l.cx, l.cy, l.w, l.h});
    records.push_back(std::move(r));
  }
  return j;
}

inline std::string descriptor_yaml(const DatasetManifest& m) {
  std::string y;
  y += "train: images/train\n";
  y += "val: images/val\n";
  y += "test: images/test\n";
  y += "nc: " + std::to_string(m.class_names.size()) + "\n";
  y += "names:\n";
  for (const std::string& n : m.class_names) y += "  - " + n + "\n";
  return y;
}

}  // namespace detail

/**
 * @brief Write the manifest out as a YOLO-style dataset tree.
 *
 * Layout under `out_dir`: `images/{train,val,test}/`, `labels/...`, plus
 * `dataset.yaml` (split paths, class names) and `manifest.json` (seed,
 * ratio, flags, per-record provenance).
 *
 * Training records are expanded ten-fold when `augment_train` is set (file
 * stems gain a `__<kind>` suffix); negatives follow suit unless
 * `augment_negatives` is off. CLAHE, when enabled, is applied to training
 * images before augmentation. Untouched images are copied byte-for-byte
 * with their original extension; anything processed is re-encoded as PNG.
 *
 * Per-file I/O problems are collected into the summary; a final consistency
 * check between intended and emitted counts throws IoError on mismatch.
 */
inline BuildSummary build_dataset(const DatasetManifest& manifest,
                                  const BuildOptions& opts,
                                  const fs::path& out_dir) {
  opts.params.validate();
  {
    std::vector<std::string> ids;
    ids.reserve(manifest.records.size());
    for (const auto& sr : manifest.records) ids.push_back(sr.record.id);
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end())
      throw std::invalid_argument("build_dataset: duplicate record id '" +
                                  *dup + "'");
  }
  BuildSummary summary;

  std::error_code ec;
  for (const char* grp : {"images", "labels"})
    for (const char* split : {"train", "val", "test"}) {
      fs::create_directories(out_dir / grp / split, ec);
      if (ec)
        throw IoError("cannot create " + (out_dir / grp / split).string() +
                      ": " + ec.message());
    }

  int expected_images = 0;
  int emitted_images = 0;

  for (const SplitRecord& sr : manifest.records) {
    const ImageRecord& rec = sr.record;
    const char* split = split_name(sr.split);
    const fs::path img_dir = out_dir / "images" / split;
    const fs::path lbl_dir = out_dir / "labels" / split;
    SplitCounts& counts = detail::counts_of(summary, sr.split);

    const bool expand =
        sr.split == SplitAssignment::kTrain && opts.augment_train &&
        (rec.polarity == Polarity::kPositive || opts.augment_negatives);
    const bool apply_clahe = sr.split == SplitAssignment::kTrain && opts.clahe;
    expected_images += expand ? 10 : 1;

    try {
      if (!fs::exists(rec.path))
        throw IoError("source image missing: " + rec.path.string());

      if (!expand && !apply_clahe) {
        const std::string name = rec.id + detail::norm_extension(rec.path);
        detail::copy_file_bytes(rec.path, img_dir / name);
        detail::write_label_file(lbl_dir / (rec.id + ".txt"), rec.labels);
        ++emitted_images;
        ++counts.images;
        counts.boxes += static_cast<int>(rec.labels.size());
      } else {
        ImageBuffer img = read_image(rec.path);
        if (!(img.dims == rec.dims))
          throw IoError("decoded dims disagree with the record: " +
                        rec.path.string());
        if (apply_clahe) img = clahe(img, opts.params);

        if (!expand) {
          detail::write_label_file(lbl_dir / (rec.id + ".txt"), rec.labels);
          write_png(img, img_dir / (rec.id + ".png"));
          ++emitted_images;
          ++counts.images;
          counts.boxes += static_cast<int>(rec.labels.size());
        } else {
          const auto samples =
              augment_sample(img, rec.labels, opts.params, rec.id);
          for (const auto& s : samples) {
            const std::string stem =
                rec.id + "__" + augment_kind_tag(s.kind);
            write_png(s.image, img_dir / (stem + ".png"));
            detail::write_label_file(lbl_dir / (stem + ".txt"), s.labels);
            ++emitted_images;
            ++counts.images;
            counts.boxes += static_cast<int>(s.labels.size());
          }
        }
      }
      const int n = expand ? 10 : 1;
      if (rec.polarity == Polarity::kPositive)
        counts.positives += n;
      else
        counts.negatives += n;
    } catch (const std::exception& e) {
      summary.io_errors.push_back(rec.id + ": " + e.what());
    }
  }

  detail::write_text_file(out_dir / "dataset.yaml",
                          detail::descriptor_yaml(manifest));
  detail::write_text_file(
      out_dir / "manifest.json",
      detail::manifest_json(manifest, opts, summary).dump(2) + "\n");

  if (summary.io_errors.empty() && emitted_images != expected_images)
    throw IoError("emission inconsistency: expected " +
                  std::to_string(expected_images) + " images, wrote " +
                  std::to_string(emitted_images));
  return summary;
}

/// Emit the manifest as-is: no augmentation, no CLAHE, originals copied
/// byte-for-byte. Equivalent to build_dataset with everything switched off.
inline BuildSummary emit_yolo_dataset(const DatasetManifest& manifest,
                                      const fs::path& out_dir) {
  BuildOptions opts;
  opts.augment_train = false;
  opts.clahe = false;
  return build_dataset(manifest, opts, out_dir);
}

}  // namespace detkit::dataset
