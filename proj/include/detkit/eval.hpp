// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

#ifndef DETKIT_EVAL_HPP_
#define DETKIT_EVAL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "detkit/dataset.hpp"
#include "detkit/geometry.hpp"

namespace detkit::eval {

namespace fs = std::filesystem;

// ======================================================================
// Domain types
// ======================================================================

/// One predicted box with its confidence score. The class id travels
/// inside the label, same as ground truth.
struct Detection {
  NormLabel box;
  double confidence = 0.0;

  Detection(const NormLabel& b, double conf) : box(b), confidence(conf) {
    if (!(conf >= 0.0 && conf <= 1.0))
      throw std::invalid_argument("Detection: confidence outside [0, 1]: " +
                                  std::to_string(conf));
  }

  int class_id() const noexcept { return box.class_id; }
};

/// Tally of matched and unmatched boxes at one IoU threshold.
struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

/// One point on a precision/recall curve, tagged with the confidence
/// of the prediction that produced it.
struct PRPoint {
  double recall = 0.0;
  double precision = 0.0;
  double confidence = 0.0;
};

/// Ground-truth boxes are stratified by the fraction of the image they
/// cover: under 5 percent, 5 to 15 percent inclusive, or above.
enum class SizeBucket { kSmall, kMedium, kLarge };

inline constexpr std::array<SizeBucket, 3> kAllSizeBuckets = {
    SizeBucket::kSmall, SizeBucket::kMedium, SizeBucket::kLarge};

inline const char* size_bucket_name(SizeBucket b) {
  switch (b) {
    case SizeBucket::kSmall: return "small";
    case SizeBucket::kMedium: return "medium";
    case SizeBucket::kLarge: return "large";
  }
  return "?";
}

/// Bucket for a box whose area is the given fraction of the image.
/// Both interval endpoints belong to the middle bucket.
inline SizeBucket size_bucket(double area_fraction) {
  if (area_fraction < 0.05) return SizeBucket::kSmall;
  if (area_fraction <= 0.15) return SizeBucket::kMedium;
  return SizeBucket::kLarge;
}

/// Everything known about one image at evaluation time. An empty `gt`
/// marks a negative image.
struct ImageEval {
  std::string id;
  std::vector<NormLabel> gt;
  std::vector<Detection> preds;
};

// ======================================================================
// Matching
// ======================================================================

/// IoU of two labels in normalized coordinates.
inline double iou_norm(const NormLabel& a, const NormLabel& b) {
  const PixelBox pa(a.cx - a.w / 2, a.cy - a.h / 2, a.cx + a.w / 2,
                    a.cy + a.h / 2);
  const PixelBox pb(b.cx - b.w / 2, b.cy - b.h / 2, b.cx + b.w / 2,
                    b.cy + b.h / 2);
  return iou(pa, pb);
}

/// Outcome of matching one image's predictions against its ground truth.
/// `is_tp` and `matched_gt` are indexed by the prediction's position in
/// the input vector, not by rank.
struct MatchResult {
  MatchCounts counts;
  std::vector<char> is_tp;
  std::vector<int> matched_gt;
};

/**
 * @brief Greedy one-to-one matching at a single IoU threshold.
 *
 * Predictions are visited in order of descending confidence (ties keep
 * input order). Each claims the still-unmatched ground-truth box of
 * highest IoU, provided that IoU reaches `iou_thr`; otherwise it is a
 * false positive. Ground truth left unclaimed counts as false negatives.
 * Callers are expected to pass boxes of a single class.
 */
inline MatchResult match_detections(const std::vector<NormLabel>& gt,
                                    const std::vector<Detection>& preds,
                                    double iou_thr) {
  MatchResult r;
  r.is_tp.assign(preds.size(), 0);
  r.matched_gt.assign(preds.size(), -1);

  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return preds[a].confidence > preds[b].confidence;
                   });

  std::vector<char> gt_taken(gt.size(), 0);
  for (const std::size_t pi : order) {
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t gi = 0; gi < gt.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double v = iou_norm(preds[pi].box, gt[gi]);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(gi);
      }
    }
    if (best >= 0 && best_iou >= iou_thr) {
      gt_taken[best] = 1;
      r.is_tp[pi] = 1;
      r.matched_gt[pi] = best;
      r.counts.tp++;
    } else {
      r.counts.fp++;
    }
  }
  r.counts.fn = gt.size() - r.counts.tp;
  return r;
}

/// Precision, recall, and their harmonic mean, with the usual
/// zero-denominator conventions.
struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline Scores precision_recall_f1(const MatchCounts& c) {
  Scores s;
  if (c.tp + c.fp > 0)
    s.precision = double(c.tp) / double(c.tp + c.fp);
  if (c.tp + c.fn > 0)
    s.recall = double(c.tp) / double(c.tp + c.fn);
  if (s.precision + s.recall > 0)
    s.f1 = 2 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// ======================================================================
// Average precision
// ======================================================================

/// A prediction's match flag pooled across images. The image id and the
/// prediction's index within its image pin a total order for ties.
struct PooledPrediction {
  double confidence = 0.0;
  std::string image_id;
  std::size_t index_in_image = 0;
  bool tp = false;
};

namespace detail {

inline void sort_pooled(std::vector<PooledPrediction>& preds) {
  std::sort(preds.begin(), preds.end(),
            [](const PooledPrediction& a, const PooledPrediction& b) {
              if (a.confidence != b.confidence)
                return a.confidence > b.confidence;
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.index_in_image < b.index_in_image;
            });
}

}  // namespace detail

/// The raw precision/recall curve: one point per pooled prediction, in
/// descending-confidence order.
inline std::vector<PRPoint> pr_curve(std::vector<PooledPrediction> preds,
                                     std::size_t total_gt) {
  detail::sort_pooled(preds);
  std::vector<PRPoint> out;
  out.reserve(preds.size());
  std::size_t cum_tp = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].tp) ++cum_tp;
    PRPoint pt;
    pt.confidence = preds[i].confidence;
    pt.precision = double(cum_tp) / double(i + 1);
    pt.recall = total_gt > 0 ? double(cum_tp) / double(total_gt) : 0.0;
    out.push_back(pt);
  }
  return out;
}

/**
 * @brief Average precision from pooled match flags.
 *
 * The precision/recall curve is made monotone non-increasing from the
 * right, then sampled at the 101 recall values {0.00, 0.01, ..., 1.00};
 * the result is the mean of the samples. With no ground truth the value
 * is undefined and absent.
 */
inline std::optional<double> average_precision(
    std::vector<PooledPrediction> preds, std::size_t total_gt) {
  if (total_gt == 0) return std::nullopt;
  const std::vector<PRPoint> curve = pr_curve(std::move(preds), total_gt);

  double sum = 0.0;
  double run_max = 0.0;
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(curve.size()) - 1;
  for (int k = 100; k >= 0; --k) {
    const double r = k / 100.0;
    while (i >= 0 && curve[static_cast<std::size_t>(i)].recall >= r - 1e-12) {
      run_max = std::max(run_max, curve[static_cast<std::size_t>(i)].precision);
      --i;
    }
    sum += run_max;
  }
  return sum / 101.0;
}

// ======================================================================
// Reports
// ======================================================================

/// The confidence cut chosen for headline precision/recall, with the
/// counts and scores measured there.
struct OperatingPoint {
  double confidence = 1.0;
  MatchCounts counts;
  Scores scores;
};

/// Metrics restricted to ground truth of one size bucket.
struct BucketReport {
  SizeBucket bucket = SizeBucket::kSmall;
  std::size_t gt_count = 0;
  std::map<double, double> ap_per_threshold;
  std::optional<double> map50;
  std::optional<double> map50_95;
};

/// False-positive behaviour on images with no ground truth at all.
struct NegativesReport {
  std::size_t negative_images = 0;
  std::size_t images_with_fp = 0;
  double fp_per_negative_image = 0.0;
  double confidence_threshold = 0.0;
};

/// Full evaluation output.
struct EvalReport {
  std::vector<double> thresholds;
  std::vector<int> classes;
  std::size_t classes_with_gt = 0;
  std::size_t total_gt = 0;
  std::size_t total_predictions = 0;
  std::map<double, double> ap_per_threshold;
  std::optional<double> map50;
  std::optional<double> map50_95;
  OperatingPoint f1_max;
  OperatingPoint at_fixed_confidence;
  double fixed_confidence = 0.25;
  std::array<BucketReport, 3> buckets;
  NegativesReport negatives;
};

/// The ten standard thresholds 0.50, 0.55, ..., 0.95.
inline std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.50 + 0.05 * i);
  return t;
}

struct EvalOptions {
  std::vector<double> thresholds = default_thresholds();
  double fixed_confidence = 0.25;
};

namespace detail {

/// Bucket an unmatched prediction: by the bucket of the same-class
/// ground-truth box it overlaps most (any overlap counts), or failing
/// that by the prediction's own area.
inline SizeBucket fp_bucket(const Detection& pred,
                            const std::vector<NormLabel>& gt) {
  int best = -1;
  double best_iou = 0.0;
  for (std::size_t gi = 0; gi < gt.size(); ++gi) {
    if (gt[gi].class_id != pred.class_id()) continue;
    const double v = iou_norm(pred.box, gt[gi]);
    if (v > best_iou) {
      best_iou = v;
      best = static_cast<int>(gi);
    }
  }
  if (best >= 0) return size_bucket(gt[best].w * gt[best].h);
  return size_bucket(pred.box.w * pred.box.h);
}

struct ClassSlice {
  std::vector<NormLabel> gt;
  std::vector<Detection> preds;
  std::vector<std::size_t> pred_index;  // positions in the image's full list
};

/// Split one image's boxes by class id.
inline std::map<int, ClassSlice> slice_by_class(const ImageEval& img) {
  std::map<int, ClassSlice> out;
  for (const auto& g : img.gt) out[g.class_id].gt.push_back(g);
  for (std::size_t i = 0; i < img.preds.size(); ++i) {
    auto& slice = out[img.preds[i].class_id()];
    slice.preds.push_back(img.preds[i]);
    slice.pred_index.push_back(i);
  }
  return out;
}

}  // namespace detail

/**
 * @brief Evaluate detections over a set of images.
 *
 * Matching runs per image and per class at every threshold; the match
 * flags are pooled across images for average precision. Headline
 * precision/recall/F1 are taken at the confidence cut that maximizes F1
 * under IoU 0.50 matching, and again at a fixed confidence.
 */
inline EvalReport evaluate(const std::vector<ImageEval>& images,
                           const EvalOptions& opts = {}) {
  if (opts.thresholds.empty())
    throw std::invalid_argument("evaluate: no IoU thresholds given");
  for (const double t : opts.thresholds)
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("evaluate: IoU threshold outside (0, 1): " +
                                  std::to_string(t));
  {
    std::set<std::string> seen;
    for (const auto& img : images)
      if (!seen.insert(img.id).second)
        throw std::invalid_argument("evaluate: duplicate image id '" +
                                    img.id + "'");
  }

  EvalReport rep;
  rep.thresholds = opts.thresholds;
  rep.fixed_confidence = opts.fixed_confidence;

  // Class universe and per-class ground-truth totals.
  std::set<int> class_set;
  std::map<int, std::size_t> gt_per_class;
  std::map<int, std::array<std::size_t, 3>> gt_per_class_bucket;
  std::array<std::size_t, 3> gt_per_bucket{0, 0, 0};
  for (const auto& img : images) {
    rep.total_gt += img.gt.size();
    rep.total_predictions += img.preds.size();
    for (const auto& g : img.gt) {
      class_set.insert(g.class_id);
      gt_per_class[g.class_id]++;
      const auto b = static_cast<std::size_t>(size_bucket(g.w * g.h));
      gt_per_class_bucket[g.class_id][b]++;
      gt_per_bucket[b]++;
    }
    for (const auto& p : img.preds) class_set.insert(p.class_id());
  }
  rep.classes.assign(class_set.begin(), class_set.end());
  rep.classes_with_gt = gt_per_class.size();

  // Pooled flags: [threshold][class] -> flags, plus the bucket-filtered
  // variant [threshold][class][bucket].
  std::map<double, std::map<int, std::vector<PooledPrediction>>> pooled;
  std::map<double, std::map<int, std::array<std::vector<PooledPrediction>, 3>>>
      pooled_bucket;
  std::vector<PooledPrediction> pooled_iou50;  // all classes, IoU 0.50

  for (const auto& img : images) {
    const auto slices = detail::slice_by_class(img);
    for (const auto& [cls, slice] : slices) {
      for (const double t : opts.thresholds) {
        const MatchResult m = match_detections(slice.gt, slice.preds, t);
        for (std::size_t i = 0; i < slice.preds.size(); ++i) {
          PooledPrediction pp;
          pp.confidence = slice.preds[i].confidence;
          pp.image_id = img.id;
          pp.index_in_image = slice.pred_index[i];
          pp.tp = m.is_tp[i] != 0;
          pooled[t][cls].push_back(pp);

          const SizeBucket b =
              m.is_tp[i]
                  ? size_bucket(slice.gt[std::size_t(m.matched_gt[i])].w *
                                slice.gt[std::size_t(m.matched_gt[i])].h)
                  : detail::fp_bucket(slice.preds[i], img.gt);
          pooled_bucket[t][cls][static_cast<std::size_t>(b)].push_back(pp);
        }
      }
      const MatchResult m50 = match_detections(slice.gt, slice.preds, 0.50);
      for (std::size_t i = 0; i < slice.preds.size(); ++i) {
        PooledPrediction pp;
        pp.confidence = slice.preds[i].confidence;
        pp.image_id = img.id;
        pp.index_in_image = slice.pred_index[i];
        pp.tp = m50.is_tp[i] != 0;
        pooled_iou50.push_back(pp);
      }
    }
  }

  // Per-threshold AP, averaged over the classes that have ground truth.
  double ap_sum_all = 0.0;
  bool have_any_ap = false;
  for (const double t : opts.thresholds) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [cls, total] : gt_per_class) {
      auto flags_it = pooled[t].find(cls);
      std::vector<PooledPrediction> flags =
          flags_it == pooled[t].end() ? std::vector<PooledPrediction>{}
                                      : flags_it->second;
      const auto ap = average_precision(std::move(flags), total);
      if (ap) {
        sum += *ap;
        ++n;
      }
    }
    if (n > 0) {
      rep.ap_per_threshold[t] = sum / double(n);
      ap_sum_all += sum / double(n);
      have_any_ap = true;
    }
  }
  if (have_any_ap) {
    const auto it50 = rep.ap_per_threshold.find(0.50);
    rep.map50 = it50 != rep.ap_per_threshold.end()
                    ? it50->second
                    : rep.ap_per_threshold.begin()->second;
    rep.map50_95 = ap_sum_all / double(rep.ap_per_threshold.size());
  }

  // Size buckets.
  for (std::size_t bi = 0; bi < 3; ++bi) {
    BucketReport& br = rep.buckets[bi];
    br.bucket = kAllSizeBuckets[bi];
    br.gt_count = gt_per_bucket[bi];
    double sum_all = 0.0;
    for (const double t : opts.thresholds) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& [cls, per_bucket] : gt_per_class_bucket) {
        const std::size_t total = per_bucket[bi];
        if (total == 0) continue;
        const auto ap = average_precision(pooled_bucket[t][cls][bi], total);
        if (ap) {
          sum += *ap;
          ++n;
        }
      }
      if (n > 0) {
        br.ap_per_threshold[t] = sum / double(n);
        sum_all += sum / double(n);
      }
    }
    if (!br.ap_per_threshold.empty()) {
      const auto it50 = br.ap_per_threshold.find(0.50);
      br.map50 = it50 != br.ap_per_threshold.end()
                     ? it50->second
                     : br.ap_per_threshold.begin()->second;
      br.map50_95 = sum_all / double(br.ap_per_threshold.size());
    }
  }

  // Operating points from the pooled IoU-0.50 flags: sweep every prefix
  // of the descending-confidence order.
  detail::sort_pooled(pooled_iou50);
  {
    OperatingPoint best;
    best.counts.fn = rep.total_gt;
    best.scores = precision_recall_f1(best.counts);
    std::size_t cum_tp = 0;
    for (std::size_t i = 0; i < pooled_iou50.size(); ++i) {
      if (pooled_iou50[i].tp) ++cum_tp;
      MatchCounts c;
      c.tp = cum_tp;
      c.fp = (i + 1) - cum_tp;
      c.fn = rep.total_gt - cum_tp;
      const Scores s = precision_recall_f1(c);
      if (s.f1 > best.scores.f1 + 1e-12) {
        best.confidence = pooled_iou50[i].confidence;
        best.counts = c;
        best.scores = s;
      }
    }
    rep.f1_max = best;

    OperatingPoint fixed;
    fixed.confidence = opts.fixed_confidence;
    std::size_t kept = 0;
    cum_tp = 0;
    for (const auto& pp : pooled_iou50) {
      if (pp.confidence < opts.fixed_confidence) break;
      ++kept;
      if (pp.tp) ++cum_tp;
    }
    fixed.counts.tp = cum_tp;
    fixed.counts.fp = kept - cum_tp;
    fixed.counts.fn = rep.total_gt - cum_tp;
    fixed.scores = precision_recall_f1(fixed.counts);
    rep.at_fixed_confidence = fixed;
  }

  // Negative-image statistics at the F1-max confidence.
  rep.negatives.confidence_threshold = rep.f1_max.confidence;
  std::size_t neg_fp_total = 0;
  for (const auto& img : images) {
    if (!img.gt.empty()) continue;
    rep.negatives.negative_images++;
    std::size_t above = 0;
    for (const auto& p : img.preds)
      if (p.confidence >= rep.negatives.confidence_threshold) ++above;
    if (above > 0) rep.negatives.images_with_fp++;
    neg_fp_total += above;
  }
  if (rep.negatives.negative_images > 0)
    rep.negatives.fp_per_negative_image =
        double(neg_fp_total) / double(rep.negatives.negative_images);

  return rep;
}

// ======================================================================
// File loading
// ======================================================================

/// Read every .txt label file under `labels_dir`, keyed by file stem.
/// Empty files mark negative images.
inline std::map<std::string, std::vector<NormLabel>> load_ground_truth(
    const fs::path& labels_dir) {
  if (!fs::is_directory(labels_dir))
    throw dataset::IoError("ground-truth directory missing: " +
                           labels_dir.string());
  std::map<std::string, std::vector<NormLabel>> out;
  for (const auto& e : fs::directory_iterator(labels_dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
    out[e.path().stem().string()] = dataset::parse_label_file(e.path());
  }
  return out;
}

/// Parse one prediction file: lines of `class conf cx cy w h`.
inline std::vector<Detection> parse_prediction_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw dataset::IoError("cannot open " + path.string());
  std::vector<Detection> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ss(line);
    int cls = 0;
    double conf = 0, cx = 0, cy = 0, w = 0, h = 0;
    if (!(ss >> cls >> conf >> cx >> cy >> w >> h))
      throw std::invalid_argument("malformed prediction line " +
                                  std::to_string(lineno) + " in " +
                                  path.string());
    std::string extra;
    if (ss >> extra)
      throw std::invalid_argument("trailing tokens on prediction line " +
                                  std::to_string(lineno) + " in " +
                                  path.string());
    try {
      out.emplace_back(
          dataset::detail::make_label_clamped(
              cls, cx, cy, w, h, dataset::detail::kQuantizationSlack),
          conf);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(e.what()) + " at line " +
                                  std::to_string(lineno) + " in " +
                                  path.string());
    }
  }
  return out;
}

/// Read every .txt prediction file under `pred_dir`, keyed by file stem.
inline std::map<std::string, std::vector<Detection>> load_predictions(
    const fs::path& pred_dir) {
  if (!fs::is_directory(pred_dir))
    throw dataset::IoError("prediction directory missing: " +
                           pred_dir.string());
  std::map<std::string, std::vector<Detection>> out;
  for (const auto& e : fs::directory_iterator(pred_dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
    out[e.path().stem().string()] = parse_prediction_file(e.path());
  }
  return out;
}

/// Join ground truth with predictions by image id. Images without a
/// prediction file get zero detections; a prediction file with no
/// ground-truth counterpart is an error (it means the two trees are out
/// of sync, and dropping it would silently skew precision).
inline std::vector<ImageEval> pair_ground_truth_with_predictions(
    const std::map<std::string, std::vector<NormLabel>>& gt,
    const std::map<std::string, std::vector<Detection>>& preds) {
  for (const auto& [id, _] : preds)
    if (gt.find(id) == gt.end())
      throw std::invalid_argument(
          "prediction file for unknown image id '" + id + "'");
  std::vector<ImageEval> out;
  out.reserve(gt.size());
  for (const auto& [id, labels] : gt) {
    ImageEval img;
    img.id = id;
    img.gt = labels;
    const auto it = preds.find(id);
    if (it != preds.end()) img.preds = it->second;
    out.push_back(std::move(img));
  }
  return out;
}

/// Load, pair, and evaluate two directory trees.
inline EvalReport evaluate_dirs(const fs::path& labels_dir,
                                const fs::path& pred_dir,
                                const EvalOptions& opts = {}) {
  return evaluate(pair_ground_truth_with_predictions(
                      load_ground_truth(labels_dir), load_predictions(pred_dir)),
                  opts);
}

// ======================================================================
// Report output
// ======================================================================

namespace detail {

inline std::string threshold_key(double t) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", t);
  return buf;
}

inline nlohmann::json ap_map_json(const std::map<double, double>& ap) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [t, v] : ap) out[threshold_key(t)] = v;
  return out;
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

inline nlohmann::json operating_point_json(const OperatingPoint& op) {
  return {{"confidence", op.confidence},
          {"tp", op.counts.tp},
          {"fp", op.counts.fp},
          {"fn", op.counts.fn},
          {"precision", op.scores.precision},
          {"recall", op.scores.recall},
          {"f1", op.scores.f1}};
}

}  // namespace detail

/// Serialize a report with stable (sorted) key order.
inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json buckets = nlohmann::json::object();
  for (const auto& b : r.buckets) {
    buckets[size_bucket_name(b.bucket)] = {
        {"gt_count", b.gt_count},
        {"ap_per_threshold", detail::ap_map_json(b.ap_per_threshold)},
        {"map50", detail::optional_json(b.map50)},
        {"map50_95", detail::optional_json(b.map50_95)}};
  }
  return {{"thresholds", r.thresholds},
          {"classes", r.classes},
          {"classes_with_gt", r.classes_with_gt},
          {"total_gt", r.total_gt},
          {"total_predictions", r.total_predictions},
          {"ap_per_threshold", detail::ap_map_json(r.ap_per_threshold)},
          {"map50", detail::optional_json(r.map50)},
          {"map50_95", detail::optional_json(r.map50_95)},
          {"f1_max", detail::operating_point_json(r.f1_max)},
          {"at_fixed_confidence",
           detail::operating_point_json(r.at_fixed_confidence)},
          {"fixed_confidence", r.fixed_confidence},
          {"size_buckets", buckets},
          {"negatives",
           {{"negative_images", r.negatives.negative_images},
            {"images_with_fp", r.negatives.images_with_fp},
            {"fp_per_negative_image", r.negatives.fp_per_negative_image},
            {"confidence_threshold", r.negatives.confidence_threshold}}}};
}

/// Print the headline numbers as a fixed-width table.
inline void print_report(const EvalReport& r, std::ostream& os) {
  const auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("   -  ");
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%6.4f", *v);
    return std::string(buf);
  };
  os << "rows        gt  precision  recall      f1   mAP50  mAP50:95\n";
  {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-8s %5zu     %6.4f  %6.4f  %6.4f  %s    %s\n",
                  "all", r.total_gt, r.f1_max.scores.precision,
                  r.f1_max.scores.recall, r.f1_max.scores.f1,
                  fmt(r.map50).c_str(), fmt(r.map50_95).c_str());
    os << buf;
  }
  for (const auto& b : r.buckets) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "%-8s %5zu          -       -       -  %s    %s\n",
                  size_bucket_name(b.bucket), b.gt_count, fmt(b.map50).c_str(),
                  fmt(b.map50_95).c_str());
    os << buf;
  }
  {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "operating point: confidence %.4f (F1-max); fixed %.2f: "
                  "precision %.4f recall %.4f\n",
                  r.f1_max.confidence, r.fixed_confidence,
                  r.at_fixed_confidence.scores.precision,
                  r.at_fixed_confidence.scores.recall);
    os << buf;
  }
  {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "negatives: %zu images, %zu with false positives, "
                  "%.4f FP per image\n",
                  r.negatives.negative_images, r.negatives.images_with_fp,
                  r.negatives.fp_per_negative_image);
    os << buf;
  }
}

}  // namespace detkit::eval

#endif  // DETKIT_EVAL_HPP_
