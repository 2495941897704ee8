// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

#include "detkit/eval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "detkit/rng.hpp"
#include "testutil.hpp"

namespace {

namespace ev = detkit::eval;
namespace fs = std::filesystem;
using detkit::NormLabel;

NormLabel box(double cx, double cy, double w, double h, int cls = 0) {
  return NormLabel(cls, cx, cy, w, h);
}

// ===================== size buckets =====================

TEST(SizeBucket, BoundaryConventions) {
  EXPECT_EQ(ev::size_bucket(0.04), ev::SizeBucket::kSmall);
  EXPECT_EQ(ev::size_bucket(0.05), ev::SizeBucket::kMedium);
  EXPECT_EQ(ev::size_bucket(0.10), ev::SizeBucket::kMedium);
  EXPECT_EQ(ev::size_bucket(0.15), ev::SizeBucket::kMedium);
  EXPECT_EQ(ev::size_bucket(0.151), ev::SizeBucket::kLarge);
  EXPECT_EQ(ev::size_bucket(0.20), ev::SizeBucket::kLarge);
}

// ===================== detections =====================

TEST(Detection, RejectsConfidenceOutsideUnit) {
  EXPECT_THROW(ev::Detection(box(0.5, 0.5, 0.2, 0.2), 1.5),
               std::invalid_argument);
  EXPECT_THROW(ev::Detection(box(0.5, 0.5, 0.2, 0.2), -0.1),
               std::invalid_argument);
  EXPECT_NO_THROW(ev::Detection(box(0.5, 0.5, 0.2, 0.2), 0.0));
  EXPECT_NO_THROW(ev::Detection(box(0.5, 0.5, 0.2, 0.2), 1.0));
}

// ===================== matching =====================

TEST(MatchDetections, SingleAdmissibleMatch) {
  // Two 0.2-wide boxes offset to overlap at IoU 0.6 or better.
  const std::vector<NormLabel> gt = {box(0.5, 0.5, 0.2, 0.2)};
  const std::vector<ev::Detection> preds = {
      {box(0.52, 0.5, 0.2, 0.2), 0.9}};
  ASSERT_GE(ev::iou_norm(preds[0].box, gt[0]), 0.5);
  const auto r = ev::match_detections(gt, preds, 0.5);
  EXPECT_EQ(r.counts.tp, 1u);
  EXPECT_EQ(r.counts.fp, 0u);
  EXPECT_EQ(r.counts.fn, 0u);
  EXPECT_EQ(r.matched_gt[0], 0);
}

TEST(MatchDetections, OneGtOneMatchSecondPredIsFp) {
  const std::vector<NormLabel> gt = {box(0.5, 0.5, 0.2, 0.2)};
  const std::vector<ev::Detection> preds = {
      {box(0.51, 0.5, 0.2, 0.2), 0.9},   // IoU ~ 0.9
      {box(0.52, 0.5, 0.2, 0.2), 0.7}};  // IoU ~ 0.8, gt already taken
  const auto r = ev::match_detections(gt, preds, 0.5);
  EXPECT_EQ(r.counts.tp, 1u);
  EXPECT_EQ(r.counts.fp, 1u);
  EXPECT_EQ(r.counts.fn, 0u);
  EXPECT_TRUE(r.is_tp[0]);
  EXPECT_FALSE(r.is_tp[1]);
}

TEST(MatchDetections, NoPredsAllFn) {
  const std::vector<NormLabel> gt = {box(0.2, 0.2, 0.1, 0.1),
                                     box(0.5, 0.5, 0.1, 0.1),
                                     box(0.8, 0.8, 0.1, 0.1)};
  const auto r = ev::match_detections(gt, {}, 0.5);
  EXPECT_EQ(r.counts.tp, 0u);
  EXPECT_EQ(r.counts.fp, 0u);
  EXPECT_EQ(r.counts.fn, 3u);
}

TEST(MatchDetections, HigherConfidenceClaimsFirst) {
  // Both predictions prefer the same gt; the later-listed one has higher
  // confidence and must win it.
  const std::vector<NormLabel> gt = {box(0.5, 0.5, 0.2, 0.2)};
  const std::vector<ev::Detection> preds = {
      {box(0.52, 0.5, 0.2, 0.2), 0.6},
      {box(0.5, 0.5, 0.2, 0.2), 0.95}};
  const auto r = ev::match_detections(gt, preds, 0.5);
  EXPECT_FALSE(r.is_tp[0]);
  EXPECT_TRUE(r.is_tp[1]);
}

TEST(MatchDetections, ConfidenceTiesKeepInputOrder) {
  const std::vector<NormLabel> gt = {box(0.5, 0.5, 0.2, 0.2)};
  const std::vector<ev::Detection> preds = {
      {box(0.51, 0.5, 0.2, 0.2), 0.8},
      {box(0.5, 0.5, 0.2, 0.2), 0.8}};
  const auto r = ev::match_detections(gt, preds, 0.5);
  EXPECT_TRUE(r.is_tp[0]);
  EXPECT_FALSE(r.is_tp[1]);
}

TEST(MatchDetections, PredictionTakesHighestIouGt) {
  const std::vector<NormLabel> gt = {box(0.3, 0.5, 0.2, 0.2),
                                     box(0.33, 0.5, 0.2, 0.2)};
  const std::vector<ev::Detection> preds = {
      {box(0.33, 0.5, 0.2, 0.2), 0.9}};
  const auto r = ev::match_detections(gt, preds, 0.5);
  EXPECT_EQ(r.matched_gt[0], 1);
}

TEST(MatchDetections, CountsConservationProperty) {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_gt = int(detkit::bounded(rng, 5));
    const int n_pred = int(detkit::bounded(rng, 7));
    std::vector<NormLabel> gt;
    std::vector<ev::Detection> preds;
    const auto rand_box = [&]() {
      const double w = detkit::uniform_real(rng, 0.05, 0.4);
      const double h = detkit::uniform_real(rng, 0.05, 0.4);
      const double cx = detkit::uniform_real(rng, w / 2, 1 - w / 2);
      const double cy = detkit::uniform_real(rng, h / 2, 1 - h / 2);
      return box(cx, cy, w, h);
    };
    for (int i = 0; i < n_gt; ++i) gt.push_back(rand_box());
    for (int i = 0; i < n_pred; ++i)
      preds.emplace_back(rand_box(),
                         double(detkit::bounded(rng, 21)) / 20.0);
    for (const double thr : {0.3, 0.5, 0.75}) {
      const auto r = ev::match_detections(gt, preds, thr);
      EXPECT_EQ(r.counts.tp + r.counts.fn, gt.size());
      EXPECT_EQ(r.counts.tp + r.counts.fp, preds.size());
    }
  }
}

// ===================== precision / recall / f1 =====================

TEST(PrecisionRecallF1, HandValues) {
  const auto perfect = ev::precision_recall_f1({1, 0, 0});
  EXPECT_DOUBLE_EQ(perfect.precision, 1.0);
  EXPECT_DOUBLE_EQ(perfect.recall, 1.0);
  EXPECT_DOUBLE_EQ(perfect.f1, 1.0);

  const auto mixed = ev::precision_recall_f1({3, 1, 2});
  EXPECT_DOUBLE_EQ(mixed.precision, 0.75);
  EXPECT_DOUBLE_EQ(mixed.recall, 0.6);
  EXPECT_DOUBLE_EQ(mixed.f1, 2.0 / 3.0);

  const auto empty = ev::precision_recall_f1({0, 0, 5});
  EXPECT_DOUBLE_EQ(empty.precision, 0.0);
  EXPECT_DOUBLE_EQ(empty.recall, 0.0);
  EXPECT_DOUBLE_EQ(empty.f1, 0.0);

  const auto nothing = ev::precision_recall_f1({0, 0, 0});
  EXPECT_DOUBLE_EQ(nothing.f1, 0.0);
}

// ===================== average precision =====================

ev::PooledPrediction flag(double conf, bool tp, const std::string& img = "a",
                          std::size_t idx = 0) {
  ev::PooledPrediction p;
  p.confidence = conf;
  p.image_id = img;
  p.index_in_image = idx;
  p.tp = tp;
  return p;
}

/// Independent AP: for each of the 101 recall samples, scan every
/// confidence cut point for the best qualifying precision.
double ap_oracle(std::vector<ev::PooledPrediction> preds,
                 std::size_t total_gt) {
  std::sort(preds.begin(), preds.end(),
            [](const ev::PooledPrediction& a, const ev::PooledPrediction& b) {
              if (a.confidence != b.confidence)
                return a.confidence > b.confidence;
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.index_in_image < b.index_in_image;
            });
  double total = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    double best = 0.0;
    std::size_t cum_tp = 0;
    for (std::size_t n = 1; n <= preds.size(); ++n) {
      if (preds[n - 1].tp) ++cum_tp;
      const double recall = double(cum_tp) / double(total_gt);
      if (recall >= r) best = std::max(best, double(cum_tp) / double(n));
    }
    total += best;
  }
  return total / 101.0;
}

TEST(AveragePrecision, SingleTpOnSingleGtIsOne) {
  const auto ap = ev::average_precision({flag(0.9, true)}, 1);
  ASSERT_TRUE(ap.has_value());
  EXPECT_DOUBLE_EQ(*ap, 1.0);
}

TEST(AveragePrecision, NoPredictionsWithGtIsZero) {
  const auto ap = ev::average_precision({}, 3);
  ASSERT_TRUE(ap.has_value());
  EXPECT_DOUBLE_EQ(*ap, 0.0);
}

TEST(AveragePrecision, NoGtIsAbsent) {
  EXPECT_FALSE(ev::average_precision({flag(0.9, false)}, 0).has_value());
  EXPECT_FALSE(ev::average_precision({}, 0).has_value());
}

TEST(AveragePrecision, FrozenThreePredictionValue) {
  // TP at 0.9, FP at 0.8, TP at 0.7 over two ground-truth boxes:
  // 51 samples at precision 1 plus 50 at 2/3, over 101.
  const auto ap = ev::average_precision(
      {flag(0.9, true, "a", 0), flag(0.8, false, "a", 1),
       flag(0.7, true, "a", 2)},
      2);
  ASSERT_TRUE(ap.has_value());
  EXPECT_NEAR(*ap, 253.0 / 303.0, 1e-12);
}

TEST(AveragePrecision, PerfectRankingIsOneImperfectIsNot) {
  const auto perfect = ev::average_precision(
      {flag(0.9, true, "a", 0), flag(0.8, true, "a", 1),
       flag(0.7, false, "a", 2)},
      2);
  EXPECT_DOUBLE_EQ(*perfect, 1.0);
  const auto imperfect = ev::average_precision(
      {flag(0.9, false, "a", 0), flag(0.8, true, "a", 1),
       flag(0.7, true, "a", 2)},
      2);
  EXPECT_LT(*imperfect, 1.0);
}

TEST(AveragePrecision, MatchesCutPointOracleOnRandomFlags) {
  std::mt19937_64 rng(515);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = detkit::bounded(rng, 12);
    const std::size_t total_gt = 1 + detkit::bounded(rng, 6);
    std::vector<ev::PooledPrediction> flags;
    std::size_t tp_budget = total_gt;
    for (std::size_t i = 0; i < n; ++i) {
      const bool tp = tp_budget > 0 && detkit::bounded(rng, 2) == 0;
      if (tp) --tp_budget;
      flags.push_back(flag(double(detkit::bounded(rng, 21)) / 20.0, tp,
                           detkit::bounded(rng, 2) ? "a" : "b", i));
    }
    const auto ap = ev::average_precision(flags, total_gt);
    ASSERT_TRUE(ap.has_value());
    EXPECT_NEAR(*ap, ap_oracle(flags, total_gt), 1e-9) << "trial " << trial;
    EXPECT_GE(*ap, 0.0);
    EXPECT_LE(*ap, 1.0);
  }
}

TEST(AveragePrecision, InputOrderIrrelevant) {
  std::vector<ev::PooledPrediction> flags = {
      flag(0.9, true, "a", 0), flag(0.8, false, "b", 0),
      flag(0.8, true, "a", 1), flag(0.5, true, "c", 0)};
  auto shuffled = flags;
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_DOUBLE_EQ(*ev::average_precision(flags, 4),
                   *ev::average_precision(shuffled, 4));
}

TEST(PrCurve, DescendingConfidenceOrder) {
  const auto curve = ev::pr_curve(
      {flag(0.5, true, "a", 0), flag(0.9, true, "a", 1),
       flag(0.7, false, "a", 2)},
      2);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_GE(curve[0].confidence, curve[1].confidence);
  EXPECT_GE(curve[1].confidence, curve[2].confidence);
  EXPECT_DOUBLE_EQ(curve[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(curve[0].recall, 0.5);
}

// ===================== end-to-end evaluate =====================

ev::ImageEval scene(const std::string& id, std::vector<NormLabel> gt,
                    std::vector<ev::Detection> preds) {
  ev::ImageEval img;
  img.id = id;
  img.gt = std::move(gt);
  img.preds = std::move(preds);
  return img;
}

TEST(Evaluate, PerfectDetectionsScoreOneEverywhere) {
  std::vector<ev::ImageEval> images;
  for (int i = 0; i < 4; ++i) {
    const auto b = box(0.3 + 0.1 * i, 0.5, 0.2, 0.3);
    images.push_back(scene("img" + std::to_string(i), {b}, {{b, 0.9}}));
  }
  const auto rep = ev::evaluate(images);
  ASSERT_TRUE(rep.map50.has_value());
  EXPECT_DOUBLE_EQ(*rep.map50, 1.0);
  EXPECT_DOUBLE_EQ(*rep.map50_95, 1.0);
  EXPECT_DOUBLE_EQ(rep.f1_max.scores.f1, 1.0);
  EXPECT_DOUBLE_EQ(rep.f1_max.scores.precision, 1.0);
  EXPECT_DOUBLE_EQ(rep.f1_max.scores.recall, 1.0);
  EXPECT_EQ(rep.total_gt, 4u);
  EXPECT_EQ(rep.thresholds.size(), 10u);
}

TEST(Evaluate, MidIouDetectionsGiveTenthOfMap) {
  // IoU between gt and pred is ~0.52: above 0.50, below 0.55.
  const auto g = box(0.4, 0.4, 0.2, 0.2);
  const auto p = box(0.463, 0.4, 0.2, 0.2);
  const double v = ev::iou_norm(g, p);
  ASSERT_GT(v, 0.50);
  ASSERT_LT(v, 0.55);
  const auto rep = ev::evaluate({scene("a", {g}, {{p, 0.9}})});
  EXPECT_DOUBLE_EQ(*rep.map50, 1.0);
  EXPECT_DOUBLE_EQ(*rep.map50_95, 0.1);
}

TEST(Evaluate, Map5095IsExactMeanOfPerThresholdAps) {
  std::mt19937_64 rng(627);
  std::vector<ev::ImageEval> images;
  for (int i = 0; i < 5; ++i) {
    std::vector<NormLabel> gt;
    std::vector<ev::Detection> preds;
    for (int k = 0; k < 3; ++k) {
      const double w = detkit::uniform_real(rng, 0.1, 0.3);
      const double h = detkit::uniform_real(rng, 0.1, 0.3);
      const double cx = detkit::uniform_real(rng, w / 2, 1 - w / 2);
      const double cy = detkit::uniform_real(rng, h / 2, 1 - h / 2);
      gt.push_back(box(cx, cy, w, h));
      // Jittered prediction: lands at varied IoU across thresholds.
      preds.emplace_back(box(std::clamp(cx + 0.02 * k, w / 2, 1 - w / 2), cy,
                             w, h),
                         double(detkit::bounded(rng, 21)) / 20.0);
    }
    images.push_back(scene("img" + std::to_string(i), gt, preds));
  }
  const auto rep = ev::evaluate(images);
  ASSERT_EQ(rep.ap_per_threshold.size(), 10u);
  double sum = 0.0;
  for (const auto& [t, ap] : rep.ap_per_threshold) sum += ap;
  ASSERT_TRUE(rep.map50_95.has_value());
  EXPECT_DOUBLE_EQ(*rep.map50_95, sum / 10.0);
  EXPECT_DOUBLE_EQ(*rep.map50, rep.ap_per_threshold.at(0.50));
}

TEST(Evaluate, MultiClassMapIsClassMean) {
  const auto g0 = box(0.3, 0.3, 0.2, 0.2, 0);
  const auto g1 = box(0.7, 0.7, 0.2, 0.2, 1);
  // Class 0 detected perfectly, class 1 not at all.
  const auto rep = ev::evaluate({scene("a", {g0, g1}, {{g0, 0.9}})});
  EXPECT_EQ(rep.classes_with_gt, 2u);
  EXPECT_DOUBLE_EQ(*rep.map50, 0.5);
  EXPECT_DOUBLE_EQ(*rep.map50_95, 0.5);
}

TEST(Evaluate, PredictionOnlyClassExcludedFromMap) {
  const auto g = box(0.3, 0.3, 0.2, 0.2, 0);
  const auto stray = box(0.7, 0.7, 0.2, 0.2, 7);
  const auto rep = ev::evaluate({scene("a", {g}, {{g, 0.9}, {stray, 0.3}})});
  EXPECT_DOUBLE_EQ(*rep.map50, 1.0);       // class 7 has no gt: not averaged
  EXPECT_EQ(rep.classes.size(), 2u);       // but it is listed
  EXPECT_EQ(rep.classes_with_gt, 1u);
  // The stray prediction is an FP at low confidence; F1-max cuts above it.
  EXPECT_DOUBLE_EQ(rep.f1_max.scores.f1, 1.0);
  EXPECT_EQ(rep.f1_max.counts.fp, 0u);
}

TEST(Evaluate, PoolingIsOrderInvariant) {
  std::mt19937_64 rng(731);
  std::vector<ev::ImageEval> images;
  for (int i = 0; i < 6; ++i) {
    std::vector<NormLabel> gt;
    std::vector<ev::Detection> preds;
    const int n_gt = 1 + int(detkit::bounded(rng, 3));
    for (int k = 0; k < n_gt; ++k) {
      const double w = detkit::uniform_real(rng, 0.1, 0.3);
      const double h = detkit::uniform_real(rng, 0.1, 0.3);
      const double cx = detkit::uniform_real(rng, w / 2, 1 - w / 2);
      const double cy = detkit::uniform_real(rng, h / 2, 1 - h / 2);
      gt.push_back(box(cx, cy, w, h));
      if (detkit::bounded(rng, 4) != 0)
        preds.emplace_back(box(cx, cy, w, h),
                           double(detkit::bounded(rng, 21)) / 20.0);
    }
    images.push_back(scene("img" + std::to_string(i), gt, preds));
  }
  auto reversed = images;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = ev::report_to_json(ev::evaluate(images)).dump();
  const auto b = ev::report_to_json(ev::evaluate(reversed)).dump();
  EXPECT_EQ(a, b);
}

TEST(Evaluate, DuplicateImageIdsRejected) {
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  EXPECT_THROW(ev::evaluate({scene("a", {g}, {}), scene("a", {g}, {})}),
               std::invalid_argument);
}

TEST(Evaluate, NoImagesYieldsEmptyReport) {
  const auto rep = ev::evaluate({});
  EXPECT_EQ(rep.total_gt, 0u);
  EXPECT_FALSE(rep.map50.has_value());
  EXPECT_FALSE(rep.map50_95.has_value());
  EXPECT_EQ(rep.negatives.negative_images, 0u);
}

// ===================== size stratification =====================

TEST(Evaluate, BucketsSeparatePerfectDetectionsBySize) {
  const auto small = box(0.2, 0.2, 0.1, 0.1);    // area 0.01
  const auto medium = box(0.5, 0.5, 0.3, 0.3);   // area 0.09
  const auto large = box(0.7, 0.7, 0.5, 0.5);    // area 0.25
  const auto rep = ev::evaluate({scene(
      "a", {small, medium, large},
      {{small, 0.9}, {medium, 0.8}, {large, 0.7}})});
  EXPECT_EQ(rep.buckets[0].gt_count, 1u);
  EXPECT_EQ(rep.buckets[1].gt_count, 1u);
  EXPECT_EQ(rep.buckets[2].gt_count, 1u);
  for (const auto& b : rep.buckets) {
    ASSERT_TRUE(b.map50.has_value()) << ev::size_bucket_name(b.bucket);
    EXPECT_DOUBLE_EQ(*b.map50, 1.0);
    EXPECT_DOUBLE_EQ(*b.map50_95, 1.0);
  }
}

TEST(Evaluate, BucketGtCountsPartitionTotalGt) {
  std::mt19937_64 rng(839);
  std::vector<ev::ImageEval> images;
  for (int i = 0; i < 8; ++i) {
    std::vector<NormLabel> gt;
    const int n = int(detkit::bounded(rng, 4));
    for (int k = 0; k < n; ++k) {
      const double w = detkit::uniform_real(rng, 0.05, 0.6);
      const double h = detkit::uniform_real(rng, 0.05, 0.6);
      gt.push_back(box(detkit::uniform_real(rng, w / 2, 1 - w / 2),
                       detkit::uniform_real(rng, h / 2, 1 - h / 2), w, h));
    }
    images.push_back(scene("img" + std::to_string(i), gt, {}));
  }
  const auto rep = ev::evaluate(images);
  EXPECT_EQ(rep.buckets[0].gt_count + rep.buckets[1].gt_count +
                rep.buckets[2].gt_count,
            rep.total_gt);
}

TEST(Evaluate, FpAttributedToOverlappedGtBucket) {
  const auto small_gt = box(0.2, 0.2, 0.1, 0.1);   // area 0.01: small
  const auto large_gt = box(0.6, 0.6, 0.5, 0.5);   // area 0.25: large
  // A stray high-confidence box grazing the small gt (IoU ~ 0.11).
  const auto graze = box(0.28, 0.2, 0.1, 0.1);
  ASSERT_GT(ev::iou_norm(graze, small_gt), 0.0);
  ASSERT_LT(ev::iou_norm(graze, small_gt), 0.5);
  const auto rep = ev::evaluate({scene("a", {small_gt, large_gt},
                                       {{graze, 0.95},
                                        {small_gt, 0.9},
                                        {large_gt, 0.85}})});
  // Large bucket is clean; small bucket carries the stray FP above its TP.
  EXPECT_DOUBLE_EQ(*rep.buckets[2].map50, 1.0);
  EXPECT_DOUBLE_EQ(*rep.buckets[0].map50, 0.5);
  EXPECT_DOUBLE_EQ(*rep.buckets[0].map50_95, 0.5);
  // Overall: flags FP@.95 TP@.9 TP@.85 with 2 gt = 2/3 at every threshold.
  EXPECT_NEAR(*rep.map50_95, 2.0 / 3.0, 1e-12);
}

TEST(Evaluate, LoneFpBucketsByItsOwnArea) {
  const auto g = box(0.2, 0.2, 0.1, 0.1);
  const auto far_large = box(0.7, 0.7, 0.45, 0.45);  // area ~0.2: large
  ASSERT_DOUBLE_EQ(ev::iou_norm(far_large, g), 0.0);
  const auto rep =
      ev::evaluate({scene("a", {g}, {{g, 0.9}, {far_large, 0.95}})});
  // The small bucket keeps a perfect record: the stray went to large,
  // which has no gt and therefore reports no AP.
  EXPECT_DOUBLE_EQ(*rep.buckets[0].map50, 1.0);
  EXPECT_FALSE(rep.buckets[2].map50.has_value());
  EXPECT_EQ(rep.buckets[2].gt_count, 0u);
}

// ===================== negatives =====================

TEST(Evaluate, CleanNegativesReportZero) {
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  const auto rep = ev::evaluate(
      {scene("p0", {g}, {{g, 0.9}}), scene("n0", {}, {}), scene("n1", {}, {})});
  EXPECT_EQ(rep.negatives.negative_images, 2u);
  EXPECT_EQ(rep.negatives.images_with_fp, 0u);
  EXPECT_DOUBLE_EQ(rep.negatives.fp_per_negative_image, 0.0);
}

TEST(Evaluate, TwoOfTenNegativesFiring) {
  std::vector<ev::ImageEval> images;
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  for (int i = 0; i < 8; ++i)
    images.push_back(scene("p" + std::to_string(i), {g}, {{g, 0.9}}));
  for (int i = 0; i < 10; ++i) {
    std::vector<ev::Detection> preds;
    if (i < 2) preds.emplace_back(box(0.3, 0.3, 0.2, 0.2), 0.95);
    images.push_back(scene("n" + std::to_string(i), {}, preds));
  }
  const auto rep = ev::evaluate(images);
  // F1 is maximized by keeping everything: 8 TP, 2 FP beats 0.95-only cuts.
  EXPECT_LE(rep.negatives.confidence_threshold, 0.9);
  EXPECT_EQ(rep.negatives.negative_images, 10u);
  EXPECT_EQ(rep.negatives.images_with_fp, 2u);
  EXPECT_DOUBLE_EQ(rep.negatives.fp_per_negative_image, 0.2);
}

TEST(Evaluate, BelowThresholdNegativeDetectionsDoNotCount) {
  std::vector<ev::ImageEval> images;
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  for (int i = 0; i < 4; ++i)
    images.push_back(scene("p" + std::to_string(i), {g}, {{g, 0.9}}));
  images.push_back(
      scene("n0", {}, {{box(0.3, 0.3, 0.2, 0.2), 0.1}}));
  const auto rep = ev::evaluate(images);
  // F1-max keeps only the four clean 0.9s; the 0.1 straggler sits below.
  EXPECT_DOUBLE_EQ(rep.negatives.confidence_threshold, 0.9);
  EXPECT_EQ(rep.negatives.images_with_fp, 0u);
  EXPECT_DOUBLE_EQ(rep.negatives.fp_per_negative_image, 0.0);
}

// ===================== operating points =====================

TEST(Evaluate, F1MaxPrefersCleanPrefix) {
  // 3 TPs at high confidence, 5 FPs at low confidence: best F1 cuts
  // between them.
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  std::vector<ev::ImageEval> images;
  for (int i = 0; i < 3; ++i)
    images.push_back(scene("p" + std::to_string(i), {g}, {{g, 0.9}}));
  std::vector<ev::Detection> junk;
  for (int i = 0; i < 5; ++i)
    junk.emplace_back(box(0.2, 0.2, 0.1, 0.1), 0.3);
  images.push_back(scene("n", {}, junk));
  const auto rep = ev::evaluate(images);
  EXPECT_DOUBLE_EQ(rep.f1_max.confidence, 0.9);
  EXPECT_EQ(rep.f1_max.counts.tp, 3u);
  EXPECT_EQ(rep.f1_max.counts.fp, 0u);
  EXPECT_DOUBLE_EQ(rep.f1_max.scores.f1, 1.0);
  // The fixed-confidence point at 0.25 keeps the junk.
  EXPECT_EQ(rep.at_fixed_confidence.counts.fp, 5u);
  EXPECT_DOUBLE_EQ(rep.at_fixed_confidence.scores.recall, 1.0);
}

TEST(Evaluate, FixedConfidenceIsConfigurable) {
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  ev::EvalOptions opts;
  opts.fixed_confidence = 0.5;
  const auto rep = ev::evaluate(
      {scene("a", {g}, {{g, 0.9}, {box(0.2, 0.2, 0.1, 0.1), 0.4}})}, opts);
  EXPECT_DOUBLE_EQ(rep.fixed_confidence, 0.5);
  EXPECT_EQ(rep.at_fixed_confidence.counts.fp, 0u);  // 0.4 is excluded
}

TEST(Evaluate, RejectsBadThresholds) {
  ev::EvalOptions opts;
  opts.thresholds = {};
  EXPECT_THROW(ev::evaluate({}, opts), std::invalid_argument);
  opts.thresholds = {0.5, 1.0};
  EXPECT_THROW(ev::evaluate({}, opts), std::invalid_argument);
}

// ===================== file loading =====================

TEST(LoadGroundTruth, ReadsTreeWithNegatives) {
  testutil::TempDir tmp;
  testutil::write_text(tmp.path() / "a.txt", "0 0.5 0.5 0.25 0.25\n");
  testutil::write_text(tmp.path() / "b.txt", "");
  testutil::write_text(tmp.path() / "skip.png", "not a label");
  const auto gt = ev::load_ground_truth(tmp.path());
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_EQ(gt.at("a").size(), 1u);
  EXPECT_TRUE(gt.at("b").empty());
}

TEST(LoadPredictions, ParsesConfidenceColumn) {
  testutil::TempDir tmp;
  testutil::write_text(tmp.path() / "a.txt",
                       "0 0.90 0.5 0.5 0.2 0.2\n1 0.25 0.3 0.3 0.1 0.1\n");
  const auto preds = ev::load_predictions(tmp.path());
  ASSERT_EQ(preds.at("a").size(), 2u);
  EXPECT_DOUBLE_EQ(preds.at("a")[0].confidence, 0.90);
  EXPECT_EQ(preds.at("a")[0].class_id(), 0);
  EXPECT_EQ(preds.at("a")[1].class_id(), 1);
}

TEST(LoadPredictions, RejectsOutOfRangeConfidence) {
  testutil::TempDir tmp;
  testutil::write_text(tmp.path() / "a.txt", "0 1.5 0.5 0.5 0.2 0.2\n");
  EXPECT_THROW(ev::load_predictions(tmp.path()), std::invalid_argument);
}

TEST(LoadPredictions, RejectsWrongArity) {
  testutil::TempDir tmp;
  testutil::write_text(tmp.path() / "a.txt", "0 0.9 0.5 0.5 0.2\n");
  EXPECT_THROW(ev::load_predictions(tmp.path()), std::invalid_argument);
  testutil::write_text(tmp.path() / "a.txt", "0 0.9 0.5 0.5 0.2 0.2 9\n");
  EXPECT_THROW(ev::load_predictions(tmp.path()), std::invalid_argument);
}

TEST(PairGtWithPredictions, MissingPredFileMeansNoDetections) {
  std::map<std::string, std::vector<NormLabel>> gt;
  gt["a"] = {box(0.5, 0.5, 0.2, 0.2)};
  gt["b"] = {};
  std::map<std::string, std::vector<ev::Detection>> preds;
  preds["a"] = {{box(0.5, 0.5, 0.2, 0.2), 0.9}};
  const auto images = ev::pair_ground_truth_with_predictions(gt, preds);
  ASSERT_EQ(images.size(), 2u);
  EXPECT_EQ(images[0].id, "a");
  EXPECT_EQ(images[0].preds.size(), 1u);
  EXPECT_TRUE(images[1].preds.empty());
}

TEST(PairGtWithPredictions, UnknownPredictionStemIsError) {
  std::map<std::string, std::vector<NormLabel>> gt;
  gt["a"] = {};
  std::map<std::string, std::vector<ev::Detection>> preds;
  preds["zz"] = {};
  EXPECT_THROW(ev::pair_ground_truth_with_predictions(gt, preds),
               std::invalid_argument);
}

TEST(EvaluateDirs, EndToEndPerfectRun) {
  testutil::TempDir tmp;
  fs::create_directories(tmp.path() / "labels");
  fs::create_directories(tmp.path() / "preds");
  testutil::write_text(tmp.path() / "labels/a.txt",
                       "0 0.500000 0.500000 0.250000 0.250000\n");
  testutil::write_text(tmp.path() / "labels/n.txt", "");
  testutil::write_text(tmp.path() / "preds/a.txt",
                       "0 0.9 0.500000 0.500000 0.250000 0.250000\n");
  const auto rep =
      ev::evaluate_dirs(tmp.path() / "labels", tmp.path() / "preds");
  EXPECT_DOUBLE_EQ(*rep.map50, 1.0);
  EXPECT_DOUBLE_EQ(*rep.map50_95, 1.0);
  EXPECT_EQ(rep.negatives.negative_images, 1u);
}

// ===================== report output =====================

TEST(ReportJson, StableAndComplete) {
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  const auto rep = ev::evaluate({scene("a", {g}, {{g, 0.9}})});
  const auto j = ev::report_to_json(rep);
  EXPECT_TRUE(j.contains("map50"));
  EXPECT_TRUE(j.contains("map50_95"));
  EXPECT_TRUE(j.contains("ap_per_threshold"));
  EXPECT_TRUE(j.contains("size_buckets"));
  EXPECT_TRUE(j.contains("negatives"));
  EXPECT_TRUE(j["size_buckets"].contains("small"));
  EXPECT_DOUBLE_EQ(j["map50"].get<double>(), 1.0);
  EXPECT_EQ(j["ap_per_threshold"].size(), 10u);
  EXPECT_EQ(j.dump(2), ev::report_to_json(rep).dump(2));
}

TEST(ReportJson, AbsentMetricsSerializeAsNull) {
  const auto rep = ev::evaluate({scene("n", {}, {})});
  const auto j = ev::report_to_json(rep);
  EXPECT_TRUE(j["map50"].is_null());
  EXPECT_TRUE(j["size_buckets"]["large"]["map50"].is_null());
}

TEST(PrintReport, MentionsHeadlineRows) {
  const auto g = box(0.5, 0.5, 0.2, 0.2);
  const auto rep = ev::evaluate({scene("a", {g}, {{g, 0.9}})});
  std::ostringstream os;
  ev::print_report(rep, os);
  const std::string text = os.str();
  EXPECT_NE(text.find("mAP50"), std::string::npos);
  EXPECT_NE(text.find("small"), std::string::npos);
  EXPECT_NE(text.find("medium"), std::string::npos);
  EXPECT_NE(text.find("large"), std::string::npos);
  EXPECT_NE(text.find("negatives"), std::string::npos);
}

}  // namespace
