// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

#include "detkit/losses.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "detkit/gradcheck.hpp"
#include "detkit/rng.hpp"

namespace {

using detkit::LossKind;
using detkit::M2IoUParams;
using detkit::PixelBox;

// ===================== values =====================

TEST(CornerTerms, HandValues) {
  // gt (0,0,4,4), pred (1,0,5,4): both corner pairs are distance 1 apart and
  // the enclosing box (0,0,5,4) has diagonal^2 = 41.
  const auto ct =
      detkit::corner_terms(PixelBox(0, 0, 4, 4), PixelBox(1, 0, 5, 4));
  EXPECT_DOUBLE_EQ(ct.d2_min, 1.0);
  EXPECT_DOUBLE_EQ(ct.d2_max, 1.0);
  EXPECT_DOUBLE_EQ(ct.c2, 41.0);
}

TEST(M2IoULoss, HandValue) {
  // gt (0,0,2,2), pred (1,1,3,3), alpha 0.25:
  // IoU = 1/7, both corner distances are 2, c2 = 18,
  // loss = 6/7 + 2/18 = 61/63.
  const double l = detkit::m2iou_loss(PixelBox(0, 0, 2, 2),
                                      PixelBox(1, 1, 3, 3), M2IoUParams(0.25));
  EXPECT_NEAR(l, 61.0 / 63.0, 1e-12);
}

TEST(CIoULoss, HandValue) {
  // Same pair: squares share the aspect ratio so v = 0, centers are sqrt(2)
  // apart, and the loss is 6/7 + 2/18 = 61/63.
  const double l = detkit::ciou_loss(PixelBox(0, 0, 2, 2), PixelBox(1, 1, 3, 3));
  EXPECT_NEAR(l, 61.0 / 63.0, 1e-12);
}

TEST(M2IoULoss, AnotherHandValue) {
  // gt (0,0,4,4), pred (1,0,5,4): IoU = 12/20, penalty = 1/41 at any alpha
  // because the two corner distances tie.
  for (const double a : {0.0, 0.25, 0.5, 1.0}) {
    const double l = detkit::m2iou_loss(PixelBox(0, 0, 4, 4),
                                        PixelBox(1, 0, 5, 4), M2IoUParams(a));
    EXPECT_NEAR(l, 0.4 + 1.0 / 41.0, 1e-12);
  }
}

TEST(AllLosses, ZeroAtExactCoincidence) {
  const PixelBox b(3, 4, 9, 11);
  EXPECT_DOUBLE_EQ(detkit::iou_loss(b, b), 0.0);
  EXPECT_DOUBLE_EQ(detkit::ciou_loss(b, b), 0.0);
  EXPECT_DOUBLE_EQ(detkit::m2iou_loss(b, b), 0.0);
}

TEST(AllLosses, NonNegativeEverywhere) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    const double ax = detkit::uniform_real(rng, 0, 80);
    const double ay = detkit::uniform_real(rng, 0, 80);
    const PixelBox g(ax, ay, ax + detkit::uniform_real(rng, 1, 20),
                     ay + detkit::uniform_real(rng, 1, 20));
    const double bx = detkit::uniform_real(rng, 0, 80);
    const double by = detkit::uniform_real(rng, 0, 80);
    const PixelBox p(bx, by, bx + detkit::uniform_real(rng, 1, 20),
                     by + detkit::uniform_real(rng, 1, 20));
    const double alpha = detkit::uniform_real(rng, 0, 1);
    EXPECT_GE(detkit::iou_loss(g, p), 0.0);
    EXPECT_GE(detkit::ciou_loss(g, p), 0.0);
    EXPECT_GE(detkit::m2iou_loss(g, p, M2IoUParams(alpha)), 0.0);
  }
}

TEST(M2IoULoss, PenaltyBoundedByOne) {
  // Corner distances never exceed the enclosing diagonal, so the penalty is
  // at most 1 and the whole loss at most 2.
  std::mt19937_64 rng(37);
  for (int i = 0; i < 2000; ++i) {
    const double ax = detkit::uniform_real(rng, 0, 80);
    const double ay = detkit::uniform_real(rng, 0, 80);
    const PixelBox g(ax, ay, ax + detkit::uniform_real(rng, 1, 20),
                     ay + detkit::uniform_real(rng, 1, 20));
    const double bx = detkit::uniform_real(rng, 0, 80);
    const double by = detkit::uniform_real(rng, 0, 80);
    const PixelBox p(bx, by, bx + detkit::uniform_real(rng, 1, 20),
                     by + detkit::uniform_real(rng, 1, 20));
    const double l = detkit::m2iou_loss(g, p, M2IoUParams(0.25));
    EXPECT_LE(l, 2.0 + 1e-12);
    const auto ct = detkit::corner_terms(g, p);
    EXPECT_LE(ct.d2_max, ct.c2 + 1e-9);
  }
}

TEST(M2IoULoss, AlphaInterpolatesBetweenCornerWeights) {
  const PixelBox g(0, 0, 10, 10);
  const PixelBox p(1, 1, 10.5, 10.5);
  const auto ct = detkit::corner_terms(g, p);
  ASSERT_LT(ct.d2_min, ct.d2_max);
  const double base = detkit::iou_loss(g, p);
  // alpha = 1 weights the near corner fully, alpha = 0 the far corner.
  EXPECT_NEAR(detkit::m2iou_loss(g, p, M2IoUParams(1.0)),
              base + ct.d2_min / ct.c2, 1e-12);
  EXPECT_NEAR(detkit::m2iou_loss(g, p, M2IoUParams(0.0)),
              base + ct.d2_max / ct.c2, 1e-12);
  // Smaller alpha puts more weight on the worse corner: loss is decreasing
  // in alpha.
  double prev = detkit::m2iou_loss(g, p, M2IoUParams(0.0));
  for (double a = 0.1; a <= 1.0; a += 0.1) {
    const double cur = detkit::m2iou_loss(g, p, M2IoUParams(a));
    EXPECT_LE(cur, prev + 1e-12);
    prev = cur;
  }
}

TEST(M2IoUParams, RejectsAlphaOutsideUnitInterval) {
  EXPECT_THROW(M2IoUParams(-0.1), std::invalid_argument);
  EXPECT_THROW(M2IoUParams(1.1), std::invalid_argument);
  EXPECT_NO_THROW(M2IoUParams(0.0));
  EXPECT_NO_THROW(M2IoUParams(1.0));
}

TEST(CIoULoss, ReducesTowardIoULossWhenAligned) {
  // Same centers and aspect ratio: both penalty terms vanish.
  const PixelBox g(10, 10, 30, 30);
  const PixelBox p(5, 5, 35, 35);
  EXPECT_NEAR(detkit::ciou_loss(g, p), detkit::iou_loss(g, p), 1e-12);
}

TEST(DisjointBoxes, OnlyIoULossIsFlat) {
  // Two widely separated pairs, the second further apart. The plain IoU loss
  // cannot tell them apart; both penalized losses can.
  const PixelBox g(0, 0, 10, 10);
  const PixelBox near_p(20, 0, 30, 10);
  const PixelBox far_p(60, 0, 70, 10);
  EXPECT_DOUBLE_EQ(detkit::iou_loss(g, near_p), 1.0);
  EXPECT_DOUBLE_EQ(detkit::iou_loss(g, far_p), 1.0);
  EXPECT_GT(detkit::ciou_loss(g, far_p), detkit::ciou_loss(g, near_p));
  EXPECT_GT(detkit::m2iou_loss(g, far_p), detkit::m2iou_loss(g, near_p));
}

// ===================== gradients =====================

TEST(LossGradient, ZeroVectorAtCoincidence) {
  const PixelBox b(5, 6, 15, 18);
  for (const auto kind :
       {LossKind::kIoU, LossKind::kCIoU, LossKind::kM2IoU}) {
    const auto g = detkit::loss_gradient(kind, b, b);
    EXPECT_TRUE(g.subgradient);
    for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(g.d[k], 0.0);
  }
}

TEST(LossGradient, IoUFlatForDisjointPairs) {
  const PixelBox g(0, 0, 10, 10);
  const PixelBox p(40, 40, 55, 60);
  const auto grad = detkit::loss_gradient(LossKind::kIoU, g, p);
  EXPECT_FALSE(grad.subgradient);
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(grad.d[k], 0.0);
}

TEST(LossGradient, PenalizedKindsPullDisjointPairs) {
  const PixelBox g(0, 0, 10, 10);
  const PixelBox p(40, 40, 55, 60);
  for (const auto kind : {LossKind::kCIoU, LossKind::kM2IoU}) {
    const auto grad = detkit::loss_gradient(kind, g, p);
    double mag = 0;
    for (int k = 0; k < 4; ++k) mag += std::abs(grad.d[k]);
    EXPECT_GT(mag, 0.0) << detkit::loss_kind_name(kind);
    // A small step against the gradient must reduce the loss: unlike plain
    // IoU, the penalized kinds give usable signal with zero overlap.
    const double before = detkit::loss_value(kind, g, p);
    const double eps = 1e-3;
    const PixelBox stepped(p.x_min - eps * grad.d[0],
                           p.y_min - eps * grad.d[1],
                           p.x_max - eps * grad.d[2],
                           p.y_max - eps * grad.d[3]);
    EXPECT_LT(detkit::loss_value(kind, g, stepped), before)
        << detkit::loss_kind_name(kind);
  }
}

TEST(LossGradient, FlagsTiedCornerDistances) {
  // Pure horizontal translation keeps both corner distances equal.
  const auto g =
      detkit::loss_gradient(LossKind::kM2IoU, PixelBox(0, 0, 4, 4),
                            PixelBox(1, 0, 5, 4));
  EXPECT_TRUE(g.subgradient);
}

TEST(LossGradient, FlagsExactTouching) {
  const auto g = detkit::loss_gradient(LossKind::kIoU, PixelBox(0, 0, 1, 1),
                                       PixelBox(1, 0, 2, 1));
  EXPECT_TRUE(g.subgradient);
}

TEST(LossGradient, MatchesFiniteDifferencesOnRandomPairs) {
  for (const auto kind :
       {LossKind::kIoU, LossKind::kCIoU, LossKind::kM2IoU}) {
    const auto rep = detkit::run_gradcheck(kind, 300, /*seed=*/1234);
    EXPECT_TRUE(rep.pass) << detkit::loss_kind_name(kind)
                          << " max_rel_err=" << rep.max_rel_err;
    EXPECT_EQ(rep.pairs_checked, 300);
    EXPECT_LE(rep.max_rel_err, 1e-4);
  }
}

TEST(LossGradient, MatchesFiniteDifferencesAcrossAlpha) {
  for (const double alpha : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const auto rep = detkit::run_gradcheck(LossKind::kM2IoU, 100, /*seed=*/77,
                                           1e-4, M2IoUParams(alpha));
    EXPECT_TRUE(rep.pass) << "alpha=" << alpha
                          << " max_rel_err=" << rep.max_rel_err;
  }
}

TEST(LossGradient, HandCheckedDescentDirection) {
  // Prediction overlapping but shifted right of the target (and not a pure
  // translation, which would tie the corner distances). Pulling x_min left
  // grows the intersection and shrinks the near-corner distance; pulling
  // x_max left shrinks the union and the enclosing box. Both x partials
  // must be positive so that descent moves the box leftward.
  const PixelBox g(0, 0, 10, 10);
  const PixelBox p(2, 0.5, 11, 10.2);
  const auto grad = detkit::loss_gradient(LossKind::kM2IoU, g, p);
  EXPECT_FALSE(grad.subgradient);
  EXPECT_GT(grad.d[0], 0.0);
  EXPECT_GT(grad.d[2], 0.0);
}

TEST(GradCheck, ReportCarriesWorstPair) {
  const auto rep = detkit::run_gradcheck(LossKind::kCIoU, 50, 99);
  EXPECT_TRUE(rep.pass);
  // The worst pair is a real box pair: corners ordered.
  EXPECT_LT(rep.worst_gt[0], rep.worst_gt[2]);
  EXPECT_LT(rep.worst_pred[1], rep.worst_pred[3]);
}

TEST(GradCheck, DeterministicForFixedSeed) {
  const auto a = detkit::run_gradcheck(LossKind::kM2IoU, 64, 2024);
  const auto b = detkit::run_gradcheck(LossKind::kM2IoU, 64, 2024);
  EXPECT_EQ(a.max_rel_err, b.max_rel_err);
  EXPECT_EQ(a.pairs_resampled, b.pairs_resampled);
  EXPECT_EQ(a.worst_pred, b.worst_pred);
}

}  // namespace
