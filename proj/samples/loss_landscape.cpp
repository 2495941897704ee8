// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

// Sweeps a unit box horizontally past a fixed target and prints the loss
// profile of each kind as CSV, then descends one disjoint pair to show
// which losses can pull a non-overlapping box home.

#include <cstdio>

#include "detkit/detkit.hpp"

int main() {
  using detkit::LossKind;
  namespace bs = detkit::boxsim;

  const detkit::PixelBox gt(4.0, 4.0, 6.0, 6.0);
  const detkit::M2IoUParams params(0.25);

  std::printf("offset,iou_loss,ciou_loss,m2iou_loss\n");
  for (int i = 0; i <= 80; ++i) {
    const double offset = -4.0 + 0.1 * i;
    const detkit::PixelBox pred(4.0 + offset, 4.0, 6.0 + offset, 6.0);
    std::printf("%.2f,%.6f,%.6f,%.6f\n", offset,
                detkit::loss_value(LossKind::kIoU, gt, pred, params),
                detkit::loss_value(LossKind::kCIoU, gt, pred, params),
                detkit::loss_value(LossKind::kM2IoU, gt, pred, params));
  }

  bs::RegressionConfig cfg;
  cfg.steps = 5000;
  cfg.learning_rate = 1e-3;
  const detkit::PixelBox start(0.1, 0.1, 0.25, 0.25);
  const detkit::PixelBox target(0.6, 0.6, 0.9, 0.9);
  for (const auto kind :
       {LossKind::kIoU, LossKind::kCIoU, LossKind::kM2IoU}) {
    cfg.loss_kind = kind;
    const auto traj = bs::descend(target, start, cfg);
    std::printf("# %-6s final IoU %.4f after %zu steps%s\n",
                detkit::loss_kind_name(kind), traj.final_iou(),
                traj.points.size() - 1,
                traj.converged() ? " (converged)" : "");
  }
  return 0;
}
