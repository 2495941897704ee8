// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

#ifndef DETKIT_BOXSIM_HPP_
#define DETKIT_BOXSIM_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "detkit/geometry.hpp"
#include "detkit/losses.hpp"
#include "detkit/rng.hpp"

namespace detkit::boxsim {

// ======================================================================
// Configuration
// ======================================================================

/// How the initial box relates to its target.
enum class OverlapMode { kOverlapping, kDisjoint, kMixed };

inline const char* overlap_mode_name(OverlapMode m) {
  switch (m) {
    case OverlapMode::kOverlapping: return "overlapping";
    case OverlapMode::kDisjoint: return "disjoint";
    case OverlapMode::kMixed: return "mixed";
  }
  return "?";
}

inline OverlapMode parse_overlap_mode(const std::string& s) {
  if (s == "overlapping") return OverlapMode::kOverlapping;
  if (s == "disjoint") return OverlapMode::kDisjoint;
  if (s == "mixed") return OverlapMode::kMixed;
  throw std::invalid_argument("unknown overlap mode '" + s + "'");
}

/// Settings for one batch of descent runs.
struct RegressionConfig {
  LossKind loss_kind = LossKind::kM2IoU;
  double alpha = 0.25;
  int steps = 1000;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  int n_pairs = 100;
  OverlapMode overlap_mode = OverlapMode::kOverlapping;
  double convergence_iou = 0.9;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::invalid_argument("RegressionConfig: alpha outside [0, 1]");
    if (steps < 0 || steps > 1000000)
      throw std::invalid_argument(
          "RegressionConfig: steps outside [0, 10^6]");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
      throw std::invalid_argument(
          "RegressionConfig: learning_rate must be finite and positive");
    if (n_pairs < 1)
      throw std::invalid_argument("RegressionConfig: n_pairs must be >= 1");
    if (!(convergence_iou > 0.0 && convergence_iou <= 1.0))
      throw std::invalid_argument(
          "RegressionConfig: convergence_iou outside (0, 1]");
  }
};

// ======================================================================
// Trajectories
// ======================================================================

/// One recorded descent state.
struct TrajectoryPoint {
  double loss = 0.0;
  double iou = 0.0;
  PixelBox box;

  TrajectoryPoint(double l, double i, const PixelBox& b)
      : loss(l), iou(i), box(b) {}
};

/// A full descent run: the initial state plus one point per step. A run
/// that hits a non-finite state stops early with `aborted` set.
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  std::optional<int> convergence_step;
  bool aborted = false;
  std::string diagnostic;

  double final_iou() const { return points.back().iou; }
  bool converged() const { return convergence_step.has_value(); }
};

namespace detail {

inline constexpr double kMinExtent = 1e-6;

/// Restore corner order after a step, keeping a minimum extent.
inline void repair(double& lo, double& hi) {
  if (hi < lo) std::swap(lo, hi);
  if (hi - lo < kMinExtent) hi = lo + kMinExtent;
}

}  // namespace detail

/**
 * @brief Plain gradient descent of one box toward a target.
 *
 * Each step moves every predicted corner against the loss gradient by the
 * learning rate, then repairs corner order. Loss and IoU are recorded for
 * the initial state and after every step. The convergence step is the
 * first index whose IoU reaches the configured threshold.
 */
inline Trajectory descend(const PixelBox& gt, const PixelBox& init,
                          const RegressionConfig& cfg) {
  cfg.validate();
  const M2IoUParams params(cfg.alpha);

  Trajectory traj;
  traj.points.reserve(static_cast<std::size_t>(cfg.steps) + 1);

  PixelBox pred = init;
  const auto record = [&](int step) {
    const double v = iou(gt, pred);
    traj.points.emplace_back(loss_value(cfg.loss_kind, gt, pred, params), v,
                             pred);
    if (!traj.convergence_step && v >= cfg.convergence_iou)
      traj.convergence_step = step;
  };
  record(0);

  for (int step = 1; step <= cfg.steps; ++step) {
    const LossGrad g = loss_gradient(cfg.loss_kind, gt, pred, params);
    double x0 = pred.x_min - cfg.learning_rate * g.d[0];
    double y0 = pred.y_min - cfg.learning_rate * g.d[1];
    double x1 = pred.x_max - cfg.learning_rate * g.d[2];
    double y1 = pred.y_max - cfg.learning_rate * g.d[3];
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) ||
        !std::isfinite(y1)) {
      traj.aborted = true;
      traj.diagnostic = "non-finite box state at step " +
                        std::to_string(step) + " (" +
                        std::string(loss_kind_name(cfg.loss_kind)) + ")";
      break;
    }
    detail::repair(x0, x1);
    detail::repair(y0, y1);
    pred = PixelBox(x0, y0, x1, y1);
    record(step);
  }
  return traj;
}

// ======================================================================
// Pair generation
// ======================================================================

/// A target box with its starting box.
struct BoxPair {
  PixelBox gt;
  PixelBox init;
};

namespace detail {

inline PixelBox random_gt(std::mt19937_64& rng) {
  const double w = uniform_real(rng, 0.1, 0.5);
  const double h = uniform_real(rng, 0.1, 0.5);
  const double x0 = uniform_real(rng, 0.0, 1.0 - w);
  const double y0 = uniform_real(rng, 0.0, 1.0 - h);
  return PixelBox(x0, y0, x0 + w, y0 + h);
}

inline PixelBox jittered(const PixelBox& gt, std::mt19937_64& rng) {
  const double w = gt.x_max - gt.x_min;
  const double h = gt.y_max - gt.y_min;
  for (;;) {
    const double sw = w * uniform_real(rng, 0.5, 1.5);
    const double sh = h * uniform_real(rng, 0.5, 1.5);
    const double cx =
        0.5 * (gt.x_min + gt.x_max) + uniform_real(rng, -0.4, 0.4) * w;
    const double cy =
        0.5 * (gt.y_min + gt.y_max) + uniform_real(rng, -0.4, 0.4) * h;
    const PixelBox cand(cx - sw / 2, cy - sh / 2, cx + sw / 2, cy + sh / 2);
    if (iou(gt, cand) > 0.0) return cand;
  }
}

inline PixelBox translated_apart(const PixelBox& gt, std::mt19937_64& rng) {
  const double w = gt.x_max - gt.x_min;
  const double h = gt.y_max - gt.y_min;
  const double dx = (w + uniform_real(rng, 0.05, 0.3)) *
                    (bounded(rng, 2) ? 1.0 : -1.0);
  const double dy = (h + uniform_real(rng, 0.05, 0.3)) *
                    (bounded(rng, 2) ? 1.0 : -1.0);
  return PixelBox(gt.x_min + dx, gt.y_min + dy, gt.x_max + dx, gt.y_max + dy);
}

}  // namespace detail

/// Generate the pair for one index. Pairs are seeded independently, so
/// any subset can be regenerated without running the others.
inline BoxPair make_pair(std::uint64_t seed, int index, OverlapMode mode) {
  std::mt19937_64 rng(child_seed(seed, static_cast<std::uint64_t>(index)));
  BoxPair p{detail::random_gt(rng), PixelBox(0, 0, 1, 1)};
  const bool disjoint =
      mode == OverlapMode::kDisjoint ||
      (mode == OverlapMode::kMixed && index % 2 == 1);
  p.init = disjoint ? detail::translated_apart(p.gt, rng)
                    : detail::jittered(p.gt, rng);
  return p;
}

// ======================================================================
// Comparison across loss kinds
// ======================================================================

/// Aggregates for one loss over the shared pair set.
struct KindStats {
  LossKind kind = LossKind::kIoU;
  double fraction_converged = 0.0;
  std::optional<double> median_convergence_step;
  double mean_final_iou = 0.0;
  int aborted_runs = 0;
};

/// Side-by-side convergence statistics, one row per loss kind.
struct ComparisonReport {
  std::uint64_t seed = 0;
  int n_pairs = 0;
  int steps = 0;
  double learning_rate = 0.0;
  double alpha = 0.25;
  OverlapMode overlap_mode = OverlapMode::kOverlapping;
  double convergence_iou = 0.9;
  std::vector<KindStats> kinds;
};

/**
 * @brief Run descent for each loss kind over one shared set of pairs.
 *
 * Every kind sees exactly the same (gt, init) pairs, so differences in
 * the aggregates are attributable to the loss geometry alone.
 * Trajectories are reduced to their aggregates pair by pair; none are
 * retained.
 */
inline ComparisonReport compare(const RegressionConfig& cfg,
                                const std::vector<LossKind>& kinds) {
  cfg.validate();
  if (kinds.empty())
    throw std::invalid_argument("compare: no loss kinds given");

  ComparisonReport rep;
  rep.seed = cfg.seed;
  rep.n_pairs = cfg.n_pairs;
  rep.steps = cfg.steps;
  rep.learning_rate = cfg.learning_rate;
  rep.alpha = cfg.alpha;
  rep.overlap_mode = cfg.overlap_mode;
  rep.convergence_iou = cfg.convergence_iou;

  for (const LossKind kind : kinds) {
    RegressionConfig kcfg = cfg;
    kcfg.loss_kind = kind;

    KindStats stats;
    stats.kind = kind;
    std::vector<int> conv_steps;
    double iou_sum = 0.0;
    for (int i = 0; i < cfg.n_pairs; ++i) {
      const BoxPair pair = make_pair(cfg.seed, i, cfg.overlap_mode);
      const Trajectory traj = descend(pair.gt, pair.init, kcfg);
      if (traj.aborted) stats.aborted_runs++;
      if (traj.converged()) conv_steps.push_back(*traj.convergence_step);
      iou_sum += traj.final_iou();
    }
    stats.fraction_converged =
        double(conv_steps.size()) / double(cfg.n_pairs);
    stats.mean_final_iou = iou_sum / double(cfg.n_pairs);
    if (!conv_steps.empty()) {
      std::sort(conv_steps.begin(), conv_steps.end());
      const std::size_t n = conv_steps.size();
      stats.median_convergence_step =
          n % 2 ? double(conv_steps[n / 2])
                : 0.5 * (conv_steps[n / 2 - 1] + conv_steps[n / 2]);
    }
    rep.kinds.push_back(stats);
  }
  return rep;
}

// ======================================================================
// Output
// ======================================================================

/// Serialize with stable (sorted) key order.
inline nlohmann::json report_to_json(const ComparisonReport& r) {
  nlohmann::json kinds = nlohmann::json::object();
  for (const auto& k : r.kinds) {
    nlohmann::json entry = {
        {"fraction_converged", k.fraction_converged},
        {"mean_final_iou", k.mean_final_iou},
        {"aborted_runs", k.aborted_runs}};
    if (k.median_convergence_step)
      entry["median_convergence_step"] = *k.median_convergence_step;
    else
      entry["median_convergence_step"] = nullptr;
    kinds[loss_kind_name(k.kind)] = entry;
  }
  return {{"seed", r.seed},
          {"n_pairs", r.n_pairs},
          {"steps", r.steps},
          {"learning_rate", r.learning_rate},
          {"alpha", r.alpha},
          {"overlap_mode", overlap_mode_name(r.overlap_mode)},
          {"convergence_iou", r.convergence_iou},
          {"kinds", kinds}};
}

/// Append one trajectory as CSV rows: tag, step, loss, iou, corners.
inline void append_trajectory_csv(std::ostream& os, const std::string& tag,
                                  const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    const auto& p = traj.points[i];
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", tag.c_str(), i,
                  p.loss, p.iou, p.box.x_min, p.box.y_min, p.box.x_max,
                  p.box.y_max);
    os << buf;
  }
}

inline constexpr const char* kTrajectoryCsvHeader =
    "kind,step,loss,iou,x_min,y_min,x_max,y_max\n";

}  // namespace detkit::boxsim

#endif  // DETKIT_BOXSIM_HPP_
