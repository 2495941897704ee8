// Copyright (c) 2026 the detkit authors.
// Licensed under the Apache License 2.0.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "detkit/detkit.hpp"

namespace fs = std::filesystem;
namespace ds = detkit::dataset;
namespace ev = detkit::eval;
namespace bs = detkit::boxsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIngest = 3;
constexpr int kExitGradFail = 4;

// ======================================================================
// Config file handling
// ======================================================================

/// Load the JSON config file and return the section for one command.
/// Missing file is a config error; a missing section is just empty.
nlohmann::json config_section(const std::string& config_path,
                              const char* section) {
  if (config_path.empty()) return nlohmann::json();
  std::ifstream in(config_path);
  if (!in)
    throw std::invalid_argument("cannot open config file: " + config_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + config_path +
                                " is not valid JSON: " + e.what());
  }
  if (!doc.is_object())
    throw std::invalid_argument("config file " + config_path +
                                " must hold a JSON object");
  if (doc.contains(section)) return doc.at(section);
  return nlohmann::json();
}

/// Fill `value` from the config section when the flag was not given on
/// the command line. Command-line values always win.
template <typename T>
void take(const CLI::Option* opt, const nlohmann::json& sec, const char* key,
          T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (sec.is_object() && sec.contains(key)) {
    try {
      value = sec.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config key '") + key +
                                  "': " + e.what());
    }
  }
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ds::IoError("cannot open for write: " + path.string());
  out << content;
  if (!out) throw ds::IoError("write failed: " + path.string());
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(part, &used);
    if (used != part.size())
      throw std::invalid_argument("bad number in list: '" + part + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

std::vector<detkit::LossKind> parse_kinds(const std::string& text) {
  std::vector<detkit::LossKind> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    if (part == "iou")
      out.push_back(detkit::LossKind::kIoU);
    else if (part == "ciou")
      out.push_back(detkit::LossKind::kCIoU);
    else if (part == "m2iou")
      out.push_back(detkit::LossKind::kM2IoU);
    else
      throw std::invalid_argument("unknown loss kind '" + part +
                                  "' (expected iou, ciou, m2iou)");
  }
  if (out.empty()) throw std::invalid_argument("no loss kinds given");
  return out;
}

// ======================================================================
// prepare
// ======================================================================

struct PrepareArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  bool quiet = false;
  const CLI::Option* seed_opt = nullptr;
  const CLI::Option* out_opt = nullptr;
};

int cmd_prepare(const PrepareArgs& args) {
  nlohmann::json sec;
  std::uint64_t seed = args.seed;
  std::string out_dir = args.out;
  double negative_ratio = 0.0;
  bool augment = true;
  bool augment_negatives = true;
  bool clahe = false;
  bool two_class_masks = false;
  int max_ingest_errors = 0;
  int mask_min_area = 64;
  detkit::AugmentParams params;
  std::vector<std::string> class_names;

  try {
    if (args.config_path.empty())
      throw std::invalid_argument("prepare requires --config");
    sec = config_section(args.config_path, "prepare");
    if (!sec.is_object())
      throw std::invalid_argument("config has no \"prepare\" section");

    take(args.seed_opt, sec, "seed", seed);
    take(args.out_opt, sec, "out", out_dir);
    take(nullptr, sec, "negative_ratio", negative_ratio);
    take(nullptr, sec, "augment", augment);
    take(nullptr, sec, "augment_negatives", augment_negatives);
    take(nullptr, sec, "clahe", clahe);
    take(nullptr, sec, "two_class_masks", two_class_masks);
    take(nullptr, sec, "max_ingest_errors", max_ingest_errors);
    take(nullptr, sec, "mask_min_area", mask_min_area);
    take(nullptr, sec, "rotation_deg", params.rotation_deg);
    bool sigma_given = sec.is_object() && sec.contains("blur_sigma");
    take(nullptr, sec, "blur_kernel", params.blur_kernel);
    if (!sigma_given)
      params.blur_sigma = detkit::default_blur_sigma(params.blur_kernel);
    take(nullptr, sec, "blur_sigma", params.blur_sigma);
    take(nullptr, sec, "clahe_clip", params.clahe_clip);
    take(nullptr, sec, "clahe_tiles_x", params.clahe_tiles_x);
    take(nullptr, sec, "clahe_tiles_y", params.clahe_tiles_y);
    take(nullptr, sec, "class_names", class_names);
    params.validate();

    if (!(negative_ratio >= 0.0 && negative_ratio <= 0.5))
      throw std::invalid_argument("negative_ratio outside [0, 0.5]: " +
                                  std::to_string(negative_ratio));
    if (out_dir.empty())
      throw std::invalid_argument("no output directory (set \"out\" in the "
                                  "config or pass --out)");
    if (!sec.contains("sources") || !sec.at("sources").is_array() ||
        sec.at("sources").empty())
      throw std::invalid_argument("config needs a non-empty \"sources\" list");
  } catch (const std::exception& e) {
    std::cerr << "prepare: " << e.what() << "\n";
    return kExitConfig;
  }

  // Ingest every source, validating paths up front.
  std::vector<ds::ImageRecord> positives;
  std::vector<ds::ImageRecord> pool;
  std::vector<ds::IngestError> errors;
  try {
    std::vector<ds::MaskClassColor> colors;
    if (two_class_masks)
      colors = {{255, 0, 0, 0, 40}, {0, 255, 0, 1, 40}};
    else
      colors = {{255, 0, 0, 0, 40}, {0, 255, 0, 0, 40}};

    for (const auto& src : sec.at("sources")) {
      const std::string kind = src.at("kind").get<std::string>();
      const fs::path images = src.at("images").get<std::string>();
      if (!fs::is_directory(images))
        throw std::invalid_argument("images directory missing: " +
                                    images.string());
      ds::IngestReport rep;
      if (kind == "bbox_json") {
        const fs::path ann = src.at("annotations").get<std::string>();
        if (!fs::is_regular_file(ann))
          throw std::invalid_argument("annotation file missing: " +
                                      ann.string());
        rep = ds::ingest_bbox_json(images, ann);
      } else if (kind == "color_masks") {
        const fs::path masks = src.at("masks").get<std::string>();
        if (!fs::is_directory(masks))
          throw std::invalid_argument("masks directory missing: " +
                                      masks.string());
        rep = ds::ingest_color_masks(images, masks, colors, mask_min_area);
      } else {
        throw std::invalid_argument("unknown source kind '" + kind +
                                    "' (expected bbox_json or color_masks)");
      }
      for (auto& r : rep.records) positives.push_back(std::move(r));
      for (auto& e : rep.errors) errors.push_back(std::move(e));
    }

    if (sec.contains("negative_pool")) {
      std::vector<std::string> pools;
      if (sec.at("negative_pool").is_string())
        pools.push_back(sec.at("negative_pool").get<std::string>());
      else
        pools = sec.at("negative_pool").get<std::vector<std::string>>();
      for (const auto& p : pools) {
        if (!fs::is_directory(p))
          throw std::invalid_argument("negative pool directory missing: " + p);
        auto rep = ds::ingest_negative_pool(p);
        for (auto& r : rep.records) pool.push_back(std::move(r));
        for (auto& e : rep.errors) errors.push_back(std::move(e));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "prepare: bad source entry: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "prepare: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ds::IoError& e) {
    std::cerr << "prepare: " << e.what() << "\n";
    return kExitIo;
  }

  if (static_cast<int>(errors.size()) > max_ingest_errors) {
    for (const auto& e : errors)
      std::cerr << "prepare: ingest error [" << e.id << "]: " << e.message
                << "\n";
    std::cerr << "prepare: " << errors.size() << " ingest errors exceed the "
              << "allowed " << max_ingest_errors << "\n";
    return kExitIngest;
  }

  // Assemble and build.
  ds::BuildSummary summary;
  try {
    ds::DatasetManifest manifest;
    manifest.records = ds::split_dataset(std::move(positives), seed);
    manifest.seed = seed;
    if (!class_names.empty())
      manifest.class_names = class_names;
    else if (two_class_masks)
      manifest.class_names = {"neoplastic", "non_neoplastic"};
    if (negative_ratio > 0.0)
      manifest = ds::inject_negatives(std::move(manifest), std::move(pool),
                                      negative_ratio, seed);

    ds::BuildOptions opts;
    opts.params = params;
    opts.augment_train = augment;
    opts.augment_negatives = augment_negatives;
    opts.clahe = clahe;
    summary = ds::build_dataset(manifest, opts, out_dir);
  } catch (const ds::IoError& e) {
    std::cerr << "prepare: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "prepare: " << e.what() << "\n";
    return kExitConfig;
  }

  if (!summary.io_errors.empty()) {
    for (const auto& e : summary.io_errors)
      std::cerr << "prepare: " << e << "\n";
    return kExitIo;
  }

  if (!args.quiet) {
    const auto line = [](const char* name, const ds::SplitCounts& c) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "%-5s %6d images (%d positive, %d negative), %d boxes\n",
                    name, c.images, c.positives, c.negatives, c.boxes);
      return std::string(buf);
    };
    std::cout << "wrote " << out_dir << "\n"
              << line("train", summary.train) << line("val", summary.val)
              << line("test", summary.test);
  }
  return kExitOk;
}

// ======================================================================
// evaluate
// ======================================================================

struct EvaluateArgs {
  std::string gt_dir;
  std::string pred_dir;
  std::string config_path;
  std::string iou_thr;
  double conf_thr = 0.25;
  bool size_strata = true;
  bool negatives = true;
  std::string out = ".";
  bool quiet = false;
  const CLI::Option* iou_opt = nullptr;
  const CLI::Option* conf_opt = nullptr;
  const CLI::Option* strata_opt = nullptr;
  const CLI::Option* neg_opt = nullptr;
  const CLI::Option* out_opt = nullptr;
};

int cmd_evaluate(EvaluateArgs args) {
  try {
    const nlohmann::json sec = config_section(args.config_path, "evaluate");
    take(args.iou_opt, sec, "iou_thr", args.iou_thr);
    take(args.conf_opt, sec, "conf_thr", args.conf_thr);
    take(args.strata_opt, sec, "size_strata", args.size_strata);
    take(args.neg_opt, sec, "negatives", args.negatives);
    take(args.out_opt, sec, "out", args.out);

    ev::EvalOptions opts;
    if (!args.iou_thr.empty()) opts.thresholds = parse_double_list(args.iou_thr);
    opts.fixed_confidence = args.conf_thr;

    const ev::EvalReport report =
        ev::evaluate_dirs(args.gt_dir, args.pred_dir, opts);

    nlohmann::json j = ev::report_to_json(report);
    if (!args.size_strata) j.erase("size_buckets");
    if (!args.negatives) j.erase("negatives");
    write_file(fs::path(args.out) / "evaluation.json", j.dump(2) + "\n");

    if (!args.quiet) {
      std::ostringstream table;
      ev::print_report(report, table);
      std::string text = table.str();
      if (!args.size_strata || !args.negatives) {
        // Rebuild the table without the disabled sections.
        std::istringstream in(text);
        std::ostringstream kept;
        std::string line;
        while (std::getline(in, line)) {
          const bool bucket_row = line.rfind("small", 0) == 0 ||
                                  line.rfind("medium", 0) == 0 ||
                                  line.rfind("large", 0) == 0;
          const bool neg_row = line.rfind("negatives", 0) == 0;
          if ((bucket_row && !args.size_strata) || (neg_row && !args.negatives))
            continue;
          kept << line << "\n";
        }
        text = kept.str();
      }
      std::cout << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "evaluate: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

// ======================================================================
// simulate
// ======================================================================

struct SimulateArgs {
  std::string config_path;
  std::string kinds = "iou,ciou,m2iou";
  double alpha = 0.25;
  int steps = 1000;
  double lr = 1e-3;
  int n_pairs = 100;
  std::string mode = "overlapping";
  double convergence_iou = 0.9;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string csv;
  bool quiet = false;
  const CLI::Option* kinds_opt = nullptr;
  const CLI::Option* alpha_opt = nullptr;
  const CLI::Option* steps_opt = nullptr;
  const CLI::Option* lr_opt = nullptr;
  const CLI::Option* pairs_opt = nullptr;
  const CLI::Option* mode_opt = nullptr;
  const CLI::Option* conv_opt = nullptr;
  const CLI::Option* seed_opt = nullptr;
  const CLI::Option* out_opt = nullptr;
  const CLI::Option* csv_opt = nullptr;
};

int cmd_simulate(SimulateArgs args) {
  bs::ComparisonReport report;
  std::vector<detkit::LossKind> kinds;
  bs::RegressionConfig cfg;
  try {
    const nlohmann::json sec = config_section(args.config_path, "simulate");
    take(args.kinds_opt, sec, "kinds", args.kinds);
    take(args.alpha_opt, sec, "alpha", args.alpha);
    take(args.steps_opt, sec, "steps", args.steps);
    take(args.lr_opt, sec, "lr", args.lr);
    take(args.pairs_opt, sec, "n_pairs", args.n_pairs);
    take(args.mode_opt, sec, "mode", args.mode);
    take(args.conv_opt, sec, "convergence_iou", args.convergence_iou);
    take(args.seed_opt, sec, "seed", args.seed);
    take(args.out_opt, sec, "out", args.out);
    take(args.csv_opt, sec, "csv", args.csv);

    kinds = parse_kinds(args.kinds);
    cfg.alpha = args.alpha;
    cfg.steps = args.steps;
    cfg.learning_rate = args.lr;
    cfg.n_pairs = args.n_pairs;
    cfg.overlap_mode = bs::parse_overlap_mode(args.mode);
    cfg.convergence_iou = args.convergence_iou;
    cfg.seed = args.seed;
    cfg.validate();
    report = bs::compare(cfg, kinds);
  } catch (const std::exception& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    write_file(fs::path(args.out) / "simulation.json",
               bs::report_to_json(report).dump(2) + "\n");
    if (!args.csv.empty()) {
      std::ostringstream os;
      os << bs::kTrajectoryCsvHeader;
      for (const detkit::LossKind kind : kinds) {
        bs::RegressionConfig kcfg = cfg;
        kcfg.loss_kind = kind;
        const auto pair = bs::make_pair(cfg.seed, 0, cfg.overlap_mode);
        const auto traj = bs::descend(pair.gt, pair.init, kcfg);
        bs::append_trajectory_csv(os, detkit::loss_kind_name(kind), traj);
      }
      write_file(args.csv, os.str());
    }
  } catch (const ds::IoError& e) {
    std::cerr << "simulate: " << e.what() << "\n";
    return kExitIo;
  }

  if (!args.quiet) {
    for (const auto& k : report.kinds) {
      char buf[160];
      if (k.median_convergence_step)
        std::snprintf(buf, sizeof(buf),
                      "%-6s converged %5.1f%%  median step %8.1f  "
                      "mean final IoU %.4f\n",
                      detkit::loss_kind_name(k.kind),
                      100.0 * k.fraction_converged,
                      *k.median_convergence_step, k.mean_final_iou);
      else
        std::snprintf(buf, sizeof(buf),
                      "%-6s converged %5.1f%%  median step        -  "
                      "mean final IoU %.4f\n",
                      detkit::loss_kind_name(k.kind),
                      100.0 * k.fraction_converged, k.mean_final_iou);
      std::cout << buf;
    }
  }
  return kExitOk;
}

// ======================================================================
// losscheck
// ======================================================================

struct LosscheckArgs {
  std::string config_path;
  int pairs = 1000;
  std::uint64_t seed = 2026;
  double tolerance = 1e-4;
  double alpha = 0.25;
  bool quiet = false;
  const CLI::Option* pairs_opt = nullptr;
  const CLI::Option* seed_opt = nullptr;
  const CLI::Option* tol_opt = nullptr;
  const CLI::Option* alpha_opt = nullptr;
};

int cmd_losscheck(LosscheckArgs args) {
  std::vector<detkit::GradCheckReport> reports;
  try {
    const nlohmann::json sec = config_section(args.config_path, "losscheck");
    take(args.pairs_opt, sec, "pairs", args.pairs);
    take(args.seed_opt, sec, "seed", args.seed);
    take(args.tol_opt, sec, "tolerance", args.tolerance);
    take(args.alpha_opt, sec, "alpha", args.alpha);
    if (args.pairs < 1)
      throw std::invalid_argument("--pairs must be >= 1");
    if (!(args.tolerance > 0))
      throw std::invalid_argument("--tolerance must be > 0");

    const detkit::M2IoUParams params(args.alpha);
    for (const auto kind :
         {detkit::LossKind::kIoU, detkit::LossKind::kCIoU,
          detkit::LossKind::kM2IoU})
      reports.push_back(detkit::run_gradcheck(kind, args.pairs, args.seed,
                                              args.tolerance, params));
  } catch (const std::exception& e) {
    std::cerr << "losscheck: " << e.what() << "\n";
    return kExitConfig;
  }

  bool all_pass = true;
  for (const auto& r : reports) {
    if (!args.quiet) {
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "%-6s max rel err %.3e over %d pairs (tolerance %.1e)  "
                    "%s\n",
                    detkit::loss_kind_name(r.kind), r.max_rel_err,
                    r.pairs_checked, r.tolerance, r.pass ? "PASS" : "FAIL");
      std::cout << buf;
    }
    all_pass = all_pass && r.pass;
  }
  if (!all_pass) {
    for (const auto& r : reports) {
      if (r.pass) continue;
      char buf[512];
      std::snprintf(
          buf, sizeof(buf),
          "losscheck FAILED for %s: max rel err %.3e > %.1e\n"
          "  worst gt   = (%.9g, %.9g, %.9g, %.9g)\n"
          "  worst pred = (%.9g, %.9g, %.9g, %.9g)\n"
          "  analytic   = (%.9g, %.9g, %.9g, %.9g)\n"
          "  finite diff= (%.9g, %.9g, %.9g, %.9g)\n",
          detkit::loss_kind_name(r.kind), r.max_rel_err, r.tolerance,
          r.worst_gt[0], r.worst_gt[1], r.worst_gt[2], r.worst_gt[3],
          r.worst_pred[0], r.worst_pred[1], r.worst_pred[2], r.worst_pred[3],
          r.worst_analytic[0], r.worst_analytic[1], r.worst_analytic[2],
          r.worst_analytic[3], r.worst_fd[0], r.worst_fd[1], r.worst_fd[2],
          r.worst_fd[3]);
      std::cerr << buf;
    }
    return kExitGradFail;
  }
  return kExitOk;
}

}  // namespace

// ======================================================================
// entry point
// ======================================================================

int main(int argc, char** argv) {
  CLI::App app{"detection dataset, loss, and evaluation toolkit"};
  app.require_subcommand(1);

  PrepareArgs prep;
  auto* prepare = app.add_subcommand(
      "prepare", "ingest sources, split, inject negatives, emit a dataset");
  prepare->add_option("--config", prep.config_path,
                      "JSON config file (required)");
  prep.seed_opt = prepare->add_option("--seed", prep.seed, "shuffle seed");
  prep.out_opt = prepare->add_option("--out", prep.out, "output directory");
  prepare->add_flag("--quiet", prep.quiet, "suppress the summary");

  EvaluateArgs eval;
  auto* evaluate = app.add_subcommand(
      "evaluate", "score predictions against ground-truth labels");
  evaluate->add_option("gt_dir", eval.gt_dir, "ground-truth label directory")
      ->required();
  evaluate->add_option("pred_dir", eval.pred_dir, "prediction directory")
      ->required();
  evaluate->add_option("--config", eval.config_path, "JSON config file");
  eval.iou_opt = evaluate->add_option(
      "--iou-thr", eval.iou_thr, "comma-separated IoU thresholds");
  eval.conf_opt = evaluate->add_option(
      "--conf-thr", eval.conf_thr, "fixed confidence operating point");
  eval.strata_opt = evaluate->add_flag(
      "--size-strata,!--no-size-strata", eval.size_strata,
      "include per-size-bucket metrics");
  eval.neg_opt = evaluate->add_flag("--negatives,!--no-negatives",
                                    eval.negatives,
                                    "include the negative-image report");
  eval.out_opt =
      evaluate->add_option("--out", eval.out, "report output directory");
  evaluate->add_flag("--quiet", eval.quiet, "suppress the table");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate", "gradient-descend boxes under each loss and compare");
  simulate->add_option("--config", sim.config_path, "JSON config file");
  sim.kinds_opt = simulate->add_option("--kinds", sim.kinds,
                                       "comma-separated loss kinds");
  sim.alpha_opt = simulate->add_option("--alpha", sim.alpha,
                                       "corner-penalty weight in [0,1]");
  sim.steps_opt = simulate->add_option("--steps", sim.steps, "descent steps");
  sim.lr_opt = simulate->add_option("--lr", sim.lr, "learning rate");
  sim.pairs_opt =
      simulate->add_option("--n-pairs", sim.n_pairs, "number of box pairs");
  sim.mode_opt = simulate->add_option(
      "--mode", sim.mode, "overlapping | disjoint | mixed");
  sim.conv_opt = simulate->add_option("--convergence-iou", sim.convergence_iou,
                                      "IoU counted as converged");
  sim.seed_opt = simulate->add_option("--seed", sim.seed, "pair seed");
  sim.out_opt = simulate->add_option("--out", sim.out, "report directory");
  sim.csv_opt = simulate->add_option(
      "--csv", sim.csv, "also write pair-0 trajectories to this CSV file");
  simulate->add_flag("--quiet", sim.quiet, "suppress the summary");

  LosscheckArgs loss;
  auto* losscheck = app.add_subcommand(
      "losscheck", "verify analytic loss gradients against finite differences");
  losscheck->add_option("--config", loss.config_path, "JSON config file");
  loss.pairs_opt =
      losscheck->add_option("--pairs", loss.pairs, "random pairs per kind");
  loss.seed_opt = losscheck->add_option("--seed", loss.seed, "pair seed");
  loss.tol_opt = losscheck->add_option("--tolerance", loss.tolerance,
                                       "max allowed relative error");
  loss.alpha_opt = losscheck->add_option("--alpha", loss.alpha,
                                         "corner-penalty weight in [0,1]");
  losscheck->add_flag("--quiet", loss.quiet, "suppress per-kind lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  if (prepare->parsed()) return cmd_prepare(prep);
  if (evaluate->parsed()) return cmd_evaluate(eval);
  if (simulate->parsed()) return cmd_simulate(sim);
  if (losscheck->parsed()) return cmd_losscheck(loss);
  return kExitConfig;
}
