// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "n2r/imqual.hpp"
#include "n2r/rng.hpp"
#include "n2r/serde.hpp"

namespace n2r {

namespace fs = std::filesystem;

std::filesystem::path Config::dataset_path() const {
  return dataset_dir.empty() ? out_dir / "dataset" : fs::path(dataset_dir);
}
std::filesystem::path Config::checkpoint_path() const {
  return checkpoint.empty() ? out_dir / "fit" / "checkpoint.n2rf" : fs::path(checkpoint);
}
std::filesystem::path Config::report_path() const {
  return report_dir.empty() ? out_dir / "test" : fs::path(report_dir);
}

void Config::validate() const {
  scene.validate();
  trajectory.validate();
  intrinsics.validate();
  train.validate();
  render.validate();
  suite.validate();
  for (const auto& m : mutations) m.validate();
  if (grid.resolution.minCoeff() < 2) throw ConfigError("grid resolution must be >= 2");
  if (epsilons.empty()) throw ConfigError("epsilon list must not be empty");
  double prev = 0;
  for (double e : epsilons) {
    if (!(e > prev && e < 1.0))
      throw ConfigError("epsilons must be strictly increasing in (0,1)");
    prev = e;
  }
  if (test.width < 16 || test.height < 16) throw ConfigError("test resolution too small");
  if (bench.frames < 1) throw ConfigError("bench.frames must be >= 1");
}

TrajectorySpec default_trajectory_for(const SceneSpec& scene) {
  TrajectorySpec t;
  if (scene.kind == SceneKind::wall) {
    t.kind = TrajectorySpec::Kind::wall_scan;
    t.n_frames = 300;
    t.amplitude = 1.2;
    t.height = 0.0;
  } else {
    t.kind = TrajectorySpec::Kind::orbit;
    t.n_frames = 300;
    t.amplitude = 2.0;  // orbit radius
    t.height = 1.6;
  }
  t.lookat = scene.default_lookat();
  return t;
}

std::vector<MutationSpec> default_mutations() {
  std::vector<MutationSpec> muts;
  MutationSpec m1a;
  m1a.kind = MutationKind::m1_brightness;
  m1a.gain = 0.6;
  MutationSpec m1b = m1a;
  m1b.gain = 1.4;
  MutationSpec m2;
  m2.kind = MutationKind::m2_noise_patch;
  m2.patch_frac = 0.25;
  MutationSpec m3;
  m3.kind = MutationKind::m3_black_patches;
  m3.n_patches = 6;
  muts.push_back(m1a);
  muts.push_back(m1b);
  muts.push_back(m2);
  muts.push_back(m3);
  return muts;
}

// ---------------------------------------------------------------------------
// Config (de)serialization

namespace {

void mutation_from_json(const nlohmann::json& j, MutationSpec& m) {
  m.kind = mutation_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("gain")) m.gain = j.at("gain").get<double>();
  if (j.contains("patch_frac")) m.patch_frac = j.at("patch_frac").get<double>();
  if (j.contains("n_patches")) m.n_patches = j.at("n_patches").get<int>();
  if (j.contains("patch_px")) m.patch_px = j.at("patch_px").get<int>();
  if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
}

nlohmann::json mutation_to_json(const MutationSpec& m) {
  return {{"kind", to_string(m.kind)}, {"gain", m.gain},
          {"patch_frac", m.patch_frac}, {"n_patches", m.n_patches},
          {"patch_px", m.patch_px},     {"seed", m.seed}};
}

void sut_entry_from_json(const nlohmann::json& j, SutConfigEntry& e) {
  e.type = j.at("type").get<std::string>();
  e.name = j.value("name", e.type);
  if (j.contains("max_points")) e.max_points = j.at("max_points").get<int>();
  if (j.contains("classes"))
    e.classes = j.at("classes").get<std::map<std::string, std::string>>();
  if (j.contains("command")) e.command = j.at("command").get<std::string>();
  if (j.contains("task")) e.task = j.at("task").get<std::string>();
  if (j.contains("timeout_s")) e.timeout_s = j.at("timeout_s").get<double>();
}

nlohmann::json sut_entry_to_json(const SutConfigEntry& e) {
  nlohmann::json j = {{"type", e.type}, {"name", e.name}, {"max_points", e.max_points}};
  if (!e.classes.empty()) j["classes"] = e.classes;
  if (!e.command.empty()) {
    j["command"] = e.command;
    j["task"] = e.task;
    j["timeout_s"] = e.timeout_s;
  }
  return j;
}

}  // namespace

Config config_from_json(const nlohmann::json& j) {
  Config cfg;
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

  if (j.contains("scene")) j.at("scene").get_to(cfg.scene);
  cfg.trajectory = default_trajectory_for(cfg.scene);
  if (j.contains("trajectory")) j.at("trajectory").get_to(cfg.trajectory);

  if (j.contains("intrinsics")) j.at("intrinsics").get_to(cfg.intrinsics);

  if (j.contains("train")) {
    const auto& t = j.at("train");
    cfg.train.steps = t.value("steps", cfg.train.steps);
    cfg.train.rays_per_step = t.value("rays_per_step", cfg.train.rays_per_step);
    cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
  }
  if (j.contains("render")) {
    const auto& r = j.at("render");
    cfg.render.samples_per_ray = r.value("samples_per_ray", cfg.render.samples_per_ray);
    cfg.render.jitter = r.value("jitter", cfg.render.jitter);
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("resolution")) {
      const auto res = g.at("resolution").get<std::vector<int>>();
      if (res.size() != 3) throw ConfigError("grid.resolution must have 3 entries");
      cfg.grid.resolution = Eigen::Vector3i{res[0], res[1], res[2]};
    }
    cfg.grid.inflate = g.value("inflate", cfg.grid.inflate);
    cfg.grid.sigma_init = g.value("sigma_init", cfg.grid.sigma_init);
    cfg.grid.color_init = g.value("color_init", cfg.grid.color_init);
    if (g.contains("background_init"))
      cfg.grid.background_init = g.at("background_init").get<Vec3>();
  }
  if (j.contains("suite")) {
    const auto& s = j.at("suite");
    cfg.suite.small_shift = s.value("small_shift", cfg.suite.small_shift);
    cfg.suite.large_shift = s.value("large_shift", cfg.suite.large_shift);
    cfg.suite.small_angle = s.value("small_angle", cfg.suite.small_angle);
    cfg.suite.large_angle = s.value("large_angle", cfg.suite.large_angle);
    cfg.suite.roll_angle = s.value("roll_angle", cfg.suite.roll_angle);
  }

  if (j.contains("mutations")) {
    cfg.mutations.clear();
    for (const auto& jm : j.at("mutations")) {
      MutationSpec m;
      mutation_from_json(jm, m);
      cfg.mutations.push_back(m);
    }
  } else {
    cfg.mutations = default_mutations();
  }

  if (j.contains("epsilons")) cfg.epsilons = j.at("epsilons").get<std::vector<double>>();

  if (j.contains("suts")) {
    for (const auto& js : j.at("suts")) {
      SutConfigEntry e;
      sut_entry_from_json(js, e);
      cfg.suts.push_back(e);
    }
  } else {
    SutConfigEntry harris;
    harris.type = "ref_detect";
    harris.name = "harris";
    cfg.suts.push_back(harris);
  }

  if (j.contains("test")) {
    const auto& t = j.at("test");
    cfg.test.width = t.value("width", cfg.test.width);
    cfg.test.height = t.value("height", cfg.test.height);
    cfg.test.sut_failure_budget = t.value("sut_failure_budget", cfg.test.sut_failure_budget);
  }
  if (j.contains("bench")) {
    const auto& b = j.at("bench");
    if (b.contains("resolutions")) {
      cfg.bench.resolutions.clear();
      for (const auto& r : b.at("resolutions")) {
        if (!r.is_array() || r.size() != 2)
          throw ConfigError("bench.resolutions entries must be [width, height]");
        cfg.bench.resolutions.emplace_back(r[0].get<int>(), r[1].get<int>());
      }
    }
    cfg.bench.frames = b.value("frames", cfg.bench.frames);
  }

  cfg.dataset_dir = j.value("dataset_dir", std::string());
  cfg.checkpoint = j.value("checkpoint", std::string());
  cfg.report_dir = j.value("report_dir", std::string());

  cfg.validate();
  return cfg;
}

nlohmann::json config_to_json(const Config& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir.string();
  j["scene"] = cfg.scene;
  j["trajectory"] = cfg.trajectory;
  j["intrinsics"] = cfg.intrinsics;
  j["train"] = {{"steps", cfg.train.steps},
                {"rays_per_step", cfg.train.rays_per_step},
                {"learning_rate", cfg.train.learning_rate}};
  j["render"] = {{"samples_per_ray", cfg.render.samples_per_ray},
                 {"jitter", cfg.render.jitter}};
  j["grid"] = {{"resolution", {cfg.grid.resolution.x(), cfg.grid.resolution.y(),
                               cfg.grid.resolution.z()}},
               {"inflate", cfg.grid.inflate},
               {"sigma_init", cfg.grid.sigma_init},
               {"color_init", cfg.grid.color_init},
               {"background_init", cfg.grid.background_init}};
  j["suite"] = {{"small_shift", cfg.suite.small_shift},
                {"large_shift", cfg.suite.large_shift},
                {"small_angle", cfg.suite.small_angle},
                {"large_angle", cfg.suite.large_angle},
                {"roll_angle", cfg.suite.roll_angle}};
  j["mutations"] = nlohmann::json::array();
  for (const auto& m : cfg.mutations) j["mutations"].push_back(mutation_to_json(m));
  j["epsilons"] = cfg.epsilons;
  j["suts"] = nlohmann::json::array();
  for (const auto& e : cfg.suts) j["suts"].push_back(sut_entry_to_json(e));
  j["test"] = {{"width", cfg.test.width},
               {"height", cfg.test.height},
               {"sut_failure_budget", cfg.test.sut_failure_budget}};
  nlohmann::json resolutions = nlohmann::json::array();
  for (const auto& [w, h] : cfg.bench.resolutions) resolutions.push_back({w, h});
  j["bench"] = {{"resolutions", resolutions}, {"frames", cfg.bench.frames}};
  if (!cfg.dataset_dir.empty()) j["dataset_dir"] = cfg.dataset_dir;
  if (!cfg.checkpoint.empty()) j["checkpoint"] = cfg.checkpoint;
  if (!cfg.report_dir.empty()) j["report_dir"] = cfg.report_dir;
  return j;
}

Config load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void apply_config_override(nlohmann::json& doc, const std::string& dotted_key,
                           const std::string& value) {
  nlohmann::json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string key = dotted_key.substr(start, dot - start);
    if (key.empty()) throw ConfigError("bad override key: " + dotted_key);
    if (dot == std::string::npos) {
      nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

// ---------------------------------------------------------------------------
// Shared command plumbing

namespace {

void write_config_echo(const fs::path& dir, const Config& cfg) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "config.json");
  if (!out) throw IoFailure("cannot write config echo: " + (dir / "config.json").string());
  out << config_to_json(cfg).dump(2) << "\n";
}

std::string resolution_label(int w, int h) {
  return std::to_string(w) + "x" + std::to_string(h);
}

}  // namespace

RadianceField init_field_for_scene(const SceneSpec& scene, const GridConfig& grid) {
  return RadianceField::init(grid.resolution, scene.scene_box().inflated(grid.inflate),
                             grid.sigma_init, grid.color_init, grid.background_init);
}

std::vector<std::unique_ptr<Sut>> build_suts(const std::vector<SutConfigEntry>& entries) {
  std::vector<std::unique_ptr<Sut>> suts;
  for (const auto& e : entries) {
    if (e.type == "ref_detect") {
      suts.push_back(std::make_unique<RefDetectSut>(e.name, e.max_points));
    } else if (e.type == "ref_classify") {
      if (e.classes.empty())
        throw ConfigError("ref_classify '" + e.name + "' needs a classes map");
      std::vector<Dataset> datasets;
      std::vector<LabeledImageSet> sets;
      for (const auto& [label, dir] : e.classes) datasets.push_back(load_dataset(dir));
      std::size_t di = 0;
      for (const auto& [label, dir] : e.classes) {
        LabeledImageSet set;
        set.label = label;
        const Dataset& ds = datasets[di++];
        for (int idx : ds.train_indices())
          set.images.push_back(&ds.frames[static_cast<std::size_t>(idx)].image);
        sets.push_back(std::move(set));
      }
      suts.push_back(std::make_unique<RefClassifySut>(e.name, train_hist_classifier(sets)));
    } else if (e.type == "external") {
      if (e.command.empty())
        throw ConfigError("external sut '" + e.name + "' needs a command");
      const SutTask task = e.task == "classify" ? SutTask::classify : SutTask::detect;
      suts.push_back(
          std::make_unique<ExternalSut>(e.name, task, e.command, e.timeout_s, e.max_points));
    } else {
      throw ConfigError("unknown sut type: " + e.type);
    }
  }
  return suts;
}

HeldoutQuality heldout_quality(const RadianceField& field, const Dataset& dataset,
                               const RenderConfig& render, std::uint64_t seed) {
  const auto eval = dataset.eval_indices();
  if (eval.empty()) throw InsufficientData("heldout_quality: no eval frames");
  double psnr_sum = 0, ssim_sum = 0;
  for (int idx : eval) {
    const auto& frame = dataset.frames[static_cast<std::size_t>(idx)];
    RenderConfig rc = render;
    rc.seed = seed_chain(seed, static_cast<std::uint64_t>(idx));
    const ImageBuffer img = render_image(field, dataset.intrinsics, frame.pose, rc);
    const double p = psnr(frame.image, img);
    psnr_sum += std::isinf(p) ? 100.0 : p;  // identical images cap the mean
    ssim_sum += ssim(frame.image, img);
  }
  return HeldoutQuality{psnr_sum / static_cast<double>(eval.size()),
                        ssim_sum / static_cast<double>(eval.size())};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_synth(const Config& cfg, std::ostream& log) {
  const fs::path dir = cfg.dataset_path();
  generate_dataset(cfg.scene, cfg.trajectory, cfg.intrinsics, dir);
  write_config_echo(dir, cfg);

  int eval = 0;
  for (int i = 0; i < cfg.trajectory.n_frames; ++i)
    if (is_eval_frame(i, 10)) ++eval;
  log << "dataset: " << dir.string() << "\n";
  log << "frames total/train/eval: " << cfg.trajectory.n_frames << "/"
      << (cfg.trajectory.n_frames - eval) << "/" << eval << "\n";
  return 0;
}

int cmd_fit(const Config& cfg, std::ostream& log) {
  const Dataset ds = load_dataset(cfg.dataset_path());
  const fs::path fit_dir = cfg.checkpoint_path().parent_path();
  write_config_echo(fit_dir, cfg);

  RadianceField field = init_field_for_scene(ds.scene, cfg.grid);

  RenderConfig eval_render = cfg.render;
  const std::uint64_t eval_seed = seed_chain(cfg.seed, "eval");
  const HeldoutQuality initial = heldout_quality(field, ds, eval_render, eval_seed);

  std::vector<TrainView> views;
  for (int idx : ds.train_indices())
    views.push_back(TrainView{&ds.frames[static_cast<std::size_t>(idx)].image,
                              ds.frames[static_cast<std::size_t>(idx)].pose});

  TrainConfig tcfg = cfg.train;
  tcfg.seed = seed_chain(cfg.seed, "fit");
  RenderConfig rcfg = cfg.render;

  const auto t0 = std::chrono::steady_clock::now();
  const FitResult result = fit(field, views, ds.intrinsics, tcfg, rcfg);
  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  save_field(cfg.checkpoint_path(), field);

  {
    std::ofstream out(fit_dir / "loss_history.csv");
    if (!out) throw IoFailure("cannot write loss history");
    out << "step,loss\n";
    for (std::size_t i = 0; i < result.loss_history.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%zu,%.9g\n", i, result.loss_history[i]);
      out << buf;
    }
  }

  const HeldoutQuality final_q = heldout_quality(field, ds, eval_render, eval_seed);
  nlohmann::json metrics = {{"initial_psnr", initial.mean_psnr},
                            {"initial_ssim", initial.mean_ssim},
                            {"final_psnr", final_q.mean_psnr},
                            {"final_ssim", final_q.mean_ssim},
                            {"steps", tcfg.steps},
                            {"train_time_s", wall_s}};
  std::ofstream mout(fit_dir / "fit_metrics.json");
  mout << metrics.dump(2) << "\n";

  log << "checkpoint: " << cfg.checkpoint_path().string() << "\n";
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "held-out psnr %.2f dB (initial %.2f dB), ssim %.3f, %.1fs\n",
                final_q.mean_psnr, initial.mean_psnr, final_q.mean_ssim, wall_s);
  log << buf;
  return 0;
}

int cmd_render(const Config& cfg, std::ostream& log) {
  const Dataset ds = load_dataset(cfg.dataset_path());
  const RadianceField field = load_field(cfg.checkpoint_path());
  const fs::path dir = cfg.out_dir / "render";
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_config_echo(dir, cfg);

  const CameraIntrinsics intr = ds.intrinsics.scaled_to(cfg.test.width, cfg.test.height);
  const std::uint64_t base = seed_chain(cfg.seed, "render");
  int count = 0;
  for (int idx : ds.eval_indices()) {
    const auto& frame = ds.frames[static_cast<std::size_t>(idx)];
    RenderConfig rc = cfg.render;
    rc.seed = seed_chain(base, static_cast<std::uint64_t>(idx));
    save_ppm(dir / (frame.id + ".ppm"), render_image(field, intr, frame.pose, rc));
    ++count;
  }
  log << "rendered " << count << " eval frames to " << dir.string() << "\n";
  return 0;
}

int cmd_transform(const Config& cfg, std::ostream& log) {
  const Dataset ds = load_dataset(cfg.dataset_path());
  const auto suite = build_suite(ds.sidecar, cfg.suite);
  const fs::path dir = cfg.out_dir / "transform";
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_config_echo(dir, cfg);

  for (const auto& tau : suite) {
    PoseFile out;
    out.intrinsics = ds.intrinsics;
    for (const auto& frame : ds.frames) {
      out.frames.push_back(PoseFileFrame{
          frame.id, apply_transform(frame.pose, tau, ds.sidecar.lookat), ""});
    }
    save_pose_file(dir / ("poses_" + to_string(tau.kind) + ".json"), out);
  }
  log << "wrote transformed pose files for " << suite.size() << " transforms to "
      << dir.string() << "\n";
  return 0;
}

int cmd_mutate(const Config& cfg, std::ostream& log) {
  const Dataset ds = load_dataset(cfg.dataset_path());
  const fs::path dir = cfg.out_dir / "mutate";
  write_config_echo(dir, cfg);

  const std::uint64_t base = seed_chain(cfg.seed, "mutate");
  for (std::size_t mi = 0; mi < cfg.mutations.size(); ++mi) {
    MutationSpec spec = cfg.mutations[mi];
    const fs::path mdir = dir / spec.id();
    std::error_code ec;
    fs::create_directories(mdir, ec);
    for (std::size_t fi = 0; fi < ds.frames.size(); ++fi) {
      spec.seed = seed_chain(seed_chain(base, static_cast<std::uint64_t>(fi)),
                             static_cast<std::uint64_t>(mi));
      save_ppm(mdir / (ds.frames[fi].id + ".ppm"), mutate(ds.frames[fi].image, spec));
    }
  }
  log << "wrote " << cfg.mutations.size() << " mutation sets to " << dir.string() << "\n";
  return 0;
}

int cmd_test(const Config& cfg, std::ostream& log) {
  if (cfg.suts.empty()) throw ConfigError("no SUTs configured");
  const Dataset ds = load_dataset(cfg.dataset_path());
  const RadianceField field = load_field(cfg.checkpoint_path());

  auto suts = build_suts(cfg.suts);
  std::vector<Sut*> sut_ptrs;
  for (auto& s : suts) sut_ptrs.push_back(s.get());

  const auto suite = build_suite(ds.sidecar, cfg.suite);

  CampaignConfig ccfg;
  ccfg.render = cfg.render;
  ccfg.epsilons = cfg.epsilons;
  ccfg.width = cfg.test.width;
  ccfg.height = cfg.test.height;
  ccfg.seed = seed_chain(cfg.seed, "test");

  const CampaignReport report =
      run_campaign(field, ds, sut_ptrs, suite, cfg.mutations, ccfg);

  const fs::path dir = cfg.report_path();
  write_report_files(dir, report);
  write_config_echo(dir, cfg);

  log << counts_text_table(report);
  log << "records: " << report.records.size() << " (" << report.failed_records
      << " failed)\n";
  log << "report: " << (dir / "report.json").string() << "\n";

  if (report.failed_records > cfg.test.sut_failure_budget) {
    log << "SUT failure budget exceeded (" << report.failed_records << " > "
        << cfg.test.sut_failure_budget << ")\n";
    return 3;
  }
  return 0;
}

int cmd_analyze(const Config& cfg, std::ostream& log) {
  const fs::path report_file = cfg.report_path() / "report.json";
  std::ifstream in(report_file);
  if (!in) throw IoFailure("cannot read report: " + report_file.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoFailure("malformed report: " + std::string(e.what()));
  }
  const CampaignReport report = report_from_json(doc);

  // Counts must be a pure aggregation of the records; recompute and verify.
  const auto recomputed = count_inconsistencies(report.records, report.epsilons);
  bool counts_match = recomputed.size() == report.counts.size();
  for (std::size_t i = 0; counts_match && i < recomputed.size(); ++i) {
    const auto& a = recomputed[i];
    const auto& b = report.counts[i];
    counts_match = a.sut == b.sut && a.arm == b.arm &&
                   a.tau_or_mutation == b.tau_or_mutation && a.metric == b.metric &&
                   a.epsilon == b.epsilon && a.count == b.count;
  }

  const auto correlations = correlation_table(report);

  log << counts_text_table(report);
  log << "counts recomputation: " << (counts_match ? "consistent" : "MISMATCH") << "\n";
  log << "correlations (domain shift, significance at p <= 0.05):\n";
  for (const auto& cell : correlations) {
    char buf[160];
    if (cell.flag.empty())
      std::snprintf(buf, sizeof(buf), "  %s/%s vs %s: rho=%+.3f p=%.4f%s n=%d\n",
                    cell.sut.c_str(), cell.sut_metric.c_str(), cell.image_metric.c_str(),
                    cell.rho, cell.p, cell.significant ? " *" : "", cell.n);
    else
      std::snprintf(buf, sizeof(buf), "  %s/%s vs %s: %s\n", cell.sut.c_str(),
                    cell.sut_metric.c_str(), cell.image_metric.c_str(), cell.flag.c_str());
    log << buf;
  }

  nlohmann::json analysis;
  analysis["counts_match"] = counts_match;
  analysis["correlations"] = report_to_json(report)["correlations"];
  std::ofstream out(cfg.report_path() / "analysis.json");
  if (out) out << analysis.dump(2) << "\n";

  return counts_match ? 0 : 2;
}

std::vector<BenchRow> run_bench(const RadianceField& field, const RenderConfig& render,
                                const std::vector<std::pair<int, int>>& resolutions,
                                int frames) {
  if (frames < 1) throw ConfigError("bench: frames must be >= 1");
  const Vec3 center = field.bounds.center();
  const double dist = std::max(1e-3, field.bounds.diagonal());

  std::vector<BenchRow> rows;
  for (const auto& [w, h] : resolutions) {
    CameraIntrinsics intr{0.9 * w, 0.9 * w, 0.5 * w, 0.5 * h, w, h};

    const auto t0 = std::chrono::steady_clock::now();
    for (int f = 0; f < frames; ++f) {
      // Small arc around the box so frames differ but stay comparable.
      const double a = 0.15 * std::sin(2.0 * M_PI * f / std::max(1, frames));
      const Vec3 eye = center + dist * Vec3{std::sin(a), -std::cos(a), 0.25};
      RenderConfig rc = render;
      rc.seed = seed_chain(render.seed, static_cast<std::uint64_t>(f));
      const ImageBuffer img =
          render_image(field, intr, CameraPose::look_at(eye, center), rc);
      (void)img;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(BenchRow{w, h, frames / std::max(1e-9, elapsed)});
  }
  return rows;
}

int cmd_bench(const Config& cfg, std::ostream& log) {
  const RadianceField field = load_field(cfg.checkpoint_path());
  const fs::path dir = cfg.out_dir / "bench";
  write_config_echo(dir, cfg);

  RenderConfig rc = cfg.render;
  rc.seed = seed_chain(cfg.seed, "bench");
  const auto rows = run_bench(field, rc, cfg.bench.resolutions, cfg.bench.frames);

  // Table 2 shape: resolutions as columns.
  std::ostringstream table;
  table << "Resolution";
  for (const auto& row : rows) table << "  " << resolution_label(row.width, row.height);
  table << "\nFPS       ";
  for (const auto& row : rows) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "  %*.2f",
                  static_cast<int>(resolution_label(row.width, row.height).size()),
                  row.fps);
    table << buf;
  }
  table << "\n";
  log << table.str();

  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& row : rows)
    jrows.push_back({{"width", row.width}, {"height", row.height}, {"fps", row.fps}});
  std::ofstream out(dir / "bench.json");
  if (!out) throw IoFailure("cannot write bench results");
  out << jrows.dump(2) << "\n";
  std::ofstream tout(dir / "bench.txt");
  tout << table.str();
  return 0;
}

}  // namespace n2r
