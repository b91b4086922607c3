// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "n2r/mt.hpp"

namespace n2r {

struct GridConfig {
  Eigen::Vector3i resolution{64, 64, 64};
  double inflate = 0.05;  // bounds = scene box grown by this fraction
  float sigma_init = 1.0f;
  float color_init = 0.5f;
  Vec3 background_init{0.05, 0.05, 0.05};
};

struct SutConfigEntry {
  std::string type;  // "ref_detect" | "ref_classify" | "external"
  std::string name;
  int max_points = 100;
  std::map<std::string, std::string> classes;  // ref_classify: label -> dataset dir
  std::string command;                         // external
  std::string task = "detect";                 // external
  double timeout_s = 30.0;                     // external
};

struct TestConfig {
  int width = 480;
  int height = 270;
  int sut_failure_budget = 0;  // failed records beyond this exit with code 3
};

struct BenchConfig {
  std::vector<std::pair<int, int>> resolutions{{480, 270}, {960, 540}, {1920, 1080}};
  int frames = 10;
};

// The single configuration document. Every field can be overridden on the
// command line with --dotted.path=value; the effective config is echoed
// into each command's output directory. All randomness fans out from
// `seed` via per-stage salts: stage_seed = mix64(seed ^ mix64(fnv1a(stage))).
struct Config {
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";

  SceneSpec scene = SceneSpec::wall_default();
  TrajectorySpec trajectory;  // defaults derived from the scene kind
  CameraIntrinsics intrinsics{115.2, 115.2, 64.0, 36.0, 128, 72};
  TrainConfig train;
  RenderConfig render;
  GridConfig grid;
  TransformSuite suite;
  std::vector<MutationSpec> mutations;
  std::vector<double> epsilons{0.1, 0.2, 0.5};
  std::vector<SutConfigEntry> suts;
  TestConfig test;
  BenchConfig bench;

  // Empty entries derive from out_dir.
  std::string dataset_dir;
  std::string checkpoint;
  std::string report_dir;

  std::filesystem::path dataset_path() const;
  std::filesystem::path checkpoint_path() const;
  std::filesystem::path report_path() const;

  void validate() const;
};

TrajectorySpec default_trajectory_for(const SceneSpec& scene);
std::vector<MutationSpec> default_mutations();

Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& cfg);
Config load_config_file(const std::filesystem::path& path);

// Applies one --key=value override onto the raw JSON document. The value
// is parsed as JSON when possible and treated as a string otherwise.
void apply_config_override(nlohmann::json& doc, const std::string& dotted_key,
                           const std::string& value);

// ---------------------------------------------------------------------------
// Command implementations behind the CLI. Each writes its outputs plus a
// config.json echo under the relevant directory and returns a process exit
// code (0 ok, 3 when cmd_test exceeds the SUT failure budget); errors are
// reported by throwing.

int cmd_synth(const Config& cfg, std::ostream& log);
int cmd_fit(const Config& cfg, std::ostream& log);
int cmd_render(const Config& cfg, std::ostream& log);
int cmd_transform(const Config& cfg, std::ostream& log);
int cmd_mutate(const Config& cfg, std::ostream& log);
int cmd_test(const Config& cfg, std::ostream& log);
int cmd_analyze(const Config& cfg, std::ostream& log);
int cmd_bench(const Config& cfg, std::ostream& log);

// Field initialization used by cmd_fit: grid over the scene box inflated
// by grid.inflate.
RadianceField init_field_for_scene(const SceneSpec& scene, const GridConfig& grid);

// Builds the SUT instances described by the registry. The returned
// pointers stay valid as long as the returned vector lives.
std::vector<std::unique_ptr<Sut>> build_suts(const std::vector<SutConfigEntry>& entries);

struct BenchRow {
  int width = 0;
  int height = 0;
  double fps = 0;
};

// Renders `frames` views per resolution from a fixed camera arc around
// the field and reports the mean frame rate.
std::vector<BenchRow> run_bench(const RadianceField& field, const RenderConfig& render,
                                const std::vector<std::pair<int, int>>& resolutions,
                                int frames);

// Mean held-out image quality of a field against the dataset's eval
// frames at dataset resolution.
struct HeldoutQuality {
  double mean_psnr = 0;
  double mean_ssim = 0;
};
HeldoutQuality heldout_quality(const RadianceField& field, const Dataset& dataset,
                               const RenderConfig& render, std::uint64_t seed);

}  // namespace n2r
