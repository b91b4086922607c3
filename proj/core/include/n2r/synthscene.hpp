// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "n2r/geometry.hpp"
#include "n2r/image.hpp"

namespace n2r {

enum class SceneKind { wall, object };

std::string to_string(SceneKind k);
SceneKind scene_kind_from_string(const std::string& s);

// Procedural ground-truth scene standing in for real camera footage.
// Two families: a textured vertical wall scanned sideways (inspection of
// planar structures) and a small object on a finite ground patch circled
// from above (vehicle inspection).
struct SceneSpec {
  SceneKind kind = SceneKind::wall;
  std::uint64_t seed = 7;
  double texture_scale = 0.45;  // world units per texture cell
  Vec3 light_dir = Vec3{0.25, -0.55, 0.8}.normalized();  // toward the light
  double ambient = 0.35;

  // wall geometry
  PlaneModel wall_plane{Vec3{0, 1, 0}, 2.0};
  double wall_half_width = 3.0;   // extent along x
  double wall_half_height = 1.6;  // extent along z, centered at wall_center_z
  double wall_center_z = 0.0;

  // object geometry: a sphere and a box resting on a finite ground patch
  Vec3 sphere_center{0.45, 0.0, 0.5};
  double sphere_radius = 0.5;
  Box3 object_box{Vec3{-1.15, -0.4, 0.0}, Vec3{-0.25, 0.4, 0.55}};
  PlaneModel ground_plane{Vec3{0, 0, 1}, 0.0};
  double ground_half_extent = 2.2;

  Vec3 background{0.04, 0.10, 0.14};  // rays that miss all geometry

  static SceneSpec wall_default();
  static SceneSpec object_default();

  void validate() const;
  Box3 scene_box() const;
  Vec3 default_lookat() const;
  // The plane used for repeatability homographies; absent for scenes
  // without a dominant planar structure.
  std::optional<PlaneModel> homography_plane() const;
};

struct TrajectorySpec {
  enum class Kind { wall_scan, orbit };
  Kind kind = Kind::wall_scan;
  int n_frames = 300;
  double amplitude = 1.2;  // sweep half-width (wall_scan) or orbit radius
  double height = 0.0;     // camera height offset (z for orbit, z for wall scan)
  Vec3 lookat{0.0, 2.0, 0.0};

  void validate() const;
};

std::string to_string(TrajectorySpec::Kind k);
TrajectorySpec::Kind trajectory_kind_from_string(const std::string& s);

enum class SurfaceId { wall, sphere, box, ground };

// Scalar texture factor in (0, 1]: 0.45 + 0.2 * checker + 0.35 * noise,
// where both the checker parity and the value-noise lattice are driven by
// one splitmix64 hash of the integer texture cell, so every platform
// produces the same texture for a given seed and texture_scale.
double texture_value(const SceneSpec& spec, const Vec3& point);

// Albedo at a world point on the given surface, before shading.
Vec3 texture_albedo(const SceneSpec& spec, SurfaceId surface, const Vec3& point);

// One ray per pixel center, Lambertian shading:
//   pixel = albedo * (ambient + (1 - ambient) * max(0, n . light_dir))
ImageBuffer raytrace(const SceneSpec& spec, const CameraIntrinsics& intr,
                     const CameraPose& pose);

std::vector<CameraPose> make_trajectory(const SceneSpec& spec, const TrajectorySpec& traj);

// ---------------------------------------------------------------------------
// Posed datasets on disk: images/ (PPM), poses.json, scene.json sidecar.

struct SceneSidecar {
  std::optional<PlaneModel> plane;
  Vec3 lookat{0, 0, 0};
  double diameter = 0;
  int eval_every = 10;
};

// Frames with index % eval_every == 1 % eval_every are held out, so a
// 300-frame dataset splits 270 train / 30 eval (and a 301-frame one
// 271/30, the usual ~90/10 capture split).
bool is_eval_frame(int index, int eval_every);

struct DatasetFrame {
  std::string id;
  CameraPose pose;
  ImageBuffer image;
  bool eval = false;
};

struct Dataset {
  std::filesystem::path dir;
  CameraIntrinsics intrinsics;
  std::vector<DatasetFrame> frames;
  SceneSidecar sidecar;
  SceneSpec scene;

  std::vector<int> train_indices() const;
  std::vector<int> eval_indices() const;
};

void generate_dataset(const SceneSpec& spec, const TrajectorySpec& traj,
                      const CameraIntrinsics& intr, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace n2r
