// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// nlohmann ADL serializers for the small value types that appear in config
// files, pose files and dataset sidecars.

#include "json.hpp"
#include "n2r/geometry.hpp"
#include "n2r/synthscene.hpp"

// Eigen types live outside namespace n2r, so they need adl_serializer
// specializations rather than free to_json/from_json functions.
namespace nlohmann {

template <>
struct adl_serializer<Eigen::Vector3d> {
  static void to_json(json& j, const Eigen::Vector3d& v) { j = {v.x(), v.y(), v.z()}; }
  static void from_json(const json& j, Eigen::Vector3d& v) {
    if (!j.is_array() || j.size() != 3) throw n2r::ConfigError("expected a 3-vector");
    v = Eigen::Vector3d{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  }
};

}  // namespace nlohmann

namespace n2r {

inline void to_json(nlohmann::json& j, const Box3& b) {
  j = {{"min", b.min}, {"max", b.max}};
}
inline void from_json(const nlohmann::json& j, Box3& b) {
  b.min = j.at("min").get<Vec3>();
  b.max = j.at("max").get<Vec3>();
}

inline void to_json(nlohmann::json& j, const PlaneModel& p) {
  j = {{"normal", p.normal}, {"distance", p.distance}};
}
inline void from_json(const nlohmann::json& j, PlaneModel& p) {
  p.normal = j.at("normal").get<Vec3>();
  p.distance = j.at("distance").get<double>();
}

inline void to_json(nlohmann::json& j, const CameraIntrinsics& i) {
  j = {{"fx", i.fx}, {"fy", i.fy}, {"cx", i.cx},
       {"cy", i.cy}, {"width", i.width}, {"height", i.height}};
}
inline void from_json(const nlohmann::json& j, CameraIntrinsics& i) {
  i.fx = j.at("fx").get<double>();
  i.fy = j.at("fy").get<double>();
  i.cx = j.at("cx").get<double>();
  i.cy = j.at("cy").get<double>();
  i.width = j.at("width").get<int>();
  i.height = j.at("height").get<int>();
}

inline void to_json(nlohmann::json& j, const SceneSpec& s) {
  j = {{"kind", to_string(s.kind)},
       {"seed", s.seed},
       {"texture_scale", s.texture_scale},
       {"light_dir", s.light_dir},
       {"ambient", s.ambient},
       {"wall_plane", s.wall_plane},
       {"wall_half_width", s.wall_half_width},
       {"wall_half_height", s.wall_half_height},
       {"wall_center_z", s.wall_center_z},
       {"sphere_center", s.sphere_center},
       {"sphere_radius", s.sphere_radius},
       {"object_box", s.object_box},
       {"ground_plane", s.ground_plane},
       {"ground_half_extent", s.ground_half_extent},
       {"background", s.background}};
}
inline void from_json(const nlohmann::json& j, SceneSpec& s) {
  s.kind = scene_kind_from_string(j.at("kind").get<std::string>());
  s = (s.kind == SceneKind::wall) ? SceneSpec::wall_default() : SceneSpec::object_default();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("texture_scale")) s.texture_scale = j.at("texture_scale").get<double>();
  if (j.contains("light_dir")) s.light_dir = j.at("light_dir").get<Vec3>().normalized();
  if (j.contains("ambient")) s.ambient = j.at("ambient").get<double>();
  if (j.contains("wall_plane")) s.wall_plane = j.at("wall_plane").get<PlaneModel>();
  if (j.contains("wall_half_width")) s.wall_half_width = j.at("wall_half_width").get<double>();
  if (j.contains("wall_half_height")) s.wall_half_height = j.at("wall_half_height").get<double>();
  if (j.contains("wall_center_z")) s.wall_center_z = j.at("wall_center_z").get<double>();
  if (j.contains("sphere_center")) s.sphere_center = j.at("sphere_center").get<Vec3>();
  if (j.contains("sphere_radius")) s.sphere_radius = j.at("sphere_radius").get<double>();
  if (j.contains("object_box")) s.object_box = j.at("object_box").get<Box3>();
  if (j.contains("ground_plane")) s.ground_plane = j.at("ground_plane").get<PlaneModel>();
  if (j.contains("ground_half_extent"))
    s.ground_half_extent = j.at("ground_half_extent").get<double>();
  if (j.contains("background")) s.background = j.at("background").get<Vec3>();
}

inline void to_json(nlohmann::json& j, const TrajectorySpec& t) {
  j = {{"kind", to_string(t.kind)},
       {"n_frames", t.n_frames},
       {"amplitude", t.amplitude},
       {"height", t.height},
       {"lookat", t.lookat}};
}
inline void from_json(const nlohmann::json& j, TrajectorySpec& t) {
  if (j.contains("kind")) t.kind = trajectory_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("n_frames")) t.n_frames = j.at("n_frames").get<int>();
  if (j.contains("amplitude")) t.amplitude = j.at("amplitude").get<double>();
  if (j.contains("height")) t.height = j.at("height").get<double>();
  if (j.contains("lookat")) t.lookat = j.at("lookat").get<Vec3>();
}

}  // namespace n2r
