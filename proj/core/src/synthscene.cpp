// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/synthscene.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "n2r/parallel.hpp"
#include "n2r/rng.hpp"
#include "n2r/serde.hpp"

namespace n2r {

std::string to_string(SceneKind k) {
  return k == SceneKind::wall ? "wall" : "object";
}

SceneKind scene_kind_from_string(const std::string& s) {
  if (s == "wall") return SceneKind::wall;
  if (s == "object") return SceneKind::object;
  throw ConfigError("unknown scene kind: " + s);
}

std::string to_string(TrajectorySpec::Kind k) {
  return k == TrajectorySpec::Kind::wall_scan ? "wall_scan" : "orbit";
}

TrajectorySpec::Kind trajectory_kind_from_string(const std::string& s) {
  if (s == "wall_scan") return TrajectorySpec::Kind::wall_scan;
  if (s == "orbit") return TrajectorySpec::Kind::orbit;
  throw ConfigError("unknown trajectory kind: " + s);
}

SceneSpec SceneSpec::wall_default() {
  SceneSpec s;
  s.kind = SceneKind::wall;
  s.background = Vec3{0.04, 0.10, 0.14};  // deep water
  return s;
}

SceneSpec SceneSpec::object_default() {
  SceneSpec s;
  s.kind = SceneKind::object;
  s.light_dir = Vec3{0.35, 0.25, 0.9}.normalized();
  s.background = Vec3{0.55, 0.68, 0.85};  // sky
  return s;
}

void SceneSpec::validate() const {
  if (!(ambient >= 0.0 && ambient <= 1.0)) throw ConfigError("scene: ambient outside [0,1]");
  if (!(texture_scale > 0)) throw ConfigError("scene: texture_scale must be positive");
  if (kind == SceneKind::wall) {
    wall_plane.validate(1e-9);
    if (!(wall_half_width > 0) || !(wall_half_height > 0))
      throw ConfigError("scene: degenerate wall extent");
  } else {
    ground_plane.validate(1e-9);
    if (!(sphere_radius > 0) || object_box.degenerate() || !(ground_half_extent > 0))
      throw ConfigError("scene: degenerate object geometry");
  }
}

Box3 SceneSpec::scene_box() const {
  if (kind == SceneKind::wall) {
    // Thin slab around the wall plane (axis-aligned walls only are shipped).
    const double y = wall_plane.distance / wall_plane.normal.y();
    return Box3{Vec3{-wall_half_width, y - 0.08, wall_center_z - wall_half_height},
                Vec3{wall_half_width, y + 0.04, wall_center_z + wall_half_height}};
  }
  const double e = ground_half_extent;
  double top = std::max(sphere_center.z() + sphere_radius, object_box.max.z());
  return Box3{Vec3{-e, -e, 0.0}, Vec3{e, e, top + 0.05}};
}

Vec3 SceneSpec::default_lookat() const {
  if (kind == SceneKind::wall) {
    const double y = wall_plane.distance / wall_plane.normal.y();
    return Vec3{0.0, y, wall_center_z};
  }
  return Vec3{0.0, 0.0, 0.35};
}

std::optional<PlaneModel> SceneSpec::homography_plane() const {
  if (kind == SceneKind::wall) return wall_plane;
  return std::nullopt;
}

void TrajectorySpec::validate() const {
  if (n_frames < 2) throw ConfigError("trajectory: n_frames must be >= 2");
  if (amplitude < 0) throw ConfigError("trajectory: negative amplitude");
}

// ---------------------------------------------------------------------------
// Procedural texture

namespace {

std::uint64_t lattice_hash(std::uint64_t seed, std::int64_t ix, std::int64_t iy,
                           std::int64_t iz) {
  // Distinct odd multipliers per axis keep the lattice anisotropy-free.
  const std::uint64_t h = seed ^
                          (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ull) ^
                          (static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4Full) ^
                          (static_cast<std::uint64_t>(iz) * 0x165667B19E3779F9ull);
  return mix64(h);
}

double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::int64_t iz) {
  return static_cast<double>(lattice_hash(seed, ix, iy, iz) >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t seed, const Vec3& p) {
  const double fx = std::floor(p.x()), fy = std::floor(p.y()), fz = std::floor(p.z());
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const double tx = p.x() - fx, ty = p.y() - fy, tz = p.z() - fz;

  double accum = 0.0;
  for (int dz = 0; dz <= 1; ++dz)
    for (int dy = 0; dy <= 1; ++dy)
      for (int dx = 0; dx <= 1; ++dx) {
        const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty) * (dz ? tz : 1.0 - tz);
        accum += w * lattice_value(seed, ix + dx, iy + dy, iz + dz);
      }
  return accum;
}

Vec3 surface_tint(SurfaceId surface) {
  switch (surface) {
    case SurfaceId::wall: return Vec3{0.35, 0.85, 0.70};    // marine growth
    case SurfaceId::sphere: return Vec3{0.90, 0.35, 0.30};  // painted hull
    case SurfaceId::box: return Vec3{0.85, 0.75, 0.30};     // cargo
    case SurfaceId::ground: return Vec3{0.60, 0.55, 0.45};  // sand
  }
  return Vec3{1, 1, 1};
}

}  // namespace

double texture_value(const SceneSpec& spec, const Vec3& point) {
  const Vec3 p = point / spec.texture_scale;
  const auto cx = static_cast<std::int64_t>(std::floor(p.x()));
  const auto cy = static_cast<std::int64_t>(std::floor(p.y()));
  const auto cz = static_cast<std::int64_t>(std::floor(p.z()));
  const int checker = static_cast<int>(((cx + cy + cz) % 2 + 2) % 2);
  const double noise = value_noise(spec.seed, p);
  return 0.45 + 0.20 * checker + 0.35 * noise;
}

Vec3 texture_albedo(const SceneSpec& spec, SurfaceId surface, const Vec3& point) {
  return surface_tint(surface) * texture_value(spec, point);
}

// ---------------------------------------------------------------------------
// Ray tracing

namespace {

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 point{0, 0, 0};
  Vec3 normal{0, 0, 1};
  SurfaceId surface = SurfaceId::wall;
  bool valid() const { return std::isfinite(t); }
};

// Bounded rectangle on a plane; in-plane axes derived from world up.
bool hit_plane_rect(const Vec3& o, const Vec3& d, const PlaneModel& plane,
                    double half_u, double half_v, double center_v, Hit* hit) {
  const double denom = plane.normal.dot(d);
  if (std::abs(denom) < 1e-12) return false;
  const double t = (plane.distance - plane.normal.dot(o)) / denom;
  if (t < kTNearFloor || t >= hit->t) return false;
  const Vec3 p = o + t * d;

  Vec3 axis_u = kWorldUp.cross(plane.normal);
  if (axis_u.norm() < 1e-9) axis_u = Vec3{1, 0, 0};  // horizontal plane
  axis_u.normalize();
  const Vec3 axis_v = plane.normal.cross(axis_u);
  if (std::abs(p.dot(axis_u)) > half_u) return false;
  if (std::abs(p.dot(axis_v) - center_v) > half_v) return false;

  hit->t = t;
  hit->point = p;
  hit->normal = plane.normal;
  return true;
}

bool hit_sphere(const Vec3& o, const Vec3& d, const Vec3& center, double radius, Hit* hit) {
  const Vec3 oc = o - center;
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0) return false;
  const double s = std::sqrt(disc);
  double t = -b - s;
  if (t < kTNearFloor) t = -b + s;
  if (t < kTNearFloor || t >= hit->t) return false;
  hit->t = t;
  hit->point = o + t * d;
  hit->normal = (hit->point - center) / radius;
  return true;
}

bool hit_box(const Vec3& o, const Vec3& d, const Box3& box, Hit* hit) {
  const auto span = intersect_box(o, d, box);
  if (!span) return false;
  const double t = span->first;
  if (t <= kTNearFloor || t >= hit->t) return false;
  const Vec3 p = o + t * d;

  // Face normal: the axis on which the hit point touches a box face.
  Vec3 n{0, 0, 0};
  double best = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const double to_min = std::abs(p[axis] - box.min[axis]);
    const double to_max = std::abs(p[axis] - box.max[axis]);
    if (to_min < best) {
      best = to_min;
      n = Vec3::Zero();
      n[axis] = -1;
    }
    if (to_max < best) {
      best = to_max;
      n = Vec3::Zero();
      n[axis] = 1;
    }
  }
  hit->t = t;
  hit->point = p;
  hit->normal = n;
  hit->surface = SurfaceId::box;
  return true;
}

Hit trace_scene(const SceneSpec& spec, const Vec3& o, const Vec3& d) {
  Hit hit;
  if (spec.kind == SceneKind::wall) {
    if (hit_plane_rect(o, d, spec.wall_plane, spec.wall_half_width, spec.wall_half_height,
                       spec.wall_center_z, &hit))
      hit.surface = SurfaceId::wall;
  } else {
    if (hit_sphere(o, d, spec.sphere_center, spec.sphere_radius, &hit))
      hit.surface = SurfaceId::sphere;
    hit_box(o, d, spec.object_box, &hit);
    if (hit_plane_rect(o, d, spec.ground_plane, spec.ground_half_extent,
                       spec.ground_half_extent, 0.0, &hit))
      hit.surface = SurfaceId::ground;
  }
  return hit;
}

}  // namespace

ImageBuffer raytrace(const SceneSpec& spec, const CameraIntrinsics& intr,
                     const CameraPose& pose) {
  spec.validate();
  intr.validate();
  ImageBuffer img;
  img.width = intr.width;
  img.height = intr.height;
  img.provenance = Provenance::real;
  img.pixels.resize(static_cast<std::size_t>(intr.width) * intr.height * 3);

  parallel_for(0, intr.height, [&](std::int64_t y) {
    for (int x = 0; x < intr.width; ++x) {
      const Vec3 dir_cam{(x + 0.5 - intr.cx) / intr.fx, (y + 0.5 - intr.cy) / intr.fy, 1.0};
      const Vec3 dir = (pose.rotation * dir_cam).normalized();
      const Hit hit = trace_scene(spec, pose.position, dir);

      Vec3 color = spec.background;
      if (hit.valid()) {
        Vec3 n = hit.normal;
        if (n.dot(dir) > 0) n = -n;  // shade the side facing the viewer
        const double lambert = std::max(0.0, n.dot(spec.light_dir));
        const double shade = spec.ambient + (1.0 - spec.ambient) * lambert;
        color = texture_albedo(spec, hit.surface, hit.point) * shade;
      }
      float* px = img.at(x, static_cast<int>(y));
      px[0] = static_cast<float>(std::clamp(color.x(), 0.0, 1.0));
      px[1] = static_cast<float>(std::clamp(color.y(), 0.0, 1.0));
      px[2] = static_cast<float>(std::clamp(color.z(), 0.0, 1.0));
    }
  });
  return img;
}

std::vector<CameraPose> make_trajectory(const SceneSpec& spec, const TrajectorySpec& traj) {
  spec.validate();
  traj.validate();
  std::vector<CameraPose> poses;
  poses.reserve(static_cast<std::size_t>(traj.n_frames));

  for (int i = 0; i < traj.n_frames; ++i) {
    Vec3 eye;
    if (traj.kind == TrajectorySpec::Kind::wall_scan) {
      const double s = -1.0 + 2.0 * i / (traj.n_frames - 1);
      // Lateral sweep with small depth/height wobble for parallax.
      eye = Vec3{traj.amplitude * s, 0.15 * traj.amplitude * std::sin(M_PI * s),
                 traj.height + 0.2 * traj.amplitude * std::sin(2.0 * M_PI * s)};
    } else {
      const double theta = 2.0 * M_PI * i / traj.n_frames;
      eye = Vec3{traj.amplitude * std::cos(theta), traj.amplitude * std::sin(theta),
                 traj.height};
    }
    poses.push_back(CameraPose::look_at(eye, traj.lookat));
  }
  return poses;
}

// ---------------------------------------------------------------------------
// Dataset persistence

using nlohmann::json;

bool is_eval_frame(int index, int eval_every) {
  if (eval_every <= 0) return false;
  return index % eval_every == 1 % eval_every;
}

std::vector<int> Dataset::train_indices() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(frames.size()); ++i)
    if (!frames[static_cast<std::size_t>(i)].eval) out.push_back(i);
  return out;
}

std::vector<int> Dataset::eval_indices() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(frames.size()); ++i)
    if (frames[static_cast<std::size_t>(i)].eval) out.push_back(i);
  return out;
}

namespace {

std::string frame_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d", i);
  return buf;
}

}  // namespace

void generate_dataset(const SceneSpec& spec, const TrajectorySpec& traj,
                      const CameraIntrinsics& intr, const std::filesystem::path& dir) {
  spec.validate();
  traj.validate();
  intr.validate();

  std::error_code ec;
  std::filesystem::create_directories(dir / "images", ec);
  if (ec || !std::filesystem::is_directory(dir / "images"))
    throw IoFailure("cannot create dataset directory: " + dir.string());

  const auto poses = make_trajectory(spec, traj);
  PoseFile pose_file;
  pose_file.intrinsics = intr;

  for (int i = 0; i < static_cast<int>(poses.size()); ++i) {
    const std::string name = frame_name(i);
    const std::string rel = "images/" + name + ".ppm";
    save_ppm(dir / rel, raytrace(spec, intr, poses[static_cast<std::size_t>(i)]));
    pose_file.frames.push_back({name, poses[static_cast<std::size_t>(i)], rel});
  }
  save_pose_file(dir / "poses.json", pose_file);

  json sidecar;
  if (auto plane = spec.homography_plane())
    sidecar["plane"] = *plane;
  else
    sidecar["plane"] = nullptr;
  sidecar["lookat"] = traj.lookat;
  sidecar["diameter"] = spec.scene_box().diagonal();
  sidecar["split"] = {{"eval_every", 10}};
  sidecar["scene"] = spec;

  std::ofstream out(dir / "scene.json");
  if (!out) throw IoFailure("cannot write sidecar: " + (dir / "scene.json").string());
  out << sidecar.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
  Dataset ds;
  ds.dir = dir;

  const PoseFile poses = load_pose_file(dir / "poses.json");
  ds.intrinsics = poses.intrinsics;

  std::ifstream in(dir / "scene.json");
  if (!in) throw IoFailure("cannot read sidecar: " + (dir / "scene.json").string());
  json sidecar;
  try {
    in >> sidecar;
  } catch (const json::exception& e) {
    throw IoFailure("malformed sidecar: " + std::string(e.what()));
  }

  if (sidecar.contains("plane") && !sidecar.at("plane").is_null())
    ds.sidecar.plane = sidecar.at("plane").get<PlaneModel>();
  ds.sidecar.lookat = sidecar.at("lookat").get<Vec3>();
  ds.sidecar.diameter = sidecar.at("diameter").get<double>();
  ds.sidecar.eval_every = sidecar.at("split").at("eval_every").get<int>();
  ds.scene = sidecar.at("scene").get<SceneSpec>();

  for (int i = 0; i < static_cast<int>(poses.frames.size()); ++i) {
    const auto& f = poses.frames[static_cast<std::size_t>(i)];
    DatasetFrame frame;
    frame.id = f.id;
    frame.pose = f.pose;
    frame.image = load_ppm(dir / f.image, Provenance::real);
    frame.eval = is_eval_frame(i, ds.sidecar.eval_every);
    ds.frames.push_back(std::move(frame));
  }
  return ds;
}

}  // namespace n2r
