// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "n2r/error.hpp"

namespace n2r {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// World frame is right-handed with +z up. Camera frame is +z forward
// (viewing direction), +x right, +y down; this is the convention of most
// pinhole pose-estimation exports and is used everywhere in the toolkit.
inline const Vec3 kWorldUp{0.0, 0.0, 1.0};

// Rays never start closer than this to the sensor, to avoid
// self-intersection at t = 0.
inline constexpr double kTNearFloor = 1e-4;

struct Box3 {
  Vec3 min{0, 0, 0};
  Vec3 max{0, 0, 0};

  bool degenerate() const {
    return !(min.x() < max.x() && min.y() < max.y() && min.z() < max.z());
  }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double diagonal() const { return extent().norm(); }
  bool contains(const Vec3& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
           p.y() <= max.y() && p.z() >= min.z() && p.z() <= max.z();
  }
  // Grown by the given fraction of the extent on every side.
  Box3 inflated(double frac) const {
    const Vec3 pad = frac * extent();
    return Box3{min - pad, max + pad};
  }
};

struct CameraIntrinsics {
  double fx = 0, fy = 0;  // focal lengths, pixels
  double cx = 0, cy = 0;  // principal point, pixels
  int width = 0, height = 0;

  void validate() const;
  Mat3 matrix() const;  // pinhole K

  // Same field of view at a different pixel resolution.
  CameraIntrinsics scaled_to(int new_width, int new_height) const;
};

struct CameraPose {
  Vec3 position{0, 0, 0};       // the camera center in world units
  Mat3 rotation = Mat3::Identity();  // world-from-camera

  void validate(double tol = 1e-9) const;

  Vec3 right() const { return rotation.col(0); }
  Vec3 down() const { return rotation.col(1); }
  Vec3 forward() const { return rotation.col(2); }

  Mat4 world_from_camera() const;
  static CameraPose from_world_from_camera(const Mat4& m);

  // Pose whose +z axis points from eye to target; the camera "up"
  // follows world up projected onto the image plane. Throws DegenerateAim
  // when eye coincides with target.
  static CameraPose look_at(const Vec3& eye, const Vec3& target,
                            const Vec3& world_up = kWorldUp);
};

// Projects a world point into pixel coordinates. Returns nullopt for
// points at or behind the camera plane.
std::optional<Eigen::Vector2d> project_point(const CameraIntrinsics& intr,
                                             const CameraPose& pose,
                                             const Vec3& point);

struct Ray {
  Vec3 origin{0, 0, 0};
  Vec3 direction{0, 0, 1};  // unit
  double t_near = 0;
  double t_far = 0;

  Vec3 at(double t) const { return origin + t * direction; }
};

enum class TauKind { tau0, tau1, tau2, tau3, tau4, tau5, tau6 };

std::string to_string(TauKind k);

// A camera-local pose perturbation: translate in the camera's own axes,
// optionally re-aim at a fixed look-at target, then apply intrinsic
// yaw -> pitch -> roll.
struct PoseTransform {
  TauKind kind = TauKind::tau0;
  double dx = 0, dy = 0, dz = 0;        // world units, camera axes
  double droll = 0, dpitch = 0, dyaw = 0;  // radians
  bool reaim = false;

  static PoseTransform identity() { return PoseTransform{}; }
  bool is_identity() const;
  void validate() const;
};

struct PlaneModel {
  Vec3 normal{0, 0, 1};  // unit
  double distance = 0;   // normal . p = distance for points p on the plane

  void validate(double tol = 1e-9) const;
  // Signed offset distance - normal.p; positive when p lies on the side
  // the normal points away from. Scene planes are oriented so this is
  // positive at the cameras.
  double offset_of(const Vec3& p) const { return distance - normal.dot(p); }
};

// Ray through the center of the given (continuous) pixel coordinate,
// clipped to the axis-aligned bounds. Returns nullopt when the ray misses
// the bounds entirely (the caller composites pure background).
std::optional<Ray> pixel_ray(const CameraIntrinsics& intr, const CameraPose& pose,
                             double px, double py, const Box3& bounds);

// Slab intersection of an origin + unit direction with a box; result
// clipped to t >= kTNearFloor.
std::optional<std::pair<double, double>> intersect_box(const Vec3& origin,
                                                       const Vec3& direction,
                                                       const Box3& bounds);

// Applies tau: local-axis translation, then re-aim at lookat (when
// requested), then intrinsic yaw -> pitch -> roll.
CameraPose apply_transform(const CameraPose& pose, const PoseTransform& tau,
                           const Vec3& lookat);

// Plane-induced homography H with pixels_B ~ H * pixels_A, exact for world
// points on the plane. Normalized so H(2,2) = 1. Throws PlaneBehindCamera
// when the plane offset in either camera frame is <= 0.
Mat3 plane_homography(const CameraIntrinsics& intr, const CameraPose& pose_a,
                      const CameraPose& pose_b, const PlaneModel& plane);

// ---------------------------------------------------------------------------
// Pose file: {"intrinsics": {...}, "frames": [{"id", "world_from_camera",
// "image"}]} with 16 row-major matrix entries, world-from-camera.

struct PoseFileFrame {
  std::string id;
  CameraPose pose;
  std::string image;  // path relative to the pose file
};

struct PoseFile {
  CameraIntrinsics intrinsics;
  std::vector<PoseFileFrame> frames;
};

void save_pose_file(const std::filesystem::path& path, const PoseFile& poses);
PoseFile load_pose_file(const std::filesystem::path& path);

}  // namespace n2r
