// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/geometry.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace n2r {

void CameraIntrinsics::validate() const {
  if (!(fx > 0) || !(fy > 0)) throw InvalidPose("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidPose("intrinsics: image size must be positive");
  if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height))
    throw InvalidPose("intrinsics: principal point outside the image");
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k = Mat3::Identity();
  k(0, 0) = fx;
  k(1, 1) = fy;
  k(0, 2) = cx;
  k(1, 2) = cy;
  return k;
}

CameraIntrinsics CameraIntrinsics::scaled_to(int new_width, int new_height) const {
  const double sx = static_cast<double>(new_width) / width;
  const double sy = static_cast<double>(new_height) / height;
  return CameraIntrinsics{fx * sx, fy * sy, cx * sx, cy * sy, new_width, new_height};
}

void CameraPose::validate(double tol) const {
  const Mat3 rtr = rotation.transpose() * rotation;
  if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > tol)
    throw InvalidPose("pose: rotation is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > tol)
    throw InvalidPose("pose: rotation determinant != +1");
}

Mat4 CameraPose::world_from_camera() const {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = rotation;
  m.block<3, 1>(0, 3) = position;
  return m;
}

CameraPose CameraPose::from_world_from_camera(const Mat4& m) {
  CameraPose pose;
  pose.rotation = m.block<3, 3>(0, 0);
  pose.position = m.block<3, 1>(0, 3);
  return pose;
}

CameraPose CameraPose::look_at(const Vec3& eye, const Vec3& target, const Vec3& world_up) {
  const Vec3 to_target = target - eye;
  if (to_target.norm() < 1e-9) throw DegenerateAim("look_at: eye coincides with target");
  const Vec3 fwd = to_target.normalized();

  // Camera "down" is world up projected onto the image plane, negated.
  Vec3 down = -(world_up - world_up.dot(fwd) * fwd);
  if (down.norm() < 1e-9) {
    // Looking straight along world up; fall back to a fixed horizontal axis.
    const Vec3 alt{1.0, 0.0, 0.0};
    down = -(alt - alt.dot(fwd) * fwd);
  }
  down.normalize();

  CameraPose pose;
  pose.position = eye;
  pose.rotation.col(0) = down.cross(fwd);  // right
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = fwd;
  return pose;
}

std::optional<Eigen::Vector2d> project_point(const CameraIntrinsics& intr,
                                             const CameraPose& pose, const Vec3& point) {
  const Vec3 cam = pose.rotation.transpose() * (point - pose.position);
  if (cam.z() <= 1e-12) return std::nullopt;
  return Eigen::Vector2d{intr.cx + intr.fx * cam.x() / cam.z(),
                         intr.cy + intr.fy * cam.y() / cam.z()};
}

std::string to_string(TauKind k) {
  switch (k) {
    case TauKind::tau0: return "tau0";
    case TauKind::tau1: return "tau1";
    case TauKind::tau2: return "tau2";
    case TauKind::tau3: return "tau3";
    case TauKind::tau4: return "tau4";
    case TauKind::tau5: return "tau5";
    case TauKind::tau6: return "tau6";
  }
  return "tau?";
}

bool PoseTransform::is_identity() const {
  return dx == 0 && dy == 0 && dz == 0 && droll == 0 && dpitch == 0 && dyaw == 0 && !reaim;
}

void PoseTransform::validate() const {
  if (kind == TauKind::tau0 && !is_identity())
    throw InvalidPose("tau0 must be the identity transform");
}

void PlaneModel::validate(double tol) const {
  if (std::abs(normal.norm() - 1.0) > tol) throw InvalidPose("plane: normal is not unit length");
}

std::optional<std::pair<double, double>> intersect_box(const Vec3& origin,
                                                       const Vec3& direction,
                                                       const Box3& bounds) {
  double t0 = kTNearFloor;
  double t1 = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const double o = origin[axis];
    const double d = direction[axis];
    const double lo = bounds.min[axis];
    const double hi = bounds.max[axis];
    if (std::abs(d) < 1e-15) {
      if (o < lo || o > hi) return std::nullopt;
      continue;
    }
    double ta = (lo - o) / d;
    double tb = (hi - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

std::optional<Ray> pixel_ray(const CameraIntrinsics& intr, const CameraPose& pose,
                             double px, double py, const Box3& bounds) {
  if (bounds.degenerate()) throw InvalidPose("pixel_ray: degenerate bounds");
  const Vec3 dir_cam{(px - intr.cx) / intr.fx, (py - intr.cy) / intr.fy, 1.0};
  const Vec3 dir = (pose.rotation * dir_cam).normalized();
  const auto span = intersect_box(pose.position, dir, bounds);
  if (!span) return std::nullopt;
  return Ray{pose.position, dir, span->first, span->second};
}

namespace {

Mat3 rot_x(double a) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return m;
}
Mat3 rot_y(double a) {
  Mat3 m;
  m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return m;
}
Mat3 rot_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return m;
}

}  // namespace

CameraPose apply_transform(const CameraPose& pose, const PoseTransform& tau,
                           const Vec3& lookat) {
  if (tau.is_identity()) return pose;

  CameraPose out = pose;
  out.position = pose.position + pose.rotation * Vec3{tau.dx, tau.dy, tau.dz};

  if (tau.reaim) {
    if ((out.position - lookat).norm() < 1e-9)
      throw DegenerateAim("apply_transform: camera placed on the look-at target");
    out.rotation = CameraPose::look_at(out.position, lookat).rotation;
  }

  // Intrinsic rotations about the camera's own axes: yaw about +y (down),
  // then pitch about +x (right), then roll about +z (forward).
  if (tau.dyaw != 0) out.rotation = out.rotation * rot_y(tau.dyaw);
  if (tau.dpitch != 0) out.rotation = out.rotation * rot_x(tau.dpitch);
  if (tau.droll != 0) out.rotation = out.rotation * rot_z(tau.droll);
  return out;
}

Mat3 plane_homography(const CameraIntrinsics& intr, const CameraPose& pose_a,
                      const CameraPose& pose_b, const PlaneModel& plane) {
  const double offset_a = plane.offset_of(pose_a.position);
  if (offset_a <= 0) throw PlaneBehindCamera("plane_homography: plane behind camera A");
  if (plane.offset_of(pose_b.position) <= 0)
    throw PlaneBehindCamera("plane_homography: plane behind camera B");

  // Rigid camera-B-from-camera-A and the plane expressed in A's frame.
  const Mat3 r_ba = pose_b.rotation.transpose() * pose_a.rotation;
  const Vec3 t_ba = pose_b.rotation.transpose() * (pose_a.position - pose_b.position);
  const Vec3 n_a = pose_a.rotation.transpose() * plane.normal;

  const Mat3 k = intr.matrix();
  Mat3 h = k * (r_ba + (t_ba * n_a.transpose()) / offset_a) * k.inverse();
  if (std::abs(h(2, 2)) < 1e-15)
    throw SingularHomography("plane_homography: degenerate normalization");
  h /= h(2, 2);
  return h;
}

// ---------------------------------------------------------------------------

using nlohmann::json;

void save_pose_file(const std::filesystem::path& path, const PoseFile& poses) {
  json doc;
  doc["intrinsics"] = {{"fx", poses.intrinsics.fx},   {"fy", poses.intrinsics.fy},
                       {"cx", poses.intrinsics.cx},   {"cy", poses.intrinsics.cy},
                       {"width", poses.intrinsics.width}, {"height", poses.intrinsics.height}};
  doc["frames"] = json::array();
  for (const auto& f : poses.frames) {
    const Mat4 m = f.pose.world_from_camera();
    std::vector<double> entries;
    entries.reserve(16);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) entries.push_back(m(r, c));
    doc["frames"].push_back(
        {{"id", f.id}, {"world_from_camera", entries}, {"image", f.image}});
  }
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write pose file: " + path.string());
  out << doc.dump(2) << "\n";
}

PoseFile load_pose_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read pose file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw IoFailure("malformed pose file " + path.string() + ": " + e.what());
  }

  PoseFile poses;
  const auto& ji = doc.at("intrinsics");
  poses.intrinsics = CameraIntrinsics{ji.at("fx"), ji.at("fy"), ji.at("cx"),
                                      ji.at("cy"), ji.at("width"), ji.at("height")};
  poses.intrinsics.validate();
  for (const auto& jf : doc.at("frames")) {
    const auto entries = jf.at("world_from_camera").get<std::vector<double>>();
    if (entries.size() != 16)
      throw IoFailure("pose file frame matrix must have 16 entries");
    Mat4 m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = entries[static_cast<std::size_t>(r * 4 + c)];
    PoseFileFrame frame;
    frame.id = jf.at("id").get<std::string>();
    frame.pose = CameraPose::from_world_from_camera(m);
    frame.pose.validate(1e-6);
    frame.image = jf.at("image").get<std::string>();
    poses.frames.push_back(std::move(frame));
  }
  return poses;
}

}  // namespace n2r
