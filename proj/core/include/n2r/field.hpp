// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "n2r/geometry.hpp"
#include "n2r/image.hpp"

namespace n2r {

// Dense voxel radiance field: per-node density sigma (>= 0) and diffuse
// RGB color in [0, 1], trilinearly interpolated, plus a trainable
// background color composited behind the remaining transmittance.
// Colors are deliberately view-independent; the shipped synthetic scenes
// are Lambertian.
struct RadianceField {
  Eigen::Vector3i resolution{2, 2, 2};  // node counts per axis, >= 2
  Box3 bounds;
  std::vector<float> sigma;  // resolution.prod(), x-fastest
  std::vector<float> color;  // 3 * resolution.prod(), RGB interleaved, x-fastest
  Vec3 background{0, 0, 0};

  static RadianceField init(const Eigen::Vector3i& resolution, const Box3& bounds,
                            float sigma0, float color0, const Vec3& background0);

  std::size_t node_count() const {
    return static_cast<std::size_t>(resolution.x()) * resolution.y() * resolution.z();
  }
  std::size_t node_index(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(resolution.x()) *
               (static_cast<std::size_t>(iy) +
                static_cast<std::size_t>(resolution.y()) * static_cast<std::size_t>(iz));
  }
  Vec3 node_position(int ix, int iy, int iz) const;

  void validate() const;
  // Projection step after a gradient update: sigma >= 0, colors and
  // background in [0, 1].
  void clamp_parameters();
};

struct RenderConfig {
  int samples_per_ray = 64;
  bool jitter = true;  // stratified jitter inside each quadrature bin
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainConfig {
  int steps = 3000;          // desk-scale default
  int rays_per_step = 4096;  // matches the usual per-step ray budget
  double learning_rate = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FieldSample {
  double sigma = 0;
  Vec3 color{0, 0, 0};
};

// Trilinear interpolation of the surrounding nodes; points outside the
// bounds return (0, background).
FieldSample sample_field(const RadianceField& field, const Vec3& point);

struct RayRender {
  Vec3 color{0, 0, 0};
  double transmittance_residual = 1.0;  // T after the last sample
  std::vector<double> weights;          // per-sample compositing weights
};

// Quadrature rendering: samples_per_ray bins over [t_near, t_far], sample
// at the bin midpoint (or uniformly jittered inside the bin), with
//   alpha_i = 1 - exp(-sigma_i * delta_i),  w_i = T_i * alpha_i,
//   color = sum w_i c_i + T_N * background.
// sum(w_i) + T_N == 1 holds exactly.
RayRender render_ray(const RadianceField& field, const Ray& ray, const RenderConfig& cfg);

// Per-pixel render over the full image. Deterministic for a fixed seed:
// the jitter stream of each pixel is seeded by (cfg.seed, pixel index),
// independent of threading.
ImageBuffer render_image(const RadianceField& field, const CameraIntrinsics& intr,
                         const CameraPose& pose, const RenderConfig& cfg);

struct RayBatchEntry {
  Ray ray;
  Vec3 target{0, 0, 0};
  std::uint64_t jitter_seed = 0;
};

struct FieldGradients {
  std::vector<double> sigma;
  std::vector<double> color;
  Vec3 background{0, 0, 0};

  void resize_for(const RadianceField& field);
  void set_zero();
};

// Mean over the batch of the squared RGB error, with analytic gradients
// through the compositing weights and the trilinear interpolation back to
// every voxel parameter and the background. Accumulation order is fixed,
// so results are bit-identical across machines.
double loss_and_gradients(const RadianceField& field, std::span<const RayBatchEntry> batch,
                          const RenderConfig& cfg, FieldGradients& grads);

struct TrainView {
  const ImageBuffer* image = nullptr;
  CameraPose pose;
};

struct FitResult {
  std::vector<double> loss_history;  // one entry per step
};

// Adaptive projected gradient descent: per parameter accumulate s += g^2
// and step p -= lr * g / sqrt(s + 1e-8), then clamp sigma/colors. Each
// step draws rays_per_step uniform pixel rays across the training views.
FitResult fit(RadianceField& field, std::span<const TrainView> views,
              const CameraIntrinsics& intr, const TrainConfig& tcfg,
              const RenderConfig& rcfg);

// Checkpoint: little-endian binary, magic "N2RF", version 1, resolution
// 3 x u32, bounds 6 x f64, background 3 x f64, sigma f32 array, color f32
// array (RGB interleaved), both x-fastest.
void save_field(const std::filesystem::path& path, const RadianceField& field);
RadianceField load_field(const std::filesystem::path& path);

}  // namespace n2r
