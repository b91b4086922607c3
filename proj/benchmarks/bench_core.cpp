// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "n2r/field.hpp"
#include "n2r/imqual.hpp"
#include "n2r/rng.hpp"
#include "n2r/suts.hpp"
#include "n2r/synthscene.hpp"

namespace {

using namespace n2r;

RadianceField make_bench_field(int n) {
  RadianceField field = RadianceField::init(
      Eigen::Vector3i{n, n, n}, Box3{Vec3{-1, -1, -1}, Vec3{1, 1, 1}}, 0.0f, 0.5f,
      Vec3{0.2, 0.2, 0.2});
  SplitMix64 rng(42);
  for (auto& s : field.sigma) s = static_cast<float>(3.0 * rng.next_double());
  for (auto& c : field.color) c = static_cast<float>(rng.next_double());
  return field;
}

CameraIntrinsics make_intr(int w, int h) {
  return CameraIntrinsics{0.9 * w, 0.9 * w, 0.5 * w, 0.5 * h, w, h};
}

void BM_SampleField(benchmark::State& state) {
  const RadianceField field = make_bench_field(64);
  SplitMix64 rng(1);
  for (auto _ : state) {
    const Vec3 p{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0,
                 2.0 * rng.next_double() - 1.0};
    benchmark::DoNotOptimize(sample_field(field, p));
  }
}
BENCHMARK(BM_SampleField);

void BM_RenderRay(benchmark::State& state) {
  const RadianceField field = make_bench_field(64);
  const Ray ray{Vec3{0, -3, 0}, Vec3{0, 1, 0}, 2.0, 4.0};
  RenderConfig cfg;
  cfg.samples_per_ray = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(render_ray(field, ray, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenderRay)->Arg(32)->Arg(64)->Arg(128);

void BM_RenderImage(benchmark::State& state) {
  const RadianceField field = make_bench_field(64);
  const int w = static_cast<int>(state.range(0));
  const int h = w * 9 / 16;
  const CameraIntrinsics intr = make_intr(w, h);
  const CameraPose pose = CameraPose::look_at(Vec3{0, -3, 0.5}, Vec3{0, 0, 0});
  RenderConfig cfg;
  for (auto _ : state)
    benchmark::DoNotOptimize(render_image(field, intr, pose, cfg));
  state.SetItemsProcessed(state.iterations() * w * h);
}
BENCHMARK(BM_RenderImage)->Arg(160)->Arg(480)->Unit(benchmark::kMillisecond);

void BM_LossAndGradients(benchmark::State& state) {
  const RadianceField field = make_bench_field(32);
  SplitMix64 rng(7);
  std::vector<RayBatchEntry> batch;
  for (int i = 0; i < 512; ++i) {
    const double a = 2.0 * M_PI * rng.next_double();
    const Ray ray{Vec3{3.0 * std::cos(a), 3.0 * std::sin(a), 0.3},
                  (Vec3{0, 0, 0} - Vec3{3.0 * std::cos(a), 3.0 * std::sin(a), 0.3}).normalized(),
                  1.5, 4.5};
    batch.push_back(RayBatchEntry{ray, Vec3{0.5, 0.4, 0.3}, rng.next()});
  }
  RenderConfig cfg;
  FieldGradients grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_gradients(field, batch, cfg, grads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int>(batch.size()));
}
BENCHMARK(BM_LossAndGradients)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  const SceneSpec spec = SceneSpec::wall_default();
  const CameraIntrinsics intr = make_intr(480, 270);
  const CameraPose pose = CameraPose::look_at(Vec3{0, 0, 0}, Vec3{0, 2, 0});
  const ImageBuffer a = raytrace(spec, intr, pose);
  ImageBuffer b = a;
  b.pixels[1000] = 0.1f;
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Ssim)->Unit(benchmark::kMillisecond);

void BM_HarrisDetect(benchmark::State& state) {
  const SceneSpec spec = SceneSpec::wall_default();
  const CameraIntrinsics intr = make_intr(480, 270);
  const CameraPose pose = CameraPose::look_at(Vec3{0, 0, 0}, Vec3{0, 2, 0});
  const ImageBuffer img = raytrace(spec, intr, pose);
  for (auto _ : state) benchmark::DoNotOptimize(harris_detect(img, 100));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HarrisDetect)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
