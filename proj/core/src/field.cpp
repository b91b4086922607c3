// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "n2r/parallel.hpp"
#include "n2r/rng.hpp"

namespace n2r {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

RadianceField RadianceField::init(const Eigen::Vector3i& resolution, const Box3& bounds,
                                  float sigma0, float color0, const Vec3& background0) {
  RadianceField f;
  f.resolution = resolution;
  f.bounds = bounds;
  f.background = background0;
  f.sigma.assign(f.node_count(), sigma0);
  f.color.assign(3 * f.node_count(), color0);
  f.validate();
  return f;
}

Vec3 RadianceField::node_position(int ix, int iy, int iz) const {
  const Vec3 e = bounds.extent();
  return Vec3{bounds.min.x() + e.x() * ix / (resolution.x() - 1),
              bounds.min.y() + e.y() * iy / (resolution.y() - 1),
              bounds.min.z() + e.z() * iz / (resolution.z() - 1)};
}

void RadianceField::validate() const {
  if (resolution.minCoeff() < 2) throw ConfigError("field: resolution must be >= 2 per axis");
  if (bounds.degenerate()) throw ConfigError("field: degenerate bounds");
  if (sigma.size() != node_count() || color.size() != 3 * node_count())
    throw ConfigError("field: parameter array sizes do not match the resolution");
  for (float s : sigma)
    if (!(s >= 0.0f)) throw ConfigError("field: negative or NaN sigma");
  for (float c : color)
    if (!(c >= 0.0f && c <= 1.0f)) throw ConfigError("field: color outside [0,1]");
  for (int i = 0; i < 3; ++i)
    if (!(background[i] >= 0.0 && background[i] <= 1.0))
      throw ConfigError("field: background outside [0,1]");
}

void RadianceField::clamp_parameters() {
  for (auto& s : sigma) s = std::max(s, 0.0f);
  for (auto& c : color) c = std::clamp(c, 0.0f, 1.0f);
  for (int i = 0; i < 3; ++i) background[i] = std::clamp(background[i], 0.0, 1.0);
}

void RenderConfig::validate() const {
  if (samples_per_ray < 2) throw ConfigError("render: samples_per_ray must be >= 2");
}

void TrainConfig::validate() const {
  // steps == 0 is allowed and leaves the field untouched.
  if (steps < 0 || rays_per_step < 1) throw ConfigError("train: bad step/ray counts");
  if (!(learning_rate > 0)) throw ConfigError("train: learning rate must be positive");
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

// The 8 nodes and weights of the trilinear cell containing p.
struct Stencil {
  std::size_t idx[8];
  double w[8];
  bool inside = false;
};

inline Stencil make_stencil(const RadianceField& field, const Vec3& p) {
  Stencil st;
  if (!field.bounds.contains(p)) return st;
  st.inside = true;

  int cell[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const int n = field.resolution[a];
    const double span = field.bounds.max[a] - field.bounds.min[a];
    double g = (p[a] - field.bounds.min[a]) / span * (n - 1);
    int c = static_cast<int>(g);
    if (c > n - 2) c = n - 2;
    cell[a] = c;
    frac[a] = g - c;
  }

  const std::size_t nx = static_cast<std::size_t>(field.resolution.x());
  const std::size_t ny = static_cast<std::size_t>(field.resolution.y());
  const std::size_t base = static_cast<std::size_t>(cell[0]) +
                           nx * (static_cast<std::size_t>(cell[1]) +
                                 ny * static_cast<std::size_t>(cell[2]));
  const std::size_t dx = 1, dy = nx, dz = nx * ny;
  const double tx = frac[0], ty = frac[1], tz = frac[2];
  const double sx = 1.0 - tx, sy = 1.0 - ty, sz = 1.0 - tz;

  st.idx[0] = base;
  st.idx[1] = base + dx;
  st.idx[2] = base + dy;
  st.idx[3] = base + dx + dy;
  st.idx[4] = base + dz;
  st.idx[5] = base + dx + dz;
  st.idx[6] = base + dy + dz;
  st.idx[7] = base + dx + dy + dz;
  st.w[0] = sx * sy * sz;
  st.w[1] = tx * sy * sz;
  st.w[2] = sx * ty * sz;
  st.w[3] = tx * ty * sz;
  st.w[4] = sx * sy * tz;
  st.w[5] = tx * sy * tz;
  st.w[6] = sx * ty * tz;
  st.w[7] = tx * ty * tz;
  return st;
}

inline FieldSample sample_with_stencil(const RadianceField& field, const Stencil& st) {
  FieldSample out;
  if (!st.inside) {
    out.color = field.background;
    return out;
  }
  double sg = 0, r = 0, g = 0, b = 0;
  for (int k = 0; k < 8; ++k) {
    const double w = st.w[k];
    const std::size_t i = st.idx[k];
    sg += w * field.sigma[i];
    r += w * field.color[3 * i];
    g += w * field.color[3 * i + 1];
    b += w * field.color[3 * i + 2];
  }
  out.sigma = sg;
  out.color = Vec3{r, g, b};
  return out;
}

}  // namespace

FieldSample sample_field(const RadianceField& field, const Vec3& point) {
  return sample_with_stencil(field, make_stencil(field, point));
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

// Shared quadrature walk. `weights` may be null when the caller only needs
// the composited color.
RayRender render_ray_impl(const RadianceField& field, const Ray& ray, int n_samples,
                          bool jitter, std::uint64_t jitter_seed, bool keep_weights) {
  RayRender out;
  if (keep_weights) out.weights.assign(static_cast<std::size_t>(n_samples), 0.0);

  const double span = ray.t_far - ray.t_near;
  if (!(span > 0)) {
    out.color = field.background;
    return out;
  }
  const double h = span / n_samples;

  SplitMix64 rng(jitter_seed);
  double t_prev = ray.t_near + (jitter ? rng.next_double() : 0.5) * h;
  double transmittance = 1.0;
  Vec3 color{0, 0, 0};

  for (int i = 0; i < n_samples; ++i) {
    double t_next_sample;
    double delta;
    if (i + 1 < n_samples) {
      t_next_sample =
          ray.t_near + (i + 1 + (jitter ? rng.next_double() : 0.5)) * h;
      delta = t_next_sample - t_prev;
    } else {
      t_next_sample = 0;
      delta = ray.t_far - t_prev;
    }

    const Stencil st = make_stencil(field, ray.at(t_prev));
    const FieldSample s = sample_with_stencil(field, st);
    const double alpha = -std::expm1(-s.sigma * delta);
    const double w = transmittance * alpha;
    color += w * s.color;
    transmittance -= w;  // T_{i+1} = T_i (1 - alpha_i), kept exactly summable
    if (keep_weights) out.weights[static_cast<std::size_t>(i)] = w;

    if (i + 1 < n_samples) t_prev = t_next_sample;
  }

  out.color = color + transmittance * field.background;
  out.transmittance_residual = transmittance;
  return out;
}

}  // namespace

RayRender render_ray(const RadianceField& field, const Ray& ray, const RenderConfig& cfg) {
  cfg.validate();
  return render_ray_impl(field, ray, cfg.samples_per_ray, cfg.jitter, cfg.seed, true);
}

ImageBuffer render_image(const RadianceField& field, const CameraIntrinsics& intr,
                         const CameraPose& pose, const RenderConfig& cfg) {
  cfg.validate();
  intr.validate();
  ImageBuffer img;
  img.width = intr.width;
  img.height = intr.height;
  img.provenance = Provenance::nerf;
  img.pixels.resize(static_cast<std::size_t>(intr.width) * intr.height * 3);

  parallel_for(0, intr.height, [&](std::int64_t y) {
    for (int x = 0; x < intr.width; ++x) {
      const std::uint64_t pixel_index =
          static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(intr.width) +
          static_cast<std::uint64_t>(x);
      Vec3 color = field.background;
      if (auto ray = pixel_ray(intr, pose, x + 0.5, y + 0.5, field.bounds)) {
        color = render_ray_impl(field, *ray, cfg.samples_per_ray, cfg.jitter,
                                seed_chain(cfg.seed, pixel_index), false)
                    .color;
      }
      float* px = img.at(x, static_cast<int>(y));
      px[0] = static_cast<float>(std::clamp(color.x(), 0.0, 1.0));
      px[1] = static_cast<float>(std::clamp(color.y(), 0.0, 1.0));
      px[2] = static_cast<float>(std::clamp(color.z(), 0.0, 1.0));
    }
  });
  return img;
}

// ---------------------------------------------------------------------------
// Gradients

void FieldGradients::resize_for(const RadianceField& field) {
  sigma.resize(field.node_count());
  color.resize(3 * field.node_count());
}

void FieldGradients::set_zero() {
  std::fill(sigma.begin(), sigma.end(), 0.0);
  std::fill(color.begin(), color.end(), 0.0);
  background.setZero();
}

namespace {

constexpr int kGradChunks = 4;

struct SampleRecord {
  Stencil stencil;
  Vec3 color;
  double weight;
  double delta;
  double t_before;  // transmittance before this sample
};

// Forward + backward pass for one ray, accumulating into dense buffers.
double ray_loss_and_grad(const RadianceField& field, const RayBatchEntry& entry,
                         const RenderConfig& cfg, double inv_batch,
                         std::vector<SampleRecord>& scratch, FieldGradients& acc) {
  const int n = cfg.samples_per_ray;
  scratch.clear();
  scratch.reserve(static_cast<std::size_t>(n));

  const Ray& ray = entry.ray;
  const double span = ray.t_far - ray.t_near;
  double transmittance = 1.0;
  Vec3 color{0, 0, 0};

  if (span > 0) {
    const double h = span / n;
    SplitMix64 rng(entry.jitter_seed);
    double t_prev = ray.t_near + (cfg.jitter ? rng.next_double() : 0.5) * h;
    for (int i = 0; i < n; ++i) {
      double t_next = 0, delta;
      if (i + 1 < n) {
        t_next = ray.t_near + (i + 1 + (cfg.jitter ? rng.next_double() : 0.5)) * h;
        delta = t_next - t_prev;
      } else {
        delta = ray.t_far - t_prev;
      }
      SampleRecord rec;
      rec.stencil = make_stencil(field, ray.at(t_prev));
      const FieldSample s = sample_with_stencil(field, rec.stencil);
      const double alpha = -std::expm1(-s.sigma * delta);
      rec.color = s.color;
      rec.delta = delta;
      rec.t_before = transmittance;
      rec.weight = transmittance * alpha;
      color += rec.weight * s.color;
      transmittance -= rec.weight;
      scratch.push_back(rec);
      if (i + 1 < n) t_prev = t_next;
    }
  }
  color += transmittance * field.background;

  const Vec3 err = color - entry.target;
  const double ray_loss = err.squaredNorm();
  const Vec3 g = 2.0 * inv_batch * err;  // dL/dC

  // Backward: suffix S(i) = sum_{j>i} w_j c_j + T_N * background.
  Vec3 suffix = transmittance * field.background;
  acc.background += g * transmittance;
  for (int i = static_cast<int>(scratch.size()) - 1; i >= 0; --i) {
    const SampleRecord& rec = scratch[static_cast<std::size_t>(i)];
    if (rec.stencil.inside) {
      const double t_after = rec.t_before - rec.weight;  // T_{i+1}
      // dC/dsigma_i = delta_i * (T_{i+1} c_i - S(i)); dC/dc_i = w_i.
      const double dsig = rec.delta * (g.dot(t_after * rec.color - suffix));
      for (int k = 0; k < 8; ++k) {
        const std::size_t idx = rec.stencil.idx[k];
        const double wk = rec.stencil.w[k];
        acc.sigma[idx] += dsig * wk;
        const double cw = rec.weight * wk;
        acc.color[3 * idx] += g.x() * cw;
        acc.color[3 * idx + 1] += g.y() * cw;
        acc.color[3 * idx + 2] += g.z() * cw;
      }
    }
    suffix += rec.weight * rec.color;
  }
  return ray_loss;
}

}  // namespace

double loss_and_gradients(const RadianceField& field, std::span<const RayBatchEntry> batch,
                          const RenderConfig& cfg, FieldGradients& grads) {
  cfg.validate();
  if (batch.empty()) throw EmptyDataset("loss_and_gradients: empty batch");

  grads.resize_for(field);
  grads.set_zero();

  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const int chunks = std::min<int>(kGradChunks, static_cast<int>(batch.size()));

  std::vector<FieldGradients> partial(static_cast<std::size_t>(chunks));
  std::vector<double> partial_loss(static_cast<std::size_t>(chunks), 0.0);

  parallel_chunks(static_cast<std::int64_t>(batch.size()), chunks,
                  [&](int chunk, std::int64_t lo, std::int64_t hi) {
                    FieldGradients& acc = partial[static_cast<std::size_t>(chunk)];
                    acc.resize_for(field);
                    acc.set_zero();
                    std::vector<SampleRecord> scratch;
                    double loss = 0.0;
                    for (std::int64_t i = lo; i < hi; ++i)
                      loss += ray_loss_and_grad(field, batch[static_cast<std::size_t>(i)],
                                                cfg, inv_batch, scratch, acc);
                    partial_loss[static_cast<std::size_t>(chunk)] = loss;
                  });

  double loss = 0.0;
  for (int c = 0; c < chunks; ++c) {
    loss += partial_loss[static_cast<std::size_t>(c)];
    const FieldGradients& acc = partial[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < grads.sigma.size(); ++i) grads.sigma[i] += acc.sigma[i];
    for (std::size_t i = 0; i < grads.color.size(); ++i) grads.color[i] += acc.color[i];
    grads.background += acc.background;
  }
  return loss * inv_batch;
}

// ---------------------------------------------------------------------------
// Fitting

FitResult fit(RadianceField& field, std::span<const TrainView> views,
              const CameraIntrinsics& intr, const TrainConfig& tcfg,
              const RenderConfig& rcfg) {
  tcfg.validate();
  rcfg.validate();
  field.validate();
  if (views.size() < 2) throw EmptyDataset("fit: need at least 2 training views");
  for (const auto& v : views)
    if (!v.image || v.image->width != intr.width || v.image->height != intr.height)
      throw DimensionMismatch("fit: view image does not match the intrinsics");

  FitResult result;
  result.loss_history.reserve(static_cast<std::size_t>(tcfg.steps));

  FieldGradients grads;
  std::vector<double> s_sigma(field.node_count(), 0.0);
  std::vector<double> s_color(3 * field.node_count(), 0.0);
  Vec3 s_bg = Vec3::Zero();

  std::vector<RayBatchEntry> batch;
  batch.reserve(static_cast<std::size_t>(tcfg.rays_per_step));

  for (int step = 0; step < tcfg.steps; ++step) {
    const std::uint64_t step_seed = seed_chain(tcfg.seed, static_cast<std::uint64_t>(step));
    SplitMix64 rng(step_seed);

    batch.clear();
    while (static_cast<int>(batch.size()) < tcfg.rays_per_step) {
      const auto v = static_cast<std::size_t>(rng.next_below(views.size()));
      const int px = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(intr.width)));
      const int py = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(intr.height)));
      const auto ray =
          pixel_ray(intr, views[v].pose, px + 0.5, py + 0.5, field.bounds);
      const std::uint64_t jitter_seed = rng.next();
      const float* t = views[v].image->at(px, py);
      const Vec3 target{t[0], t[1], t[2]};
      if (ray) {
        batch.push_back(RayBatchEntry{*ray, target, jitter_seed});
      } else {
        // Pixel sees past the field bounds; a zero-span ray still trains
        // the background toward it.
        batch.push_back(RayBatchEntry{Ray{views[v].pose.position,
                                          views[v].pose.forward(), 0.0, 0.0},
                                      target, jitter_seed});
      }
    }

    const double loss = loss_and_gradients(field, batch, rcfg, grads);
    result.loss_history.push_back(loss);

    const double lr = tcfg.learning_rate;
    parallel_for(0, static_cast<std::int64_t>(field.node_count()), [&](std::int64_t i) {
      const double gs = grads.sigma[static_cast<std::size_t>(i)];
      if (gs != 0.0) {
        s_sigma[static_cast<std::size_t>(i)] += gs * gs;
        field.sigma[static_cast<std::size_t>(i)] -= static_cast<float>(
            lr * gs / std::sqrt(s_sigma[static_cast<std::size_t>(i)] + 1e-8));
      }
      for (int c = 0; c < 3; ++c) {
        const std::size_t j = 3 * static_cast<std::size_t>(i) + static_cast<std::size_t>(c);
        const double gc = grads.color[j];
        if (gc != 0.0) {
          s_color[j] += gc * gc;
          field.color[j] -= static_cast<float>(lr * gc / std::sqrt(s_color[j] + 1e-8));
        }
      }
    });
    for (int c = 0; c < 3; ++c) {
      const double gb = grads.background[c];
      if (gb != 0.0) {
        s_bg[c] += gb * gb;
        field.background[c] -= lr * gb / std::sqrt(s_bg[c] + 1e-8);
      }
    }
    field.clamp_parameters();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr char kMagic[4] = {'N', '2', 'R', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void save_field(const std::filesystem::path& path, const RadianceField& field) {
  field.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write checkpoint: " + path.string());

  out.write(kMagic, 4);
  write_pod(out, kVersion);
  for (int a = 0; a < 3; ++a) write_pod(out, static_cast<std::uint32_t>(field.resolution[a]));
  for (int a = 0; a < 3; ++a) write_pod(out, field.bounds.min[a]);
  for (int a = 0; a < 3; ++a) write_pod(out, field.bounds.max[a]);
  for (int a = 0; a < 3; ++a) write_pod(out, field.background[a]);
  out.write(reinterpret_cast<const char*>(field.sigma.data()),
            static_cast<std::streamsize>(field.sigma.size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(field.color.data()),
            static_cast<std::streamsize>(field.color.size() * sizeof(float)));
  if (!out) throw IoFailure("short write: " + path.string());
}

RadianceField load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read checkpoint: " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw BadCheckpoint("not a field checkpoint: " + path.string());
  std::uint32_t version = 0;
  read_pod(in, version);
  if (version != kVersion) throw BadCheckpoint("unsupported checkpoint version");

  RadianceField field;
  for (int a = 0; a < 3; ++a) {
    std::uint32_t r = 0;
    read_pod(in, r);
    field.resolution[a] = static_cast<int>(r);
  }
  for (int a = 0; a < 3; ++a) read_pod(in, field.bounds.min[a]);
  for (int a = 0; a < 3; ++a) read_pod(in, field.bounds.max[a]);
  for (int a = 0; a < 3; ++a) read_pod(in, field.background[a]);
  if (!in || field.resolution.minCoeff() < 2)
    throw BadCheckpoint("corrupt checkpoint header: " + path.string());

  field.sigma.resize(field.node_count());
  field.color.resize(3 * field.node_count());
  in.read(reinterpret_cast<char*>(field.sigma.data()),
          static_cast<std::streamsize>(field.sigma.size() * sizeof(float)));
  in.read(reinterpret_cast<char*>(field.color.data()),
          static_cast<std::streamsize>(field.color.size() * sizeof(float)));
  if (!in) throw BadCheckpoint("truncated checkpoint: " + path.string());
  field.validate();
  return field;
}

}  // namespace n2r
