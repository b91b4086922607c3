// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/sutmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace n2r {

std::string to_string(SutMetric m) {
  switch (m) {
    case SutMetric::cosine: return "cosine";
    case SutMetric::l2: return "l2";
    case SutMetric::class_invariance: return "class_invariance";
    case SutMetric::repeatability: return "repeatability";
    case SutMetric::ip_spread: return "ip_spread";
  }
  return "?";
}

double deviation_from_raw(SutMetric metric, double raw) {
  double dev = 0;
  switch (metric) {
    case SutMetric::l2:
      dev = raw / std::sqrt(2.0);
      break;
    case SutMetric::cosine:
    case SutMetric::class_invariance:
    case SutMetric::repeatability:
    case SutMetric::ip_spread:
      dev = 1.0 - raw;
      break;
  }
  return std::clamp(dev, 0.0, 1.0);
}

MetricValue make_metric(SutMetric metric, double raw) {
  return MetricValue{metric, raw, deviation_from_raw(metric, raw)};
}

double cosine_similarity(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw LengthMismatch("cosine: vector lengths differ");
  double dot = 0, np = 0, nq = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * q[i];
    np += p[i] * p[i];
    nq += q[i] * q[i];
  }
  if (np == 0.0 || nq == 0.0) throw ZeroVector("cosine: zero-norm input");
  return dot / (std::sqrt(np) * std::sqrt(nq));
}

double l2_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw LengthMismatch("l2: vector lengths differ");
  double sum = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

std::size_t argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;  // strict: ties keep the lower index
  return best;
}

}  // namespace

double class_invariance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw LengthMismatch("class_invariance: vector lengths differ");
  if (p.empty()) throw LengthMismatch("class_invariance: empty vectors");
  return argmax_lowest(p) == argmax_lowest(q) ? 1.0 : 0.0;
}

double repeatability(const InterestPoints& pts_a, const InterestPoints& pts_b,
                     const Mat3& homography, int width_b, int height_b) {
  if (std::abs(homography.determinant()) < 1e-12)
    throw SingularHomography("repeatability: homography is not invertible");

  struct Projected {
    double x, y, confidence;
  };
  std::vector<Projected> shared;  // the set V landing inside image B
  for (const auto& p : pts_a.points) {
    const Eigen::Vector3d h = homography * Eigen::Vector3d{p.x, p.y, 1.0};
    if (std::abs(h.z()) < 1e-12) continue;
    const double x = h.x() / h.z();
    const double y = h.y() / h.z();
    if (x < 0 || y < 0 || x >= width_b || y >= height_b) continue;
    shared.push_back({x, y, p.confidence});
  }
  std::stable_sort(shared.begin(), shared.end(),
                   [](const Projected& a, const Projected& b) {
                     return a.confidence > b.confidence;
                   });

  std::vector<bool> used(pts_b.points.size(), false);
  int matches = 0;
  for (const auto& p : shared) {
    int best = -1;
    double best_d2 = kRepeatabilityPixelTolerance * kRepeatabilityPixelTolerance;
    for (std::size_t j = 0; j < pts_b.points.size(); ++j) {
      if (used[j]) continue;
      const double dx = pts_b.points[j].x - p.x;
      const double dy = pts_b.points[j].y - p.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 <= best_d2) {
        best_d2 = d2;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0) {
      used[static_cast<std::size_t>(best)] = true;
      ++matches;
    }
  }

  const std::size_t denom = std::min(shared.size(), pts_b.points.size());
  return static_cast<double>(matches) / static_cast<double>(std::max<std::size_t>(1, denom));
}

double ip_spread(const InterestPoints& pts_a, const InterestPoints& pts_b, int width,
                 int height) {
  if (pts_a.points.empty() && pts_b.points.empty()) return 1.0;

  auto rasterize = [&](const InterestPoints& pts, std::vector<bool>& mask) {
    const double r2 = kCoverageRadiusPx * kCoverageRadiusPx;
    for (const auto& p : pts.points) {
      const int x0 = std::max(0, static_cast<int>(std::floor(p.x - kCoverageRadiusPx)));
      const int x1 = std::min(width - 1, static_cast<int>(std::ceil(p.x + kCoverageRadiusPx)));
      const int y0 = std::max(0, static_cast<int>(std::floor(p.y - kCoverageRadiusPx)));
      const int y1 = std::min(height - 1, static_cast<int>(std::ceil(p.y + kCoverageRadiusPx)));
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const double dx = x - p.x, dy = y - p.y;
          if (dx * dx + dy * dy <= r2)
            mask[static_cast<std::size_t>(y) * width + x] = true;
        }
    }
  };

  std::vector<bool> mask_a(static_cast<std::size_t>(width) * height, false);
  std::vector<bool> mask_b(mask_a.size(), false);
  rasterize(pts_a, mask_a);
  rasterize(pts_b, mask_b);

  std::int64_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < mask_a.size(); ++i) {
    if (mask_a[i] && mask_b[i]) ++inter;
    if (mask_a[i] || mask_b[i]) ++uni;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace n2r
