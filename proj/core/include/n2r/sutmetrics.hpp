// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>

#include "n2r/geometry.hpp"
#include "n2r/suts.hpp"

namespace n2r {

enum class SutMetric { cosine, l2, class_invariance, repeatability, ip_spread };

std::string to_string(SutMetric m);

// One evaluated output-side metric. `deviation` rescales the raw value to
// [0, 1] with 0 = perfectly consistent, so a single threshold applies to
// every metric: cosine/class/repeatability/spread map v -> 1 - v, l2 maps
// v -> v / sqrt(2).
struct MetricValue {
  SutMetric metric = SutMetric::cosine;
  double raw = 0;
  double deviation = 0;
};

double deviation_from_raw(SutMetric metric, double raw);
MetricValue make_metric(SutMetric metric, double raw);

// dot(p,q) / (|p| |q|). For probability vectors the value lies in [0, 1].
double cosine_similarity(std::span<const double> p, std::span<const double> q);

// Plain (non-squared) Euclidean distance; sqrt(2) max for distributions.
double l2_distance(std::span<const double> p, std::span<const double> q);

// 1 when both argmax indices agree (ties break to the lowest index).
double class_invariance(std::span<const double> p, std::span<const double> q);

// Fraction of points of A that, projected into view B by H, find a
// one-to-one partner in B within 2 px. Projected points falling outside
// image B are excluded; the denominator is max(1, min(|V|, |B|)).
// Matching is greedy in descending confidence of the projected points.
double repeatability(const InterestPoints& pts_a, const InterestPoints& pts_b,
                     const Mat3& homography, int width_b, int height_b);

inline constexpr double kRepeatabilityPixelTolerance = 2.0;
inline constexpr double kCoverageRadiusPx = 10.0;

// Intersection-over-union of coverage masks: a union of radius-10 pixel
// disks around each point, rasterized at image resolution. Two empty
// point sets count as fully consistent (1.0).
double ip_spread(const InterestPoints& pts_a, const InterestPoints& pts_b, int width,
                 int height);

}  // namespace n2r
