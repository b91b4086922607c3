// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/imqual.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace n2r {

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_size(b)) throw DimensionMismatch("psnr: image sizes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow * kWindow> gaussian_window() {
  std::array<double, kWindow * kWindow> w{};
  const int r = kWindow / 2;
  double total = 0.0;
  for (int y = 0; y < kWindow; ++y)
    for (int x = 0; x < kWindow; ++x) {
      const double dx = x - r, dy = y - r;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      w[static_cast<std::size_t>(y * kWindow + x)] = v;
      total += v;
    }
  for (auto& v : w) v /= total;
  return w;
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_size(b)) throw DimensionMismatch("ssim: image sizes differ");
  if (a.width < kWindow || a.height < kWindow)
    throw TooSmall("ssim: images smaller than the 11x11 window");

  static const std::array<double, kWindow * kWindow> window = gaussian_window();

  std::vector<double> la(static_cast<std::size_t>(a.width) * a.height);
  std::vector<double> lb(la.size());
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      la[static_cast<std::size_t>(y) * a.width + x] = a.luma(x, y);
      lb[static_cast<std::size_t>(y) * a.width + x] = b.luma(x, y);
    }

  double total = 0.0;
  std::int64_t count = 0;
  for (int y0 = 0; y0 + kWindow <= a.height; ++y0) {
    for (int x0 = 0; x0 + kWindow <= a.width; ++x0) {
      double mx = 0, my = 0;
      for (int wy = 0; wy < kWindow; ++wy)
        for (int wx = 0; wx < kWindow; ++wx) {
          const double w = window[static_cast<std::size_t>(wy * kWindow + wx)];
          mx += w * la[static_cast<std::size_t>(y0 + wy) * a.width + (x0 + wx)];
          my += w * lb[static_cast<std::size_t>(y0 + wy) * a.width + (x0 + wx)];
        }
      double vx = 0, vy = 0, cov = 0;
      for (int wy = 0; wy < kWindow; ++wy)
        for (int wx = 0; wx < kWindow; ++wx) {
          const double w = window[static_cast<std::size_t>(wy * kWindow + wx)];
          const double da = la[static_cast<std::size_t>(y0 + wy) * a.width + (x0 + wx)] - mx;
          const double db = lb[static_cast<std::size_t>(y0 + wy) * a.width + (x0 + wx)] - my;
          vx += w * da * da;
          vy += w * db * db;
          cov += w * da * db;
        }
      const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
      const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace n2r
