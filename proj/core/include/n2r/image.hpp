// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "n2r/error.hpp"

namespace n2r {

enum class Provenance { real, nerf, transformed, mutated };

std::string to_string(Provenance p);

// H x W RGB image, channels in [0, 1], row-major, RGB interleaved.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;  // width * height * 3
  Provenance provenance = Provenance::real;

  static ImageBuffer constant(int width, int height, float r, float g, float b,
                              Provenance prov = Provenance::real);

  std::size_t index(int x, int y) const {
    return 3 * (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x));
  }
  float* at(int x, int y) { return pixels.data() + index(x, y); }
  const float* at(int x, int y) const { return pixels.data() + index(x, y); }

  double luma(int x, int y) const {
    const float* p = at(x, y);
    return (static_cast<double>(p[0]) + p[1] + p[2]) / 3.0;
  }

  bool same_size(const ImageBuffer& other) const {
    return width == other.width && height == other.height;
  }
  void validate() const;
};

// Linear [0,1] float to 8-bit: round(255 * clamp(v, 0, 1)).
std::uint8_t quantize8(float v);

// Binary PPM (P6, maxval 255).
void save_ppm(const std::filesystem::path& path, const ImageBuffer& image);
ImageBuffer load_ppm(const std::filesystem::path& path,
                     Provenance provenance = Provenance::real);

}  // namespace n2r
