// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace n2r {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::real: return "real";
    case Provenance::nerf: return "nerf";
    case Provenance::transformed: return "transformed";
    case Provenance::mutated: return "mutated";
  }
  return "?";
}

ImageBuffer ImageBuffer::constant(int width, int height, float r, float g, float b,
                                  Provenance prov) {
  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.provenance = prov;
  img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
    img.pixels[i] = r;
    img.pixels[i + 1] = g;
    img.pixels[i + 2] = b;
  }
  return img;
}

void ImageBuffer::validate() const {
  if (width <= 0 || height <= 0) throw DimensionMismatch("image: empty dimensions");
  if (pixels.size() != static_cast<std::size_t>(width) * height * 3)
    throw DimensionMismatch("image: pixel buffer size mismatch");
  for (float v : pixels)
    if (!(v >= 0.0f && v <= 1.0f)) throw DimensionMismatch("image: channel outside [0,1]");
}

std::uint8_t quantize8(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(255.0f * c));
}

void save_ppm(const std::filesystem::path& path, const ImageBuffer& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write image: " + path.string());
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<std::uint8_t> bytes;
  bytes.reserve(image.pixels.size());
  for (float v : image.pixels) bytes.push_back(quantize8(v));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("short write: " + path.string());
}

ImageBuffer load_ppm(const std::filesystem::path& path, Provenance provenance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read image: " + path.string());

  auto next_token = [&in, &path]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoFailure("truncated PPM header: " + path.string());
  };

  if (next_token() != "P6") throw IoFailure("not a binary PPM: " + path.string());
  const int width = std::stoi(next_token());
  const int height = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (width <= 0 || height <= 0 || maxval != 255)
    throw IoFailure("unsupported PPM geometry: " + path.string());
  in.get();  // single whitespace after header

  const std::size_t n = static_cast<std::size_t>(width) * height * 3;
  std::vector<std::uint8_t> bytes(n);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IoFailure("truncated PPM payload: " + path.string());

  ImageBuffer img;
  img.width = width;
  img.height = height;
  img.provenance = provenance;
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    img.pixels[i] = static_cast<float>(bytes[i]) / 255.0f;
  return img;
}

}  // namespace n2r
