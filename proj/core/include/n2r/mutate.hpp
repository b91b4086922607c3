// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "n2r/image.hpp"

namespace n2r {

// Camera failure-mode baselines: global brightness change, one large
// noise patch, several small black patches.
enum class MutationKind { m1_brightness, m2_noise_patch, m3_black_patches };

std::string to_string(MutationKind k);
MutationKind mutation_kind_from_string(const std::string& s);

struct MutationSpec {
  MutationKind kind = MutationKind::m1_brightness;
  double gain = 1.4;        // m1: per-channel multiplier
  double patch_frac = 0.25; // m2: patch side as a fraction of each dimension
  int n_patches = 6;        // m3
  int patch_px = 0;         // m3: square side; 0 picks 5% of the width
  std::uint64_t seed = 0;

  void validate() const;
  // Stable identifier used in reports, e.g. "m1_gain0.6".
  std::string id() const;
};

// Applies the mutation; pixels outside mutated regions are bit-identical
// to the input, and a fixed seed reproduces the output exactly.
ImageBuffer mutate(const ImageBuffer& image, const MutationSpec& spec);

}  // namespace n2r
