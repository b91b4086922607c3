// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/mutate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "n2r/rng.hpp"

namespace n2r {

std::string to_string(MutationKind k) {
  switch (k) {
    case MutationKind::m1_brightness: return "m1_brightness";
    case MutationKind::m2_noise_patch: return "m2_noise_patch";
    case MutationKind::m3_black_patches: return "m3_black_patches";
  }
  return "?";
}

MutationKind mutation_kind_from_string(const std::string& s) {
  if (s == "m1_brightness" || s == "m1") return MutationKind::m1_brightness;
  if (s == "m2_noise_patch" || s == "m2") return MutationKind::m2_noise_patch;
  if (s == "m3_black_patches" || s == "m3") return MutationKind::m3_black_patches;
  throw ConfigError("unknown mutation kind: " + s);
}

void MutationSpec::validate() const {
  if (!(gain > 0)) throw ConfigError("mutation: gain must be positive");
  if (!(patch_frac > 0 && patch_frac <= 1)) throw ConfigError("mutation: patch_frac outside (0,1]");
  if (n_patches < 1) throw ConfigError("mutation: n_patches must be >= 1");
  if (patch_px < 0) throw ConfigError("mutation: negative patch_px");
}

std::string MutationSpec::id() const {
  char buf[64];
  switch (kind) {
    case MutationKind::m1_brightness:
      std::snprintf(buf, sizeof(buf), "m1_gain%g", gain);
      return buf;
    case MutationKind::m2_noise_patch:
      std::snprintf(buf, sizeof(buf), "m2_frac%g", patch_frac);
      return buf;
    case MutationKind::m3_black_patches:
      std::snprintf(buf, sizeof(buf), "m3_n%d", n_patches);
      return buf;
  }
  return "m?";
}

namespace {

struct PatchRect {
  int x0, y0, w, h;
  bool overlaps(const PatchRect& o) const {
    return x0 < o.x0 + o.w && o.x0 < x0 + w && y0 < o.y0 + o.h && o.y0 < y0 + h;
  }
};

ImageBuffer apply_m1(const ImageBuffer& in, double gain) {
  ImageBuffer out = in;
  if (gain != 1.0) {
    for (auto& v : out.pixels)
      v = std::clamp(static_cast<float>(v * gain), 0.0f, 1.0f);
  }
  return out;
}

ImageBuffer apply_m2(const ImageBuffer& in, const MutationSpec& spec) {
  const int pw = std::max(1, static_cast<int>(std::lround(spec.patch_frac * in.width)));
  const int ph = std::max(1, static_cast<int>(std::lround(spec.patch_frac * in.height)));
  if (pw > in.width || ph > in.height)
    throw PatchTooLarge("m2: noise patch exceeds the image");

  SplitMix64 rng(seed_chain(spec.seed, "m2"));
  const int x0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(in.width - pw + 1)));
  const int y0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(in.height - ph + 1)));

  ImageBuffer out = in;
  for (int y = y0; y < y0 + ph; ++y)
    for (int x = x0; x < x0 + pw; ++x) {
      float* px = out.at(x, y);
      px[0] = static_cast<float>(rng.next_double());
      px[1] = static_cast<float>(rng.next_double());
      px[2] = static_cast<float>(rng.next_double());
    }
  return out;
}

ImageBuffer apply_m3(const ImageBuffer& in, const MutationSpec& spec) {
  const int side =
      spec.patch_px > 0
          ? spec.patch_px
          : std::max(1, static_cast<int>(std::lround(0.05 * in.width)));
  if (side > in.width || side > in.height)
    throw PatchTooLarge("m3: black patch exceeds the image");

  SplitMix64 rng(seed_chain(spec.seed, "m3"));
  std::vector<PatchRect> placed;

  // Rejection sampling keeps the patches disjoint so the blacked-out pixel
  // count is exactly n_patches * side^2.
  for (int k = 0; k < spec.n_patches; ++k) {
    bool ok = false;
    for (int attempt = 0; attempt < 10000 && !ok; ++attempt) {
      PatchRect r{static_cast<int>(rng.next_below(static_cast<std::uint64_t>(in.width - side + 1))),
                  static_cast<int>(rng.next_below(static_cast<std::uint64_t>(in.height - side + 1))),
                  side, side};
      ok = std::none_of(placed.begin(), placed.end(),
                        [&](const PatchRect& p) { return p.overlaps(r); });
      if (ok) placed.push_back(r);
    }
    if (!ok) throw PatchTooLarge("m3: cannot place non-overlapping patches");
  }

  ImageBuffer out = in;
  for (const auto& r : placed)
    for (int y = r.y0; y < r.y0 + r.h; ++y)
      for (int x = r.x0; x < r.x0 + r.w; ++x) {
        float* px = out.at(x, y);
        px[0] = px[1] = px[2] = 0.0f;
      }
  return out;
}

}  // namespace

ImageBuffer mutate(const ImageBuffer& image, const MutationSpec& spec) {
  spec.validate();
  image.validate();

  ImageBuffer out;
  switch (spec.kind) {
    case MutationKind::m1_brightness: out = apply_m1(image, spec.gain); break;
    case MutationKind::m2_noise_patch: out = apply_m2(image, spec); break;
    case MutationKind::m3_black_patches: out = apply_m3(image, spec); break;
  }
  out.provenance = Provenance::mutated;
  return out;
}

}  // namespace n2r
