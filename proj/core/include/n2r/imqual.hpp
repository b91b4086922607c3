// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "n2r/image.hpp"

namespace n2r {

// Peak signal-to-noise ratio in dB over all channels, peak value 1.0.
// Identical images return +infinity (serialized as null in reports).
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Single-scale SSIM on luma ((r+g+b)/3): 11x11 Gaussian window with
// sigma = 1.5, C1 = 0.01^2, C2 = 0.03^2 on unit dynamic range, averaged
// over all fully-contained window positions. Requires min(w, h) >= 11.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace n2r
