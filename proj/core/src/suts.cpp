// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/suts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace n2r {

std::string to_string(SutTask t) { return t == SutTask::classify ? "classify" : "detect"; }

void SutDescriptor::validate() const {
  if (name.empty()) throw ConfigError("sut: empty name");
  if (max_points < 1) throw ConfigError("sut: max_points must be >= 1");
}

SutOutput run_sut(Sut& sut, const ImageBuffer& image) {
  SutOutput out = sut.run(image);
  const SutDescriptor& desc = sut.descriptor();

  if (desc.task == SutTask::classify) {
    if (!out.is_classification()) throw SutCrashed(desc.name + ": expected probabilities");
    const auto& probs = out.classification().probs;
    if (probs.empty()) throw SutCrashed(desc.name + ": empty probability vector");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw SutCrashed(desc.name + ": negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw SutCrashed(desc.name + ": probabilities do not sum to 1");
  } else {
    if (out.is_classification()) throw SutCrashed(desc.name + ": expected interest points");
    auto& pts = std::get<InterestPoints>(out.value).points;
    for (const auto& p : pts) {
      if (!(p.x >= 0 && p.x < image.width && p.y >= 0 && p.y < image.height))
        throw SutCrashed(desc.name + ": interest point outside the image");
      if (!std::isfinite(p.confidence)) throw SutCrashed(desc.name + ": non-finite confidence");
    }
    std::stable_sort(pts.begin(), pts.end(), [](const InterestPoint& a, const InterestPoint& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      if (a.y != b.y) return a.y < b.y;
      return a.x < b.x;
    });
    if (static_cast<int>(pts.size()) > desc.max_points)
      pts.resize(static_cast<std::size_t>(desc.max_points));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Harris detector

namespace {

constexpr double kHarrisK = 0.04;
constexpr double kHarrisSigma = 1.5;
constexpr int kHarrisRadius = 5;  // 11-tap Gaussian, matches the SSIM window
constexpr double kResponseEpsilon = 1e-12;

inline int clamp_coord(int v, int n) { return std::clamp(v, 0, n - 1); }

std::vector<double> gaussian_taps() {
  std::vector<double> taps(2 * kHarrisRadius + 1);
  double total = 0.0;
  for (int i = -kHarrisRadius; i <= kHarrisRadius; ++i) {
    const double v = std::exp(-(i * i) / (2.0 * kHarrisSigma * kHarrisSigma));
    taps[static_cast<std::size_t>(i + kHarrisRadius)] = v;
    total += v;
  }
  for (auto& v : taps) v /= total;
  return taps;
}

// Separable Gaussian blur with clamp-to-edge boundaries.
void gaussian_blur(std::vector<double>& img, int width, int height) {
  static const std::vector<double> taps = gaussian_taps();
  std::vector<double> tmp(img.size());
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -kHarrisRadius; i <= kHarrisRadius; ++i)
        acc += taps[static_cast<std::size_t>(i + kHarrisRadius)] *
               img[static_cast<std::size_t>(y) * width + clamp_coord(x + i, width)];
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -kHarrisRadius; i <= kHarrisRadius; ++i)
        acc += taps[static_cast<std::size_t>(i + kHarrisRadius)] *
               tmp[static_cast<std::size_t>(clamp_coord(y + i, height)) * width + x];
      img[static_cast<std::size_t>(y) * width + x] = acc;
    }
}

}  // namespace

std::vector<double> harris_response(const ImageBuffer& image) {
  if (image.width < 7 || image.height < 7)
    throw TooSmall("harris: image must be at least 7x7");

  const int w = image.width, h = image.height;
  std::vector<double> luma(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) luma[static_cast<std::size_t>(y) * w + x] = image.luma(x, y);

  auto at = [&](int x, int y) { return luma[static_cast<std::size_t>(clamp_coord(y, h)) * w + clamp_coord(x, w)]; };

  std::vector<double> ixx(luma.size()), iyy(luma.size()), ixy(luma.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
      const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                        (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ixx[i] = gx * gx;
      iyy[i] = gy * gy;
      ixy[i] = gx * gy;
    }

  gaussian_blur(ixx, w, h);
  gaussian_blur(iyy, w, h);
  gaussian_blur(ixy, w, h);

  std::vector<double> response(luma.size());
  for (std::size_t i = 0; i < response.size(); ++i) {
    const double det = ixx[i] * iyy[i] - ixy[i] * ixy[i];
    const double trace = ixx[i] + iyy[i];
    response[i] = det - kHarrisK * trace * trace;
  }
  return response;
}

InterestPoints harris_detect(const ImageBuffer& image, int max_points) {
  if (max_points < 1) throw ConfigError("harris: max_points must be >= 1");
  const std::vector<double> response = harris_response(image);
  const int w = image.width, h = image.height;

  InterestPoints out;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = response[static_cast<std::size_t>(y) * w + x];
      if (r <= kResponseEpsilon) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (response[static_cast<std::size_t>(ny) * w + nx] >= r) {
            // Flat plateaus keep only the lexicographically first pixel.
            if (response[static_cast<std::size_t>(ny) * w + nx] > r ||
                std::make_pair(ny, nx) < std::make_pair(y, x)) {
              is_max = false;
              break;
            }
          }
        }
      if (is_max)
        out.points.push_back(InterestPoint{static_cast<double>(x), static_cast<double>(y), r});
    }
  }

  std::stable_sort(out.points.begin(), out.points.end(),
                   [](const InterestPoint& a, const InterestPoint& b) {
                     if (a.confidence != b.confidence) return a.confidence > b.confidence;
                     if (a.y != b.y) return a.y < b.y;
                     return a.x < b.x;
                   });
  if (static_cast<int>(out.points.size()) > max_points)
    out.points.resize(static_cast<std::size_t>(max_points));
  return out;
}

// ---------------------------------------------------------------------------
// Histogram classifier

HistFeature color_histogram_feature(const ImageBuffer& image) {
  image.validate();
  HistFeature f{};
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const float v = image.pixels[3 * i + static_cast<std::size_t>(c)];
      int bin = static_cast<int>(v * kHistogramBins);
      bin = std::clamp(bin, 0, kHistogramBins - 1);
      f[static_cast<std::size_t>(c * kHistogramBins + bin)] += 1.0;
    }
  }
  for (auto& v : f) v /= static_cast<double>(n);
  return f;
}

Classification hist_classify(const ImageBuffer& image, const HistClassifierModel& model) {
  if (model.prototypes.empty()) throw EmptyModel("hist_classify: untrained model");
  const HistFeature f = color_histogram_feature(image);

  std::vector<double> scores(model.prototypes.size());
  for (std::size_t k = 0; k < model.prototypes.size(); ++k) {
    double d2 = 0.0;
    for (int i = 0; i < kFeatureDim; ++i) {
      const double d = f[static_cast<std::size_t>(i)] - model.prototypes[k][static_cast<std::size_t>(i)];
      d2 += d * d;
    }
    scores[k] = -std::sqrt(d2) / model.temperature;
  }

  const double peak = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  Classification out;
  out.probs.resize(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out.probs[k] = std::exp(scores[k] - peak);
    total += out.probs[k];
  }
  for (auto& p : out.probs) p /= total;
  return out;
}

HistClassifierModel train_hist_classifier(const std::vector<LabeledImageSet>& classes) {
  if (classes.empty()) throw EmptyModel("train_hist_classifier: no classes");

  std::map<std::string, std::vector<const ImageBuffer*>> by_label;
  for (const auto& cls : classes)
    by_label[cls.label].insert(by_label[cls.label].end(), cls.images.begin(), cls.images.end());

  HistClassifierModel model;
  for (const auto& [label, images] : by_label) {
    if (images.empty()) throw EmptyClass("train_hist_classifier: class '" + label + "' is empty");
    HistFeature proto{};
    for (const ImageBuffer* img : images) {
      const HistFeature f = color_histogram_feature(*img);
      for (int i = 0; i < kFeatureDim; ++i) proto[static_cast<std::size_t>(i)] += f[static_cast<std::size_t>(i)];
    }
    for (auto& v : proto) v /= static_cast<double>(images.size());
    model.labels.push_back(label);
    model.prototypes.push_back(proto);
  }
  return model;
}

// ---------------------------------------------------------------------------
// In-process reference SUTs

RefDetectSut::RefDetectSut(std::string name, int max_points) {
  desc_ = SutDescriptor{std::move(name), SutTask::detect, max_points};
  desc_.validate();
}

SutOutput RefDetectSut::run(const ImageBuffer& image) {
  return SutOutput{harris_detect(image, desc_.max_points)};
}

RefClassifySut::RefClassifySut(std::string name, HistClassifierModel model)
    : model_(std::move(model)) {
  desc_ = SutDescriptor{std::move(name), SutTask::classify, 1};
  desc_.validate();
  if (model_.prototypes.empty()) throw EmptyModel("RefClassifySut: untrained model");
}

SutOutput RefClassifySut::run(const ImageBuffer& image) {
  return SutOutput{hist_classify(image, model_)};
}

}  // namespace n2r
