// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "n2r/image.hpp"

namespace n2r {

struct InterestPoint {
  double x = 0;
  double y = 0;
  double confidence = 0;
};

struct Classification {
  std::vector<double> probs;  // >= 0, sums to 1
};

struct InterestPoints {
  std::vector<InterestPoint> points;  // sorted by confidence, descending
};

struct SutOutput {
  std::variant<Classification, InterestPoints> value;

  bool is_classification() const { return std::holds_alternative<Classification>(value); }
  const Classification& classification() const { return std::get<Classification>(value); }
  const InterestPoints& interest_points() const { return std::get<InterestPoints>(value); }
};

enum class SutTask { classify, detect };

std::string to_string(SutTask t);

struct SutDescriptor {
  std::string name;
  SutTask task = SutTask::detect;
  int max_points = 100;  // detect only: keep the highest-confidence points

  void validate() const;
};

// A system under test: anything that maps an image to a classification or
// an interest point set.
class Sut {
 public:
  virtual ~Sut() = default;
  virtual const SutDescriptor& descriptor() const = 0;
  virtual SutOutput run(const ImageBuffer& image) = 0;
};

// Runs the SUT and enforces the output contract: probabilities normalized
// and summing to 1 within 1e-6, points inside the image and sorted by
// confidence, detect outputs truncated to max_points. Contract violations
// from external SUTs surface as SutCrashed.
SutOutput run_sut(Sut& sut, const ImageBuffer& image);

// ---------------------------------------------------------------------------
// Reference interest point detector: Harris corners.
// luma -> Sobel gradients -> structure tensor smoothed with a Gaussian
// (sigma 1.5) -> response det - 0.04 trace^2 -> 3x3 non-maximum
// suppression -> top max_points, integer coordinates. Ties break toward
// lower (y, x).
InterestPoints harris_detect(const ImageBuffer& image, int max_points);

// Response map exposed for inspection; same pipeline minus NMS/ranking.
std::vector<double> harris_response(const ImageBuffer& image);

// ---------------------------------------------------------------------------
// Reference classifier: nearest color-histogram prototype with a softmax
// over negative distances.

inline constexpr int kHistogramBins = 8;
inline constexpr int kFeatureDim = 3 * kHistogramBins;

using HistFeature = std::array<double, kFeatureDim>;

// Per-channel 8-bin histogram, each channel block normalized to sum 1.
HistFeature color_histogram_feature(const ImageBuffer& image);

struct HistClassifierModel {
  std::vector<std::string> labels;  // lexicographic order
  std::vector<HistFeature> prototypes;
  double temperature = 0.05;
};

// probs_k = softmax(-|feature - prototype_k| / temperature).
Classification hist_classify(const ImageBuffer& image, const HistClassifierModel& model);

struct LabeledImageSet {
  std::string label;
  std::vector<const ImageBuffer*> images;
};

// Prototype = mean feature per class; class order is lexicographic by label.
HistClassifierModel train_hist_classifier(const std::vector<LabeledImageSet>& classes);

// ---------------------------------------------------------------------------
// In-process reference SUTs.

class RefDetectSut final : public Sut {
 public:
  explicit RefDetectSut(std::string name = "harris", int max_points = 100);
  const SutDescriptor& descriptor() const override { return desc_; }
  SutOutput run(const ImageBuffer& image) override;

 private:
  SutDescriptor desc_;
};

class RefClassifySut final : public Sut {
 public:
  RefClassifySut(std::string name, HistClassifierModel model);
  const SutDescriptor& descriptor() const override { return desc_; }
  SutOutput run(const ImageBuffer& image) override;

 private:
  SutDescriptor desc_;
  HistClassifierModel model_;
};

// ---------------------------------------------------------------------------
// External SUT subprocess protocol. The harness spawns the command and
// exchanges one JSON line per request on the child's stdin/stdout:
//   -> {"id": n, "task": "classify"|"detect", "width": w, "height": h,
//       "pixels_b64": <base64 of raw RGB8, row-major>}
//   <- {"id": n, "probs": [...]} or {"id": n, "points": [[x, y, conf], ...]}
// A malformed or mismatched reply raises SutCrashed; a reply not arriving
// within the timeout raises SutTimeout.
class ExternalSut final : public Sut {
 public:
  ExternalSut(std::string name, SutTask task, std::string command,
              double timeout_seconds = 30.0, int max_points = 100);
  ~ExternalSut() override;

  ExternalSut(const ExternalSut&) = delete;
  ExternalSut& operator=(const ExternalSut&) = delete;

  const SutDescriptor& descriptor() const override { return desc_; }
  SutOutput run(const ImageBuffer& image) override;

 private:
  struct Process;
  void ensure_running();

  SutDescriptor desc_;
  std::string command_;
  double timeout_seconds_;
  std::uint64_t next_id_ = 0;
  std::unique_ptr<Process> process_;
};

std::string base64_encode(const std::uint8_t* data, std::size_t len);

}  // namespace n2r
