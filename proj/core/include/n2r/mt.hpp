// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "n2r/field.hpp"
#include "n2r/mutate.hpp"
#include "n2r/sutmetrics.hpp"
#include "n2r/suts.hpp"
#include "n2r/synthscene.hpp"

namespace n2r {

// Magnitudes of the pose transformation suite. Shifts are fractions of
// the scene diameter; angles are radians. small_angle/large_angle are kept
// for hand-built suites that perturb yaw/pitch explicitly instead of
// re-aiming.
struct TransformSuite {
  double small_shift = 0.05;
  double large_shift = 0.15;
  double small_angle = 2.0 * M_PI / 180.0;
  double large_angle = 6.0 * M_PI / 180.0;
  double roll_angle = 5.0 * M_PI / 180.0;

  void validate() const;
};

// The seven standard transformations:
//   tau0 identity; tau1/tau2 small shift along camera x/y with re-aim;
//   tau3/tau4 the large variants; tau5/tau6 = tau1/tau2 plus a roll.
// Re-aiming at the scene look-at point realizes the compensating yaw
// (lateral shifts) and pitch (vertical shifts) that keep the subject
// framed.
std::vector<PoseTransform> build_suite(const SceneSidecar& sidecar,
                                       const TransformSuite& cfg = {});

// ---------------------------------------------------------------------------

// One evaluated metamorphic relation (or one failed SUT evaluation).
struct IncRecord {
  std::string frame;
  std::string sut;
  std::string arm;              // "shift" | "transform" | "mutation"
  std::string tau_or_mutation;  // "tau0".."tau6" or a mutation id
  bool failed = false;
  std::string fail_reason;
  std::optional<MetricValue> metric;
  std::vector<bool> inc;  // deviation > eps, aligned with the epsilon list
};

struct ImageQualityRow {
  std::string frame;
  std::string tau;
  double psnr = 0;
  bool psnr_infinite = false;
  double ssim = 0;
  // lpips is reserved in the schema but unavailable in this build; values
  // from an external evaluator can be merged into the JSON later.
};

struct CountRow {
  std::string sut;
  std::string arm;
  std::string tau_or_mutation;
  std::string metric;
  double epsilon = 0;
  int count = 0;
};

struct SpearmanResult {
  double rho = 0;
  double p = 1;
};

struct CorrelationCell {
  std::string sut;
  std::string sut_metric;
  std::string image_metric;  // psnr | ssim | lpips
  double rho = 0;
  double p = 1;
  bool significant = false;
  int n = 0;
  std::string flag;  // "" | "constant_input" | "unavailable" | "insufficient_data"
};

struct CampaignConfig {
  RenderConfig render;
  std::vector<double> epsilons{0.1, 0.2, 0.5};
  int width = 480;
  int height = 270;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CampaignReport {
  std::vector<double> epsilons;
  int width = 0;
  int height = 0;
  std::uint64_t seed = 0;
  std::string scene_kind;
  std::vector<std::string> frames;  // eval frame ids, campaign order
  std::vector<IncRecord> records;
  std::vector<ImageQualityRow> image_quality;
  std::vector<CountRow> counts;
  std::vector<CorrelationCell> correlations;
  std::map<std::string, std::string> skipped;  // metric -> reason
  int failed_records = 0;
};

// Runs the full campaign over the dataset's eval frames. Per frame it
// renders the field at the original pose (i_nerf) and at every transformed
// pose (i_tau), raytraces ground truth at those poses, and evaluates every
// SUT on the real image, the renders, and the mutated real images.
//
// Record arms:
//   shift     f(i_real)  vs f(i_nerf)  -- the reality-to-render domain
//             shift, labeled tau0 (the transform-arm tau0 compares the
//             render with itself and is zero by construction)
//   transform f(i_nerf)  vs f(i_tau)   for every tau in the suite
//   mutation  f(i_real)  vs f(mutate(i_real))
//
// Repeatability uses the analytic plane homography between the two poses
// and is skipped (with reason) for scenes without a planar model. SUT
// crashes/timeouts mark the affected record failed without aborting.
CampaignReport run_campaign(const RadianceField& field, const Dataset& dataset,
                            std::span<Sut* const> suts,
                            const std::vector<PoseTransform>& suite,
                            const std::vector<MutationSpec>& mutations,
                            const CampaignConfig& cfg);

// Tie-corrected Spearman rank correlation with a two-sided p-value from
// the t-approximation t = rho sqrt((n-2)/(1-rho^2)); rho = +-1 gives p = 0.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b); exposed for the statistics tests.
double regularized_incomplete_beta(double a, double b, double x);

// (sut metric) x (psnr, ssim, lpips) Spearman table over the domain-shift
// rows, significance at p <= 0.05.
std::vector<CorrelationCell> correlation_table(const CampaignReport& report);

// Inconsistency counts per (sut, arm, tau_or_mutation, metric, epsilon),
// a pure aggregation over the non-failed records.
std::vector<CountRow> count_inconsistencies(const std::vector<IncRecord>& records,
                                            const std::vector<double>& epsilons);

nlohmann::json report_to_json(const CampaignReport& report);
CampaignReport report_from_json(const nlohmann::json& j);
std::string report_csv(const CampaignReport& report);
std::string counts_text_table(const CampaignReport& report);

// Writes report.json, report.csv and summary.txt; each file is written to
// a temporary name and atomically renamed.
void write_report_files(const std::filesystem::path& dir, const CampaignReport& report);

}  // namespace n2r
