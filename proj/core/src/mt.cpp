// Copyright 2026 the n2r authors
// SPDX-License-Identifier: Apache-2.0
#include "n2r/mt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "n2r/imqual.hpp"
#include "n2r/rng.hpp"

namespace n2r {

void TransformSuite::validate() const {
  // A zero small_shift degenerates tau1/tau2 to a pure re-aim; that is a
  // legal configuration for probing the re-aim in isolation.
  if (small_shift < 0 || large_shift < small_shift)
    throw ConfigError("suite: need 0 <= small_shift <= large_shift");
  if (small_angle < 0 || large_angle < small_angle)
    throw ConfigError("suite: need 0 <= small_angle <= large_angle");
  if (roll_angle < 0) throw ConfigError("suite: negative roll angle");
}

std::vector<PoseTransform> build_suite(const SceneSidecar& sidecar,
                                       const TransformSuite& cfg) {
  cfg.validate();
  if (!(sidecar.diameter > 0))
    throw MissingSidecar("build_suite: sidecar lacks a positive scene diameter");

  const double small = cfg.small_shift * sidecar.diameter;
  const double large = cfg.large_shift * sidecar.diameter;

  std::vector<PoseTransform> suite(7);
  suite[0] = PoseTransform{TauKind::tau0, 0, 0, 0, 0, 0, 0, false};
  suite[1] = PoseTransform{TauKind::tau1, small, 0, 0, 0, 0, 0, true};
  suite[2] = PoseTransform{TauKind::tau2, 0, small, 0, 0, 0, 0, true};
  suite[3] = PoseTransform{TauKind::tau3, large, 0, 0, 0, 0, 0, true};
  suite[4] = PoseTransform{TauKind::tau4, 0, large, 0, 0, 0, 0, true};
  suite[5] = PoseTransform{TauKind::tau5, small, 0, 0, cfg.roll_angle, 0, 0, true};
  suite[6] = PoseTransform{TauKind::tau6, 0, small, 0, cfg.roll_angle, 0, 0, true};
  for (const auto& tau : suite) tau.validate();
  return suite;
}

void CampaignConfig::validate() const {
  render.validate();
  if (width < 16 || height < 16) throw ConfigError("campaign: render resolution too small");
  if (epsilons.empty()) throw ConfigError("campaign: empty epsilon list");
  double prev = 0.0;
  for (double e : epsilons) {
    if (!(e > prev && e < 1.0))
      throw ConfigError("campaign: epsilons must be strictly increasing in (0,1)");
    prev = e;
  }
}

// ---------------------------------------------------------------------------
// Spearman rank correlation

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14;
  constexpr double kTiny = 1e-300;

  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch("spearman: input lengths differ");
  const std::size_t n = x.size();
  if (n < 4) throw TooFewSamples("spearman: need at least 4 samples");

  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);

  const double mean = 0.5 * static_cast<double>(n + 1);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ConstantInput("spearman: an input is constant, rho is undefined");

  double rho = sxy / std::sqrt(sxx * syy);
  rho = std::clamp(rho, -1.0, 1.0);

  SpearmanResult out;
  out.rho = rho;
  if (std::abs(rho) >= 1.0 - 1e-12) {
    out.rho = rho < 0 ? -1.0 : 1.0;
    out.p = 0.0;
    return out;
  }
  const double df = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  out.p = regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return out;
}

// ---------------------------------------------------------------------------
// Campaign

namespace {

struct Outcome {
  bool ok = false;
  SutOutput output;
  std::string error;
};

Outcome evaluate_sut(Sut& sut, const ImageBuffer& image) {
  Outcome out;
  try {
    out.output = run_sut(sut, image);
    out.ok = true;
  } catch (const SutTimeout& e) {
    out.error = e.what();
  } catch (const SutCrashed& e) {
    out.error = e.what();
  }
  return out;
}

std::vector<bool> inc_flags(const std::vector<double>& epsilons, double deviation) {
  std::vector<bool> flags;
  flags.reserve(epsilons.size());
  for (double e : epsilons) flags.push_back(deviation > e);
  return flags;
}

IncRecord failed_record(const std::string& frame, const std::string& sut,
                        const std::string& arm, const std::string& label,
                        const std::string& reason, std::size_t n_eps) {
  IncRecord rec;
  rec.frame = frame;
  rec.sut = sut;
  rec.arm = arm;
  rec.tau_or_mutation = label;
  rec.failed = true;
  rec.fail_reason = reason;
  rec.inc.assign(n_eps, false);
  return rec;
}

IncRecord metric_record(const std::string& frame, const std::string& sut,
                        const std::string& arm, const std::string& label,
                        const MetricValue& value, const std::vector<double>& epsilons) {
  IncRecord rec;
  rec.frame = frame;
  rec.sut = sut;
  rec.arm = arm;
  rec.tau_or_mutation = label;
  rec.metric = value;
  rec.inc = inc_flags(epsilons, value.deviation);
  return rec;
}

}  // namespace

CampaignReport run_campaign(const RadianceField& field, const Dataset& dataset,
                            std::span<Sut* const> suts,
                            const std::vector<PoseTransform>& suite,
                            const std::vector<MutationSpec>& mutations,
                            const CampaignConfig& cfg) {
  cfg.validate();
  field.validate();
  if (suts.empty()) throw ConfigError("run_campaign: no SUTs configured");
  for (Sut* s : suts)
    if (!s) throw ConfigError("run_campaign: null SUT");

  const std::vector<int> eval_frames = dataset.eval_indices();
  if (eval_frames.empty())
    throw InsufficientData("run_campaign: dataset has no eval frames");

  const CameraIntrinsics test_intr = dataset.intrinsics.scaled_to(cfg.width, cfg.height);
  const std::optional<PlaneModel>& plane = dataset.sidecar.plane;

  CampaignReport report;
  report.epsilons = cfg.epsilons;
  report.width = cfg.width;
  report.height = cfg.height;
  report.seed = cfg.seed;
  report.scene_kind = to_string(dataset.scene.kind);
  if (!plane) report.skipped["repeatability"] = "no planar model";

  const std::uint64_t render_base = seed_chain(cfg.seed, "render");
  const std::uint64_t mutate_base = seed_chain(cfg.seed, "mutate");
  const std::size_t n_eps = cfg.epsilons.size();

  // Emits the records for one (frame, sut, arm, label) comparison.
  auto compare = [&](const std::string& frame_id, Sut& sut, const std::string& arm,
                     const std::string& label, const Outcome& ref, const Outcome& other,
                     const std::optional<Mat3>& homography) {
    const std::string& name = sut.descriptor().name;
    if (!ref.ok || !other.ok) {
      report.records.push_back(failed_record(frame_id, name, arm, label,
                                             ref.ok ? other.error : ref.error, n_eps));
      return;
    }
    if (sut.descriptor().task == SutTask::classify) {
      const auto& p = ref.output.classification().probs;
      const auto& q = other.output.classification().probs;
      for (SutMetric m :
           {SutMetric::cosine, SutMetric::l2, SutMetric::class_invariance}) {
        double raw = 0;
        switch (m) {
          case SutMetric::cosine: raw = cosine_similarity(p, q); break;
          case SutMetric::l2: raw = l2_distance(p, q); break;
          default: raw = class_invariance(p, q); break;
        }
        report.records.push_back(
            metric_record(frame_id, name, arm, label, make_metric(m, raw), cfg.epsilons));
      }
    } else {
      const auto& pa = ref.output.interest_points();
      const auto& pb = other.output.interest_points();
      if (homography) {
        const double raw = repeatability(pa, pb, *homography, cfg.width, cfg.height);
        report.records.push_back(metric_record(
            frame_id, name, arm, label, make_metric(SutMetric::repeatability, raw),
            cfg.epsilons));
      }
      const double raw = ip_spread(pa, pb, cfg.width, cfg.height);
      report.records.push_back(metric_record(
          frame_id, name, arm, label, make_metric(SutMetric::ip_spread, raw), cfg.epsilons));
    }
  };

  for (std::size_t fi = 0; fi < eval_frames.size(); ++fi) {
    const int frame_idx = eval_frames[fi];
    const DatasetFrame& frame = dataset.frames[static_cast<std::size_t>(frame_idx)];

    RenderConfig rcfg = cfg.render;
    rcfg.seed = seed_chain(render_base, static_cast<std::uint64_t>(frame_idx));

    report.frames.push_back(frame.id);

    // Images for this frame.
    const ImageBuffer real = raytrace(dataset.scene, test_intr, frame.pose);
    const ImageBuffer nerf = render_image(field, test_intr, frame.pose, rcfg);

    std::vector<CameraPose> tau_poses;
    std::vector<ImageBuffer> tau_renders;
    for (std::size_t k = 1; k < suite.size(); ++k) {
      const CameraPose pose_k = apply_transform(frame.pose, suite[k], dataset.sidecar.lookat);
      tau_poses.push_back(pose_k);
      ImageBuffer img = render_image(field, test_intr, pose_k, rcfg);
      img.provenance = Provenance::transformed;
      tau_renders.push_back(std::move(img));
    }

    std::vector<ImageBuffer> mutated;
    for (std::size_t mi = 0; mi < mutations.size(); ++mi) {
      MutationSpec spec = mutations[mi];
      spec.seed = seed_chain(seed_chain(mutate_base, static_cast<std::uint64_t>(frame_idx)),
                             static_cast<std::uint64_t>(mi));
      mutated.push_back(mutate(real, spec));
    }

    // Image-quality rows: real-vs-render at tau0, ground-truth raytrace
    // vs render at the transformed poses.
    auto push_quality = [&](const std::string& tau, const ImageBuffer& ref,
                            const ImageBuffer& img) {
      ImageQualityRow row;
      row.frame = frame.id;
      row.tau = tau;
      const double v = psnr(ref, img);
      row.psnr_infinite = std::isinf(v);
      row.psnr = v;
      row.ssim = ssim(ref, img);
      report.image_quality.push_back(row);
    };
    push_quality("tau0", real, nerf);
    for (std::size_t k = 1; k < suite.size(); ++k) {
      const ImageBuffer gt = raytrace(dataset.scene, test_intr, tau_poses[k - 1]);
      push_quality(to_string(suite[k].kind), gt, tau_renders[k - 1]);
    }

    // Homographies between the original pose and each transformed pose.
    std::vector<std::optional<Mat3>> tau_h(suite.size(), std::nullopt);
    std::vector<std::string> tau_h_error(suite.size());
    if (plane) {
      tau_h[0] = Mat3::Identity();
      for (std::size_t k = 1; k < suite.size(); ++k) {
        try {
          tau_h[k] = plane_homography(test_intr, frame.pose, tau_poses[k - 1], *plane);
        } catch (const Error& e) {
          tau_h_error[k] = e.what();
        }
      }
    }

    for (Sut* sut : suts) {
      const Outcome on_real = evaluate_sut(*sut, real);
      const Outcome on_nerf = evaluate_sut(*sut, nerf);

      // Domain shift: real vs render at the identical pose.
      compare(frame.id, *sut, "shift", "tau0", on_real, on_nerf,
              plane ? std::optional<Mat3>(Mat3::Identity()) : std::nullopt);

      // Transform arm; tau0 reuses the render output and is consistent by
      // construction.
      for (std::size_t k = 0; k < suite.size(); ++k) {
        const std::string label = to_string(suite[k].kind);
        if (k == 0) {
          compare(frame.id, *sut, "transform", label, on_nerf, on_nerf, tau_h[0]);
          continue;
        }
        if (plane && !tau_h[k] && sut->descriptor().task == SutTask::detect) {
          report.records.push_back(failed_record(
              frame.id, sut->descriptor().name, "transform", label,
              "homography unavailable: " + tau_h_error[k], n_eps));
          continue;
        }
        const Outcome on_tau = evaluate_sut(*sut, tau_renders[k - 1]);
        compare(frame.id, *sut, "transform", label, on_nerf, on_tau, tau_h[k]);
      }

      for (std::size_t mi = 0; mi < mutations.size(); ++mi) {
        MutationSpec spec = mutations[mi];
        const Outcome on_mut = evaluate_sut(*sut, mutated[mi]);
        compare(frame.id, *sut, "mutation", spec.id(), on_real, on_mut,
                plane ? std::optional<Mat3>(Mat3::Identity()) : std::nullopt);
      }
    }
  }

  for (const auto& rec : report.records)
    if (rec.failed) ++report.failed_records;
  report.counts = count_inconsistencies(report.records, report.epsilons);
  report.correlations = correlation_table(report);
  return report;
}

// ---------------------------------------------------------------------------
// Aggregation and analysis

std::vector<CountRow> count_inconsistencies(const std::vector<IncRecord>& records,
                                            const std::vector<double>& epsilons) {
  using Key = std::tuple<std::string, std::string, std::string, std::string>;
  std::map<Key, std::vector<int>> acc;
  for (const auto& rec : records) {
    if (rec.failed || !rec.metric) continue;
    const Key key{rec.sut, rec.arm, rec.tau_or_mutation, to_string(rec.metric->metric)};
    auto& counts = acc[key];
    counts.resize(epsilons.size(), 0);
    for (std::size_t e = 0; e < epsilons.size() && e < rec.inc.size(); ++e)
      if (rec.inc[e]) ++counts[e];
  }

  std::vector<CountRow> rows;
  for (const auto& [key, counts] : acc)
    for (std::size_t e = 0; e < epsilons.size(); ++e)
      rows.push_back(CountRow{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                              std::get<3>(key), epsilons[e],
                              e < counts.size() ? counts[e] : 0});
  return rows;
}

std::vector<CorrelationCell> correlation_table(const CampaignReport& report) {
  // Image metric values per frame from the tau0 (domain shift) rows.
  std::map<std::string, double> psnr_by_frame, ssim_by_frame;
  for (const auto& row : report.image_quality) {
    if (row.tau != "tau0") continue;
    psnr_by_frame[row.frame] =
        row.psnr_infinite ? std::numeric_limits<double>::infinity() : row.psnr;
    ssim_by_frame[row.frame] = row.ssim;
  }
  if (psnr_by_frame.empty())
    throw InsufficientData("correlation_table: report has no tau0 image-quality rows");

  // SUT metric raw values per frame from the shift arm.
  using Key = std::pair<std::string, std::string>;  // sut, metric
  std::map<Key, std::map<std::string, double>> shift_values;
  for (const auto& rec : report.records) {
    if (rec.arm != "shift" || rec.failed || !rec.metric) continue;
    shift_values[{rec.sut, to_string(rec.metric->metric)}][rec.frame] = rec.metric->raw;
  }
  if (shift_values.empty())
    throw InsufficientData("correlation_table: report has no domain-shift records");

  std::vector<CorrelationCell> cells;
  for (const auto& [key, by_frame] : shift_values) {
    for (const std::string& image_metric : {std::string("psnr"), std::string("ssim"),
                                            std::string("lpips")}) {
      CorrelationCell cell;
      cell.sut = key.first;
      cell.sut_metric = key.second;
      cell.image_metric = image_metric;

      if (image_metric == "lpips") {
        cell.flag = "unavailable";
        cells.push_back(cell);
        continue;
      }
      const auto& img_map = image_metric == "psnr" ? psnr_by_frame : ssim_by_frame;
      std::vector<double> xs, ys;
      for (const auto& [frame, raw] : by_frame) {
        const auto it = img_map.find(frame);
        if (it == img_map.end()) continue;
        xs.push_back(raw);
        ys.push_back(it->second);
      }
      cell.n = static_cast<int>(xs.size());
      if (cell.n < 4) {
        cell.flag = "insufficient_data";
        cells.push_back(cell);
        continue;
      }
      try {
        const SpearmanResult r = spearman(xs, ys);
        cell.rho = r.rho;
        cell.p = r.p;
        cell.significant = r.p <= 0.05;
      } catch (const ConstantInput&) {
        cell.flag = "constant_input";
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Serialization

using nlohmann::json;

namespace {

json metric_to_json(const IncRecord& rec) {
  if (!rec.metric) return nullptr;
  return to_string(rec.metric->metric);
}

std::string epsilon_column(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eps);
  std::string s = "inc_";
  for (const char* p = buf; *p; ++p)
    if (*p != '.') s.push_back(*p);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

json report_to_json(const CampaignReport& report) {
  json doc;
  doc["epsilons"] = report.epsilons;
  doc["resolution"] = {{"width", report.width}, {"height", report.height}};
  doc["seed"] = report.seed;
  doc["scene"] = report.scene_kind;
  doc["frames"] = report.frames;
  doc["failed_records"] = report.failed_records;
  doc["lpips_available"] = false;
  doc["skipped"] = report.skipped;

  doc["records"] = json::array();
  for (const auto& rec : report.records) {
    json r = {{"frame", rec.frame},
              {"sut", rec.sut},
              {"arm", rec.arm},
              {"tau_or_mutation", rec.tau_or_mutation},
              {"failed", rec.failed},
              {"metric", metric_to_json(rec)},
              {"raw", rec.metric ? json(rec.metric->raw) : json(nullptr)},
              {"deviation", rec.metric ? json(rec.metric->deviation) : json(nullptr)},
              {"inc", rec.inc}};
    if (rec.failed) r["reason"] = rec.fail_reason;
    doc["records"].push_back(std::move(r));
  }

  doc["image_quality"] = json::array();
  for (const auto& row : report.image_quality) {
    doc["image_quality"].push_back(
        {{"frame", row.frame},
         {"tau", row.tau},
         {"psnr", row.psnr_infinite ? json(nullptr) : json(row.psnr)},
         {"psnr_infinite", row.psnr_infinite},
         {"ssim", row.ssim},
         {"lpips", nullptr}});
  }

  doc["counts"] = json::array();
  for (const auto& row : report.counts) {
    doc["counts"].push_back({{"sut", row.sut},
                             {"arm", row.arm},
                             {"tau_or_mutation", row.tau_or_mutation},
                             {"metric", row.metric},
                             {"epsilon", row.epsilon},
                             {"count", row.count}});
  }

  doc["correlations"] = json::array();
  for (const auto& cell : report.correlations) {
    doc["correlations"].push_back({{"sut", cell.sut},
                                   {"sut_metric", cell.sut_metric},
                                   {"image_metric", cell.image_metric},
                                   {"rho", cell.rho},
                                   {"p", cell.p},
                                   {"significant", cell.significant},
                                   {"n", cell.n},
                                   {"flag", cell.flag}});
  }
  return doc;
}

CampaignReport report_from_json(const json& doc) {
  CampaignReport report;
  report.epsilons = doc.at("epsilons").get<std::vector<double>>();
  report.width = doc.at("resolution").at("width").get<int>();
  report.height = doc.at("resolution").at("height").get<int>();
  report.seed = doc.at("seed").get<std::uint64_t>();
  report.scene_kind = doc.at("scene").get<std::string>();
  report.frames = doc.at("frames").get<std::vector<std::string>>();
  report.failed_records = doc.at("failed_records").get<int>();
  if (doc.contains("skipped"))
    report.skipped = doc.at("skipped").get<std::map<std::string, std::string>>();

  auto metric_from_string = [](const std::string& s) {
    for (SutMetric m : {SutMetric::cosine, SutMetric::l2, SutMetric::class_invariance,
                        SutMetric::repeatability, SutMetric::ip_spread})
      if (to_string(m) == s) return m;
    throw IoFailure("unknown metric in report: " + s);
  };

  for (const auto& r : doc.at("records")) {
    IncRecord rec;
    rec.frame = r.at("frame").get<std::string>();
    rec.sut = r.at("sut").get<std::string>();
    rec.arm = r.at("arm").get<std::string>();
    rec.tau_or_mutation = r.at("tau_or_mutation").get<std::string>();
    rec.failed = r.at("failed").get<bool>();
    if (rec.failed && r.contains("reason")) rec.fail_reason = r.at("reason").get<std::string>();
    if (!r.at("metric").is_null()) {
      MetricValue mv;
      mv.metric = metric_from_string(r.at("metric").get<std::string>());
      mv.raw = r.at("raw").get<double>();
      mv.deviation = r.at("deviation").get<double>();
      rec.metric = mv;
    }
    rec.inc = r.at("inc").get<std::vector<bool>>();
    report.records.push_back(std::move(rec));
  }

  for (const auto& r : doc.at("image_quality")) {
    ImageQualityRow row;
    row.frame = r.at("frame").get<std::string>();
    row.tau = r.at("tau").get<std::string>();
    row.psnr_infinite = r.at("psnr_infinite").get<bool>();
    row.psnr = row.psnr_infinite ? std::numeric_limits<double>::infinity()
                                 : r.at("psnr").get<double>();
    row.ssim = r.at("ssim").get<double>();
    report.image_quality.push_back(std::move(row));
  }

  for (const auto& r : doc.at("counts")) {
    report.counts.push_back(CountRow{r.at("sut").get<std::string>(),
                                     r.at("arm").get<std::string>(),
                                     r.at("tau_or_mutation").get<std::string>(),
                                     r.at("metric").get<std::string>(),
                                     r.at("epsilon").get<double>(),
                                     r.at("count").get<int>()});
  }

  for (const auto& r : doc.at("correlations")) {
    report.correlations.push_back(CorrelationCell{
        r.at("sut").get<std::string>(), r.at("sut_metric").get<std::string>(),
        r.at("image_metric").get<std::string>(), r.at("rho").get<double>(),
        r.at("p").get<double>(), r.at("significant").get<bool>(), r.at("n").get<int>(),
        r.at("flag").get<std::string>()});
  }
  return report;
}

std::string report_csv(const CampaignReport& report) {
  std::ostringstream out;
  out << "frame,sut,arm,tau_or_mutation,metric,raw,deviation";
  for (double e : report.epsilons) out << "," << epsilon_column(e);
  out << ",failed\n";

  for (const auto& rec : report.records) {
    out << rec.frame << "," << rec.sut << "," << rec.arm << "," << rec.tau_or_mutation << ",";
    if (rec.metric)
      out << to_string(rec.metric->metric) << "," << format_double(rec.metric->raw) << ","
          << format_double(rec.metric->deviation);
    else
      out << ",,";
    for (std::size_t e = 0; e < report.epsilons.size(); ++e)
      out << "," << (e < rec.inc.size() && rec.inc[e] ? 1 : 0);
    out << "," << (rec.failed ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string counts_text_table(const CampaignReport& report) {
  // One line per (sut, arm, tau, metric) with a column per epsilon.
  struct Line {
    std::string sut, arm, tau, metric;
    std::vector<int> counts;
  };
  std::map<std::tuple<std::string, std::string, std::string, std::string>, Line> lines;
  for (const auto& row : report.counts) {
    auto& line = lines[{row.sut, row.arm, row.tau_or_mutation, row.metric}];
    line.sut = row.sut;
    line.arm = row.arm;
    line.tau = row.tau_or_mutation;
    line.metric = row.metric;
    line.counts.resize(report.epsilons.size(), 0);
    for (std::size_t e = 0; e < report.epsilons.size(); ++e)
      if (report.epsilons[e] == row.epsilon)
        line.counts[e] = row.count;
  }

  std::size_t w_sut = 3, w_arm = 3, w_tau = 3, w_metric = 6;
  for (const auto& [_, line] : lines) {
    w_sut = std::max(w_sut, line.sut.size());
    w_arm = std::max(w_arm, line.arm.size());
    w_tau = std::max(w_tau, line.tau.size());
    w_metric = std::max(w_metric, line.metric.size());
  }

  std::ostringstream out;
  auto pad = [&out](const std::string& s, std::size_t w) {
    out << s;
    for (std::size_t i = s.size(); i < w + 2; ++i) out << ' ';
  };
  pad("sut", w_sut);
  pad("arm", w_arm);
  pad("tau", w_tau);
  pad("metric", w_metric);
  for (double e : report.epsilons) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "e=%g", e);
    out << buf << "  ";
  }
  out << "\n";
  for (const auto& [_, line] : lines) {
    pad(line.sut, w_sut);
    pad(line.arm, w_arm);
    pad(line.tau, w_tau);
    pad(line.metric, w_metric);
    for (std::size_t e = 0; e < report.epsilons.size(); ++e) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%5d", e < line.counts.size() ? line.counts[e] : 0);
      out << buf << "  ";
    }
    out << "\n";
  }
  return out.str();
}

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoFailure("cannot write: " + tmp.string());
    out << content;
    if (!out) throw IoFailure("short write: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoFailure("cannot rename " + tmp.string() + " -> " + path.string());
}

}  // namespace

void write_report_files(const std::filesystem::path& dir, const CampaignReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  atomic_write(dir / "report.json", report_to_json(report).dump(2) + "\n");
  atomic_write(dir / "report.csv", report_csv(report));
  atomic_write(dir / "summary.txt", counts_text_table(report));
}

}  // namespace n2r
