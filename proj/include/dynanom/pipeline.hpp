#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynanom/detector.hpp"
#include "dynanom/errors.hpp"
#include "dynanom/features.hpp"
#include "dynanom/flow.hpp"
#include "dynanom/io.hpp"
#include "dynanom/measures.hpp"
#include "dynanom/pl_learning.hpp"
#include "dynanom/pl_refinement.hpp"

namespace dynanom {

struct EstimateResult {
  io::Model model;
  SymbolAlphabet alphabet;
  std::size_t flow_count = 0;
  std::size_t dropped_outside_horizon = 0;
  std::size_t window_count = 0;
  std::size_t eligible_window_count = 0;
  std::array<PeriodEstimate, 4> feature_estimates;
  std::vector<PeriodPair> pairs;
  std::size_t candidate_count_free = 0;
  std::size_t candidate_count_based = 0;
  std::size_t empty_segments = 0;
  Selection selection_free;
  Selection selection_based;
  io::FamilyFile family;
};

// Full reference-learning pass: cluster IPs, fit quantizers, window the
// symbol stream, estimate per-feature periods, pool candidate PLs, refine
// each family by regularized set cover over the dense reference windows,
// and attach the single-PL baselines.
inline EstimateResult run_estimate(std::span<const Flow> flows,
                                   const io::RunConfig& cfg) {
  if (flows.empty()) throw EmptyReferenceError("no reference flows");

  EstimateResult r;
  r.flow_count = flows.size();

  std::vector<Ipv4> ips;
  ips.reserve(flows.size());
  for (const Flow& f : flows) ips.push_back(f.user_ip);
  r.model.clusters =
      fit_ip_clusters(ips, cfg.features.cluster_count, cfg.features.cluster_seed);
  r.model.quantizer = fit_quantizer(
      flows, r.model.clusters,
      {cfg.features.distance_levels, cfg.features.size_levels,
       cfg.features.duration_levels});
  r.alphabet = r.model.alphabet();

  std::vector<QuantizedFlow> quantized =
      quantize_flows(flows, r.model.clusters, r.model.quantizer);
  for (const QuantizedFlow& q : quantized)
    if (q.start_time_s < cfg.horizon_begin_s ||
        q.start_time_s >= cfg.horizon_end_s)
      ++r.dropped_outside_horizon;

  std::vector<SymbolWindow> windows = aggregate_windows(
      std::span<const QuantizedFlow>(quantized), cfg.windowing,
      cfg.horizon_begin_s, cfg.horizon_end_s);
  r.window_count = windows.size();

  std::vector<Channel> channels = extract_channels(quantized, r.alphabet);
  for (std::uint32_t f = 1; f <= 4; ++f) {
    std::vector<PeriodEstimate> per_channel;
    for (const Channel& ch : channels)
      if (ch.feature == f)
        per_channel.push_back(estimate_channel_period(ch, cfg.histogram));
    r.feature_estimates[f - 1] = estimate_feature_period(per_channel);
  }
  r.pairs = collect_period_pairs(r.feature_estimates, cfg.priors);

  CandidateFamilies candidates = generate_candidate_pls(
      quantized, r.alphabet, cfg.horizon_begin_s, r.pairs);
  r.candidate_count_free = candidates.model_free.size();
  r.candidate_count_based = candidates.model_based.size();
  r.empty_segments = candidates.empty_segments;

  std::vector<ModelFreeMeasure> free_measures;
  std::vector<ModelBasedMeasure> based_measures;
  for (const SymbolWindow& w : windows) {
    if (w.items.size() < cfg.detection.min_flows_per_window) continue;
    auto items = std::span<const QuantizedFlow>(w.items);
    free_measures.push_back(model_free_measure(items, r.alphabet.total()));
    based_measures.push_back(model_based_measure(items, r.alphabet.total()));
  }
  r.eligible_window_count = free_measures.size();
  if (free_measures.empty())
    throw EmptyReferenceError(
        "no reference window reaches min_flows_per_window");

  CoverageProblem cover_free = build_coverage(
      std::span<const ModelFreeMeasure>(free_measures), candidates.model_free,
      cfg.detection.lambda_free, cfg.divergence);
  r.selection_free = heuristic_refine(cover_free, cfg.refinement);

  CoverageProblem cover_based = build_coverage(
      std::span<const ModelBasedMeasure>(based_measures),
      candidates.model_based, cfg.detection.lambda_based, cfg.divergence);
  r.selection_based = heuristic_refine(cover_based, cfg.refinement);

  r.family.alphabet_size = r.alphabet.total();
  r.family.lambda_free = cfg.detection.lambda_free;
  r.family.lambda_based = cfg.detection.lambda_based;
  r.family.model_free =
      subset_family(candidates.model_free, r.selection_free, cover_free.c_v);
  r.family.model_based = subset_family(candidates.model_based,
                                       r.selection_based, cover_based.c_v);
  auto [vf, vb] = single_pl_family(quantized, r.alphabet.total());
  r.family.vanilla_free = std::move(vf);
  r.family.vanilla_based = std::move(vb);
  return r;
}

inline io::json estimate_report_json(const EstimateResult& r) {
  using io::json;
  auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  json estimates = json::object();
  for (std::size_t f = 0; f < 4; ++f)
    estimates["feature_" + std::to_string(f + 1)] = {
        {"quiet_threshold_s", opt(r.feature_estimates[f].quiet_threshold_s)},
        {"period_s", opt(r.feature_estimates[f].period_s)}};
  json pairs = json::array();
  for (const PeriodPair& p : r.pairs)
    pairs.push_back({{"label", p.label},
                     {"quiet_threshold_s", p.quiet_threshold_s},
                     {"period_s", p.period_s}});
  auto method = [&](const Selection& sel, std::size_t candidates,
                    double lambda, const auto& family) {
    json selected = json::array();
    for (std::size_t i = 0; i < family.pls.size(); ++i)
      selected.push_back(
          {{"c_v", family.c_v[i]},
           {"provenance", io::provenance_to_json(family.provenance[i])}});
    return json{{"lambda", lambda},
                {"candidate_count", candidates},
                {"selected_count", sel.primary_cost},
                {"secondary_cost", sel.secondary_cost},
                {"selected", selected}};
  };
  return {{"flow_count", r.flow_count},
          {"dropped_flows_outside_horizon", r.dropped_outside_horizon},
          {"window_count", r.window_count},
          {"eligible_window_count", r.eligible_window_count},
          {"empty_segments", r.empty_segments},
          {"period_estimates", estimates},
          {"period_pairs", pairs},
          {"model_free", method(r.selection_free, r.candidate_count_free,
                                r.family.lambda_free, r.family.model_free)},
          {"model_based", method(r.selection_based, r.candidate_count_based,
                                 r.family.lambda_based,
                                 r.family.model_based)}};
}

struct DetectOptions {
  bool vanilla = false;
  bool run_free = true;
  bool run_based = true;
  std::optional<double> lambda_free;   // overrides the family file value
  std::optional<double> lambda_based;
};

inline std::vector<WindowVerdict> run_detect(std::span<const Flow> flows,
                                             const io::Model& model,
                                             const io::FamilyFile& family,
                                             const io::RunConfig& cfg,
                                             const DetectOptions& opt = {}) {
  std::vector<QuantizedFlow> quantized =
      quantize_flows(flows, model.clusters, model.quantizer);
  std::vector<SymbolWindow> windows = aggregate_windows(
      std::span<const QuantizedFlow>(quantized), cfg.windowing,
      cfg.horizon_begin_s, cfg.horizon_end_s);

  DetectionConfig det = cfg.detection;
  det.lambda_free = opt.lambda_free.value_or(family.lambda_free);
  det.lambda_based = opt.lambda_based.value_or(family.lambda_based);

  const ModelFreeFamily* ff =
      opt.run_free ? (opt.vanilla ? &family.vanilla_free : &family.model_free)
                   : nullptr;
  const ModelBasedFamily* bf =
      opt.run_based
          ? (opt.vanilla ? &family.vanilla_based : &family.model_based)
          : nullptr;
  if (ff && !ff->pls.empty() &&
      ff->pls[0].alphabet_size() != model.alphabet().total())
    throw AlphabetMismatchError("family alphabet != model alphabet");
  if (bf && !bf->pls.empty() && bf->pls[0].alphabet != model.alphabet().total())
    throw AlphabetMismatchError("family alphabet != model alphabet");
  return detect(windows, ff, bf, det, cfg.divergence);
}

struct MethodMetrics {
  std::string method;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;
  double false_alarm_rate = 0;  // FP / (FP + TN)

  struct AnomalyOutcome {
    std::string id;
    bool detected = false;
    std::vector<std::size_t> alarmed_windows;
  };
  std::vector<AnomalyOutcome> anomalies;
};

// Scores a timeline against ground truth. A window is positive iff
// [start, start + window_size) overlaps any truth interval; windows
// without a verdict for the method count as non-alarms.
inline MethodMetrics evaluate_timeline(std::span<const WindowVerdict> timeline,
                                       const GroundTruth& truth,
                                       double window_size_s,
                                       bool model_based_method) {
  MethodMetrics m;
  m.method = model_based_method ? "based" : "free";
  for (const auto& e : truth.entries) m.anomalies.push_back({e.id, false, {}});

  for (const WindowVerdict& v : timeline) {
    double end = v.start_s + window_size_s;
    bool alarm = model_based_method ? v.alarm_based : v.alarm_free;
    bool positive = false;
    for (std::size_t a = 0; a < truth.entries.size(); ++a) {
      const auto& e = truth.entries[a];
      if (v.start_s < e.end_s && e.start_s < end) {
        positive = true;
        if (alarm) {
          m.anomalies[a].detected = true;
          m.anomalies[a].alarmed_windows.push_back(v.window_index);
        }
      }
    }
    if (positive && alarm) ++m.true_positive;
    else if (positive) ++m.false_negative;
    else if (alarm) ++m.false_positive;
    else ++m.true_negative;
  }
  std::size_t negatives = m.false_positive + m.true_negative;
  m.false_alarm_rate =
      negatives ? static_cast<double>(m.false_positive) /
                      static_cast<double>(negatives)
                : 0.0;
  return m;
}

inline io::json metrics_to_json(const MethodMetrics& m) {
  io::json anomalies = io::json::array();
  for (const auto& a : m.anomalies)
    anomalies.push_back({{"id", a.id},
                         {"detected", a.detected},
                         {"alarmed_windows", a.alarmed_windows}});
  return {{"method", m.method},
          {"true_positive", m.true_positive},
          {"false_positive", m.false_positive},
          {"true_negative", m.true_negative},
          {"false_negative", m.false_negative},
          {"false_alarm_rate", m.false_alarm_rate},
          {"anomalies", anomalies}};
}

}  // namespace dynanom
