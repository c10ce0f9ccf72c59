#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynanom/errors.hpp"
#include "dynanom/features.hpp"
#include "dynanom/measures.hpp"

namespace dynanom {

// Arrival timestamps of flows whose quantized feature sits at one level.
// feature: 1 = cluster, 2 = center distance, 3 = size, 4 = duration.
struct Channel {
  std::uint32_t feature = 0;
  std::uint32_t level = 0;
  std::vector<double> times;
};

// Only channels that received at least one flow are returned, ordered by
// (feature, level). Each flow lands in exactly one channel per feature.
inline std::vector<Channel> extract_channels(
    std::span<const QuantizedFlow> flows, const SymbolAlphabet& alphabet) {
  std::vector<std::vector<std::vector<double>>> buckets(4);
  for (std::uint32_t f = 1; f <= 4; ++f)
    buckets[f - 1].resize(alphabet.levels_of_feature(f));
  for (const QuantizedFlow& qf : flows) {
    auto values = alphabet.decode(qf.symbol);
    for (std::uint32_t f = 0; f < 4; ++f)
      buckets[f][values[f]].push_back(qf.start_time_s);
  }
  std::vector<Channel> out;
  for (std::uint32_t f = 0; f < 4; ++f)
    for (std::uint32_t level = 0; level < buckets[f].size(); ++level)
      if (!buckets[f][level].empty())
        out.push_back({f + 1, level, std::move(buckets[f][level])});
  return out;
}

struct HistogramConfig {
  double bin_width_s = 600;
  // A bin is "dense" while its share of all intervals stays at or above
  // this; the quiet threshold t_d is the right edge of the first bin below.
  double freq_threshold = 0.05;
  // Minimum share, within the region beyond t_d, for a local maximum to
  // count as a periodic-gap peak.
  double peak_min_prominence = 0.02;
};

struct PeriodEstimate {
  std::optional<double> quiet_threshold_s;  // t_d
  std::optional<double> period_s;           // t_p
};

// Histogram of consecutive inter-arrival intervals. t_d is the right edge
// of the first sparse bin. Peaks are strict local maxima (plateaus resolve
// to their smallest interval) among bins beyond t_d whose share of that
// restricted region reaches peak_min_prominence; the period estimate is
// twice the mean of the peak bin centers.
inline PeriodEstimate estimate_channel_period(const Channel& channel,
                                              const HistogramConfig& cfg) {
  PeriodEstimate est;
  if (channel.times.size() < 2) return est;

  std::vector<double> intervals;
  intervals.reserve(channel.times.size() - 1);
  for (std::size_t i = 1; i < channel.times.size(); ++i)
    intervals.push_back(channel.times[i] - channel.times[i - 1]);

  double max_interval = 0;
  for (double d : intervals) max_interval = std::max(max_interval, d);
  std::size_t nbins =
      static_cast<std::size_t>(std::floor(max_interval / cfg.bin_width_s)) + 1;
  std::vector<std::size_t> hist(nbins, 0);
  for (double d : intervals) {
    auto b = static_cast<std::size_t>(std::floor(d / cfg.bin_width_s));
    ++hist[std::min(b, nbins - 1)];
  }

  double total = static_cast<double>(intervals.size());
  std::size_t first_sparse = nbins;
  for (std::size_t b = 0; b < nbins; ++b) {
    if (static_cast<double>(hist[b]) / total < cfg.freq_threshold) {
      first_sparse = b;
      break;
    }
  }
  est.quiet_threshold_s =
      static_cast<double>(first_sparse + 1) * cfg.bin_width_s;

  std::size_t first_beyond = first_sparse + 1;
  double beyond_total = 0;
  for (std::size_t b = first_beyond; b < nbins; ++b)
    beyond_total += static_cast<double>(hist[b]);
  if (beyond_total == 0) return est;

  auto is_peak = [&](std::size_t b) {
    std::size_t c = hist[b];
    std::size_t left = b > 0 ? hist[b - 1] : 0;
    if (c <= left) return false;
    std::size_t j = b + 1;
    while (j < nbins && hist[j] == c) ++j;
    std::size_t right = j < nbins ? hist[j] : 0;
    return c > right;
  };

  std::vector<double> peak_centers;
  for (std::size_t b = first_beyond; b < nbins; ++b) {
    if (static_cast<double>(hist[b]) / beyond_total < cfg.peak_min_prominence)
      continue;
    if (is_peak(b)) {
      peak_centers.push_back((static_cast<double>(b) + 0.5) *
                             cfg.bin_width_s);
    }
  }
  if (peak_centers.empty()) return est;

  double mean = 0;
  for (double c : peak_centers) mean += c;
  mean /= static_cast<double>(peak_centers.size());
  est.period_s = 2.0 * mean;
  return est;
}

// Feature-level estimate: mean of the per-channel values that exist.
inline PeriodEstimate estimate_feature_period(
    std::span<const PeriodEstimate> channel_estimates) {
  PeriodEstimate out;
  double td_sum = 0, tp_sum = 0;
  std::size_t td_n = 0, tp_n = 0;
  for (const PeriodEstimate& e : channel_estimates) {
    if (e.quiet_threshold_s) {
      td_sum += *e.quiet_threshold_s;
      ++td_n;
    }
    if (e.period_s) {
      tp_sum += *e.period_s;
      ++tp_n;
    }
  }
  if (td_n) out.quiet_threshold_s = td_sum / static_cast<double>(td_n);
  if (tp_n) out.period_s = tp_sum / static_cast<double>(tp_n);
  return out;
}

// One (t_d, t_p) hypothesis driving a segmentation of the day into
// floor(t_p / t_d) phase segments.
struct PeriodPair {
  std::string label;
  double quiet_threshold_s = 0;  // t_d
  double period_s = 0;           // t_p
};

// Merges per-feature estimates (features needing both values present) with
// externally supplied priors. Order: features 1..4, then priors.
inline std::vector<PeriodPair> collect_period_pairs(
    std::span<const PeriodEstimate> feature_estimates,
    std::span<const PeriodPair> priors) {
  std::vector<PeriodPair> pairs;
  for (std::size_t f = 0; f < feature_estimates.size(); ++f) {
    const PeriodEstimate& e = feature_estimates[f];
    if (e.quiet_threshold_s && e.period_s)
      pairs.push_back({"feature-" + std::to_string(f + 1),
                       *e.quiet_threshold_s, *e.period_s});
  }
  for (const PeriodPair& p : priors) pairs.push_back(p);
  return pairs;
}

struct PLProvenance {
  std::string source;  // period-pair label, or "vanilla"
  double quiet_threshold_s = 0;
  double period_s = 0;
  std::uint32_t segment = 0;
  std::uint32_t segment_count = 1;
};

template <typename MeasureT>
struct PLFamilyT {
  std::vector<MeasureT> pls;
  std::vector<PLProvenance> provenance;
  std::vector<double> c_v;  // filled by refinement; empty for candidates

  std::size_t size() const { return pls.size(); }
};

using ModelFreeFamily = PLFamilyT<ModelFreeMeasure>;
using ModelBasedFamily = PLFamilyT<ModelBasedMeasure>;

struct CandidateFamilies {
  ModelFreeFamily model_free;
  ModelBasedFamily model_based;
  std::size_t empty_segments = 0;
};

// Pools flows by phase segment for every period pair. Segment of a flow at
// time t is min(floor(((t - t0) mod t_p) / t_d), n_seg - 1), so the tail
// phase [n_seg * t_d, t_p) folds into the last segment. Each pooled segment
// yields one model-free PL (needs >= 1 flow) and one model-based PL
// (needs >= 1 consecutive pair inside a single segment occurrence).
inline CandidateFamilies generate_candidate_pls(
    std::span<const QuantizedFlow> flows, const SymbolAlphabet& alphabet,
    double horizon_begin_s, std::span<const PeriodPair> pairs) {
  if (pairs.empty())
    throw NoPeriodAvailableError(
        "no period estimate and no prior; cannot build candidate PLs");

  CandidateFamilies out;
  for (const PeriodPair& pair : pairs) {
    if (!(pair.quiet_threshold_s > 0) || !(pair.period_s > 0)) continue;
    auto n_seg = static_cast<std::uint32_t>(
        std::floor(pair.period_s / pair.quiet_threshold_s));
    if (n_seg == 0) continue;  // t_p < t_d carries no usable segmentation

    std::vector<SymbolCounter> symbol_counts(
        n_seg, SymbolCounter(alphabet.total()));
    std::vector<PairCounter> pair_counts(n_seg, PairCounter(alphabet.total()));
    std::vector<std::int64_t> last_period(n_seg, -1);
    std::vector<std::uint32_t> last_symbol(n_seg, 0);

    for (const QuantizedFlow& f : flows) {
      double offset = f.start_time_s - horizon_begin_s;
      double phase = std::fmod(offset, pair.period_s);
      if (phase < 0) phase += pair.period_s;
      auto seg = std::min(
          static_cast<std::uint32_t>(
              std::floor(phase / pair.quiet_threshold_s)),
          n_seg - 1);
      auto period = static_cast<std::int64_t>(
          std::floor(offset / pair.period_s));

      symbol_counts[seg].add(f.symbol);
      if (last_period[seg] == period)
        pair_counts[seg].add_pair(last_symbol[seg], f.symbol);
      last_period[seg] = period;
      last_symbol[seg] = f.symbol;
    }

    for (std::uint32_t seg = 0; seg < n_seg; ++seg) {
      PLProvenance prov{pair.label, pair.quiet_threshold_s, pair.period_s, seg,
                        n_seg};
      if (symbol_counts[seg].total == 0) {
        ++out.empty_segments;
        continue;
      }
      out.model_free.pls.push_back(symbol_counts[seg].finish());
      out.model_free.provenance.push_back(prov);
      if (pair_counts[seg].total > 0) {
        out.model_based.pls.push_back(pair_counts[seg].finish());
        out.model_based.provenance.push_back(prov);
      }
    }
  }
  return out;
}

}  // namespace dynanom
