#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dynanom/errors.hpp"
#include "dynanom/features.hpp"
#include "dynanom/measures.hpp"
#include "dynanom/pl_learning.hpp"

namespace dynanom {

struct MinDivergence {
  double value = 0;
  std::size_t pl_index = 0;  // argmin, lowest index on ties
};

namespace detail {

template <typename MeasureT>
MinDivergence min_divergence_impl(const MeasureT& window,
                                  const PLFamilyT<MeasureT>& family,
                                  const DivergenceConfig& cfg) {
  if (family.pls.empty())
    throw EmptyFamilyError("divergence against an empty PL family");
  MinDivergence best{divergence_of(window, family.pls[0], cfg), 0};
  for (std::size_t j = 1; j < family.pls.size(); ++j) {
    double d = divergence_of(window, family.pls[j], cfg);
    if (d < best.value) best = {d, j};
  }
  return best;
}

}  // namespace detail

inline MinDivergence min_divergence(const ModelFreeMeasure& window,
                                    const ModelFreeFamily& family,
                                    const DivergenceConfig& cfg = {}) {
  return detail::min_divergence_impl(window, family, cfg);
}

inline MinDivergence min_divergence(const ModelBasedMeasure& window,
                                    const ModelBasedFamily& family,
                                    const DivergenceConfig& cfg = {}) {
  return detail::min_divergence_impl(window, family, cfg);
}

struct DetectionConfig {
  double lambda_free = 0.6;
  double lambda_based = 0.4;
  // Windows with fewer flows carry no verdict: their empirical measure is
  // too noisy to compare against anything.
  std::size_t min_flows_per_window = 10;
};

struct WindowVerdict {
  std::size_t window_index = 0;
  double start_s = 0;
  std::size_t flow_count = 0;
  bool sparse = false;
  std::optional<double> div_free;
  std::optional<std::size_t> argmin_free;
  bool alarm_free = false;
  std::optional<double> div_based;
  std::optional<std::size_t> argmin_based;
  bool alarm_based = false;
};

// Runs the generalized test per window: alarm iff the smallest divergence
// to any family PL reaches the method's lambda. Pass nullptr to skip a
// method. Sparse windows (< min_flows_per_window flows) never alarm.
inline std::vector<WindowVerdict> detect(std::span<const SymbolWindow> windows,
                                         const ModelFreeFamily* free_family,
                                         const ModelBasedFamily* based_family,
                                         const DetectionConfig& det = {},
                                         const DivergenceConfig& div = {}) {
  std::uint32_t alphabet = 0;
  if (free_family) {
    if (free_family->pls.empty())
      throw EmptyFamilyError("model-free family is empty");
    alphabet = free_family->pls[0].alphabet_size();
  }
  if (based_family) {
    if (based_family->pls.empty())
      throw EmptyFamilyError("model-based family is empty");
    if (alphabet && based_family->pls[0].alphabet != alphabet)
      throw AlphabetMismatchError(
          "model-free and model-based families disagree on alphabet");
    alphabet = based_family->pls[0].alphabet;
  }

  std::vector<WindowVerdict> out;
  out.reserve(windows.size());
  for (const SymbolWindow& w : windows) {
    WindowVerdict v;
    v.window_index = w.index;
    v.start_s = w.start_s;
    v.flow_count = w.items.size();
    if (w.items.size() < det.min_flows_per_window) {
      v.sparse = true;
      out.push_back(std::move(v));
      continue;
    }
    if (free_family) {
      auto m = model_free_measure(std::span<const QuantizedFlow>(w.items),
                                  alphabet);
      MinDivergence d = min_divergence(m, *free_family, div);
      v.div_free = d.value;
      v.argmin_free = d.pl_index;
      v.alarm_free = d.value >= det.lambda_free;
    }
    if (based_family) {
      auto m = model_based_measure(std::span<const QuantizedFlow>(w.items),
                                   alphabet);
      MinDivergence d = min_divergence(m, *based_family, div);
      v.div_based = d.value;
      v.argmin_based = d.pl_index;
      v.alarm_based = d.value >= det.lambda_based;
    }
    out.push_back(std::move(v));
  }
  return out;
}

// Baseline families: one PL per method, estimated over the whole reference
// stream with no time structure.
inline std::pair<ModelFreeFamily, ModelBasedFamily> single_pl_family(
    std::span<const QuantizedFlow> reference, std::uint32_t alphabet_size) {
  if (reference.empty())
    throw EmptyReferenceError("cannot build a baseline PL from no flows");
  PLProvenance prov{"vanilla", 0, 0, 0, 1};

  ModelFreeFamily free_family;
  free_family.pls.push_back(model_free_measure(reference, alphabet_size));
  free_family.provenance.push_back(prov);
  free_family.c_v.push_back(0.0);

  ModelBasedFamily based_family;
  based_family.pls.push_back(model_based_measure(reference, alphabet_size));
  based_family.provenance.push_back(prov);
  based_family.c_v.push_back(0.0);
  return {std::move(free_family), std::move(based_family)};
}

}  // namespace dynanom
