#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dynanom/errors.hpp"
#include "dynanom/features.hpp"

namespace dynanom {

// Empirical symbol distribution of one window: probs[s] = count(s) / n.
struct ModelFreeMeasure {
  std::vector<double> probs;
  std::size_t sample_count = 0;

  std::uint32_t alphabet_size() const {
    return static_cast<std::uint32_t>(probs.size());
  }
};

// Empirical distribution of consecutive symbol pairs, row-major |S| x |S|:
// pair_probs[i*|S|+j] = count(s_t = i, s_{t+1} = j) / (n - 1).
struct ModelBasedMeasure {
  std::vector<double> pair_probs;
  std::uint32_t alphabet = 0;
  std::size_t pair_count = 0;

  double at(std::uint32_t i, std::uint32_t j) const {
    return pair_probs[static_cast<std::size_t>(i) * alphabet + j];
  }
};

// Shared accumulators so segment pooling and single-window measures use the
// identical counting path.
struct SymbolCounter {
  std::vector<double> counts;
  std::size_t total = 0;

  explicit SymbolCounter(std::uint32_t alphabet_size)
      : counts(alphabet_size, 0.0) {}

  void add(std::uint32_t symbol) {
    if (symbol >= counts.size())
      throw SymbolOutOfAlphabetError("symbol " + std::to_string(symbol) +
                                     " outside alphabet of " +
                                     std::to_string(counts.size()));
    counts[symbol] += 1.0;
    ++total;
  }

  ModelFreeMeasure finish() const {
    ModelFreeMeasure m;
    m.probs.assign(counts.size(), 0.0);
    if (total > 0)
      for (std::size_t s = 0; s < counts.size(); ++s)
        m.probs[s] = counts[s] / static_cast<double>(total);
    m.sample_count = total;
    return m;
  }
};

struct PairCounter {
  std::vector<double> counts;
  std::uint32_t alphabet;
  std::size_t total = 0;

  explicit PairCounter(std::uint32_t alphabet_size)
      : counts(static_cast<std::size_t>(alphabet_size) * alphabet_size, 0.0),
        alphabet(alphabet_size) {}

  void add_pair(std::uint32_t from, std::uint32_t to) {
    if (from >= alphabet || to >= alphabet)
      throw SymbolOutOfAlphabetError("pair symbol outside alphabet of " +
                                     std::to_string(alphabet));
    counts[static_cast<std::size_t>(from) * alphabet + to] += 1.0;
    ++total;
  }

  // Consecutive pairs within one symbol sequence.
  void add_sequence(std::span<const std::uint32_t> symbols) {
    for (std::size_t t = 0; t + 1 < symbols.size(); ++t)
      add_pair(symbols[t], symbols[t + 1]);
  }

  ModelBasedMeasure finish() const {
    ModelBasedMeasure m;
    m.alphabet = alphabet;
    m.pair_probs.assign(counts.size(), 0.0);
    if (total > 0)
      for (std::size_t s = 0; s < counts.size(); ++s)
        m.pair_probs[s] = counts[s] / static_cast<double>(total);
    m.pair_count = total;
    return m;
  }
};

inline ModelFreeMeasure model_free_measure(
    std::span<const std::uint32_t> symbols, std::uint32_t alphabet_size) {
  SymbolCounter c(alphabet_size);
  for (std::uint32_t s : symbols) c.add(s);
  return c.finish();
}

inline ModelFreeMeasure model_free_measure(
    std::span<const QuantizedFlow> flows, std::uint32_t alphabet_size) {
  SymbolCounter c(alphabet_size);
  for (const QuantizedFlow& f : flows) c.add(f.symbol);
  return c.finish();
}

inline ModelBasedMeasure model_based_measure(
    std::span<const std::uint32_t> symbols, std::uint32_t alphabet_size) {
  PairCounter c(alphabet_size);
  c.add_sequence(symbols);
  return c.finish();
}

inline ModelBasedMeasure model_based_measure(
    std::span<const QuantizedFlow> flows, std::uint32_t alphabet_size) {
  PairCounter c(alphabet_size);
  for (std::size_t t = 0; t + 1 < flows.size(); ++t)
    c.add_pair(flows[t].symbol, flows[t + 1].symbol);
  return c.finish();
}

// Row-normalized transition probabilities q(j|i); rows with zero mass stay
// all-zero. Row-major like pair_probs.
inline std::vector<double> conditional_probs(const ModelBasedMeasure& m) {
  std::size_t n = m.alphabet;
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0;
    for (std::size_t j = 0; j < n; ++j) row += m.pair_probs[i * n + j];
    if (row > 0)
      for (std::size_t j = 0; j < n; ++j)
        out[i * n + j] = m.pair_probs[i * n + j] / row;
  }
  return out;
}

struct DivergenceConfig {
  // Floor applied to both arguments before taking logs. Natural log
  // throughout. No renormalization after flooring, so the result can dip
  // slightly below zero, bounded by alphabet_size * epsilon * ln(1/epsilon).
  double epsilon = 1e-20;
};

// Relative entropy between floored distributions:
// sum_s max(nu_s, eps) * ln(max(nu_s, eps) / max(mu_s, eps)).
// Entries where the floored values coincide contribute exactly zero, which
// also makes D(x||x) == 0 bitwise.
inline double model_free_divergence(const ModelFreeMeasure& nu,
                                    const ModelFreeMeasure& mu,
                                    const DivergenceConfig& cfg = {}) {
  if (nu.probs.size() != mu.probs.size())
    throw AlphabetMismatchError("model-free measures differ in alphabet");
  double sum = 0;
  for (std::size_t s = 0; s < nu.probs.size(); ++s) {
    double a = std::max(nu.probs[s], cfg.epsilon);
    double b = std::max(mu.probs[s], cfg.epsilon);
    if (a == b) continue;
    sum += a * std::log(a / b);
  }
  return sum;
}

// Conditional relative entropy between floored pair measures:
// sum_{i,j} qf(i,j) * ln( (qf(i,j)/qf(i,.)) / (pf(i,j)/pf(i,.)) )
// with qf = max(q, eps), pf = max(pi, eps). Expanded per row as
// sum_j qf(i,j) ln(qf(i,j)/pf(i,j)) + qf(i,.) ln(pf(i,.)/qf(i,.)).
inline double model_based_divergence(const ModelBasedMeasure& q,
                                     const ModelBasedMeasure& pi,
                                     const DivergenceConfig& cfg = {}) {
  if (q.alphabet != pi.alphabet)
    throw AlphabetMismatchError("model-based measures differ in alphabet");
  std::size_t n = q.alphabet;
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double qrow = 0, prow = 0, entry_terms = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double a = std::max(q.pair_probs[i * n + j], cfg.epsilon);
      double b = std::max(pi.pair_probs[i * n + j], cfg.epsilon);
      qrow += a;
      prow += b;
      if (a != b) entry_terms += a * std::log(a / b);
    }
    sum += entry_terms;
    if (qrow != prow) sum += qrow * std::log(prow / qrow);
  }
  return sum;
}

namespace detail {

// Overload set letting templates dispatch on the measure kind.
inline double divergence_of(const ModelFreeMeasure& nu,
                            const ModelFreeMeasure& mu,
                            const DivergenceConfig& cfg) {
  return model_free_divergence(nu, mu, cfg);
}

inline double divergence_of(const ModelBasedMeasure& q,
                            const ModelBasedMeasure& pi,
                            const DivergenceConfig& cfg) {
  return model_based_divergence(q, pi, cfg);
}

}  // namespace detail

}  // namespace dynanom
