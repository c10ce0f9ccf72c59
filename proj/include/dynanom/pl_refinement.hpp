#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dynanom/errors.hpp"
#include "dynanom/measures.hpp"
#include "dynanom/pl_learning.hpp"

namespace dynanom {

// Binary coverage of reference windows (rows) by candidate PLs (columns):
// covers[i*pl_count+j] == 1 iff divergence(window i, PL j) <= lambda.
struct CoverageProblem {
  std::size_t window_count = 0;  // M
  std::size_t pl_count = 0;      // N
  std::vector<std::uint8_t> covers;
  std::vector<double> divergence;
  std::vector<double> c_v;  // per-column temporal irregularity cost
  double lambda = 0;

  std::uint8_t covered(std::size_t i, std::size_t j) const {
    return covers[i * pl_count + j];
  }
};

// Sample coefficient of variation of the gaps between successive covered
// positions in a 0-1 column. Fewer than 3 covered rows (fewer than 2 gaps)
// means regularity cannot be judged: cost 0.
inline double coefficient_of_variation(std::span<const std::uint8_t> column) {
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < column.size(); ++i)
    if (column[i]) positions.push_back(i);
  if (positions.size() < 3) return 0.0;

  std::vector<double> gaps;
  gaps.reserve(positions.size() - 1);
  for (std::size_t i = 1; i < positions.size(); ++i)
    gaps.push_back(static_cast<double>(positions[i] - positions[i - 1]));

  double mean = 0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  double var = 0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= static_cast<double>(gaps.size() - 1);
  return std::sqrt(var) / mean;
}

inline CoverageProblem coverage_from_divergence(
    std::vector<double> divergence, std::size_t window_count,
    std::size_t pl_count, double lambda) {
  CoverageProblem p;
  p.window_count = window_count;
  p.pl_count = pl_count;
  p.lambda = lambda;
  p.divergence = std::move(divergence);
  p.covers.assign(window_count * pl_count, 0);
  for (std::size_t i = 0; i < window_count; ++i)
    for (std::size_t j = 0; j < pl_count; ++j)
      if (p.divergence[i * pl_count + j] <= lambda)
        p.covers[i * pl_count + j] = 1;

  p.c_v.resize(pl_count);
  std::vector<std::uint8_t> column(window_count);
  for (std::size_t j = 0; j < pl_count; ++j) {
    for (std::size_t i = 0; i < window_count; ++i)
      column[i] = p.covers[i * pl_count + j];
    p.c_v[j] = coefficient_of_variation(column);
  }
  return p;
}

template <typename MeasureT>
CoverageProblem build_coverage(std::span<const MeasureT> window_measures,
                               const PLFamilyT<MeasureT>& family,
                               double lambda,
                               const DivergenceConfig& cfg = {}) {
  std::size_t m = window_measures.size();
  std::size_t n = family.size();
  std::vector<double> div(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      div[i * n + j] = detail::divergence_of(window_measures[i],
                                             family.pls[j], cfg);
  return coverage_from_divergence(std::move(div), m, n, lambda);
}

struct Selection {
  std::vector<std::uint8_t> chosen;  // 0-1 over columns
  std::size_t primary_cost = 0;      // number of chosen PLs
  double secondary_cost = 0;         // sum of chosen c_v
};

namespace detail {

inline void throw_if_uncoverable(const CoverageProblem& p) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < p.window_count; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < p.pl_count && !any; ++j)
      any = p.covered(i, j) != 0;
    if (!any) bad.push_back(i);
  }
  if (!bad.empty()) {
    std::string msg = "no PL covers window(s)";
    for (std::size_t i : bad) msg += " " + std::to_string(i);
    msg += "; consider raising lambda";
    throw InfeasibleCoverError(std::move(msg), std::move(bad));
  }
}

inline Selection finish_selection(const CoverageProblem& p,
                                  std::vector<std::uint8_t> chosen) {
  Selection s;
  s.chosen = std::move(chosen);
  for (std::size_t j = 0; j < p.pl_count; ++j)
    if (s.chosen[j]) {
      ++s.primary_cost;
      s.secondary_cost += p.c_v[j];
    }
  return s;
}

}  // namespace detail

// Repeatedly picks the column maximizing (#newly covered) / (1 + gamma *
// c_v), lowest index on ties, until every row is covered.
inline Selection greedy_set_cover(const CoverageProblem& p, double gamma) {
  detail::throw_if_uncoverable(p);
  std::vector<std::uint8_t> chosen(p.pl_count, 0);
  std::vector<std::uint8_t> covered(p.window_count, 0);
  std::size_t remaining = p.window_count;

  while (remaining > 0) {
    std::size_t best_j = p.pl_count;
    double best_val = 0;
    for (std::size_t j = 0; j < p.pl_count; ++j) {
      if (chosen[j]) continue;
      std::size_t newly = 0;
      for (std::size_t i = 0; i < p.window_count; ++i)
        if (!covered[i] && p.covered(i, j)) ++newly;
      if (newly == 0) continue;
      double val = static_cast<double>(newly) / (1.0 + gamma * p.c_v[j]);
      if (val > best_val) {
        best_val = val;
        best_j = j;
      }
    }
    if (best_j == p.pl_count) break;  // unreachable after feasibility check
    chosen[best_j] = 1;
    for (std::size_t i = 0; i < p.window_count; ++i)
      if (!covered[i] && p.covered(i, best_j)) {
        covered[i] = 1;
        --remaining;
      }
  }
  return detail::finish_selection(p, std::move(chosen));
}

// Full enumeration of column subsets, minimizing |x| + gamma * c_v'x; among
// equal costs the lexicographically smallest chosen vector wins.
inline Selection exact_set_cover(const CoverageProblem& p, double gamma) {
  if (p.pl_count > 20)
    throw TooLargeError("exact set cover limited to 20 columns, got " +
                        std::to_string(p.pl_count));
  detail::throw_if_uncoverable(p);

  std::size_t words = (p.window_count + 63) / 64;
  std::vector<std::vector<std::uint64_t>> col_mask(
      p.pl_count, std::vector<std::uint64_t>(words, 0));
  for (std::size_t j = 0; j < p.pl_count; ++j)
    for (std::size_t i = 0; i < p.window_count; ++i)
      if (p.covered(i, j)) col_mask[j][i / 64] |= 1ULL << (i % 64);
  std::vector<std::uint64_t> full(words, 0);
  for (std::size_t i = 0; i < p.window_count; ++i)
    full[i / 64] |= 1ULL << (i % 64);

  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> best_chosen;
  std::vector<std::uint64_t> acc(words);
  for (std::uint64_t mask = 0; mask < (1ULL << p.pl_count); ++mask) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t j = 0; j < p.pl_count; ++j)
      if (mask & (1ULL << j))
        for (std::size_t w = 0; w < words; ++w) acc[w] |= col_mask[j][w];
    if (acc != full) continue;

    double cost = 0;
    std::vector<std::uint8_t> chosen(p.pl_count, 0);
    for (std::size_t j = 0; j < p.pl_count; ++j)
      if (mask & (1ULL << j)) {
        chosen[j] = 1;
        cost += 1.0 + gamma * p.c_v[j];
      }
    bool better = cost < best_cost;
    if (!better && cost == best_cost)
      better = std::lexicographical_compare(chosen.begin(), chosen.end(),
                                            best_chosen.begin(),
                                            best_chosen.end());
    if (better) {
      best_cost = cost;
      best_chosen = std::move(chosen);
    }
  }
  return detail::finish_selection(p, std::move(best_chosen));
}

struct RefinementParams {
  double gamma_start = 1.0;
  double discount_ratio = 0.5;  // r
  double gamma_th = 0.01;
};

// Sweeps gamma = gamma_start * r^k while gamma >= gamma_th, runs the greedy
// cover at each, and keeps the selection with the smallest final score
// primary + gamma_th * secondary (earliest sweep wins ties).
inline Selection heuristic_refine(const CoverageProblem& p,
                                  const RefinementParams& params = {}) {
  Selection best;
  double best_score = std::numeric_limits<double>::infinity();
  for (double gamma = params.gamma_start; gamma >= params.gamma_th;
       gamma *= params.discount_ratio) {
    Selection sel = greedy_set_cover(p, gamma);
    double score = static_cast<double>(sel.primary_cost) +
                   params.gamma_th * sel.secondary_cost;
    if (score < best_score) {
      best_score = score;
      best = std::move(sel);
    }
  }
  return best;
}

// Keeps only the chosen PLs of a candidate family, attaching each one's c_v.
template <typename MeasureT>
PLFamilyT<MeasureT> subset_family(const PLFamilyT<MeasureT>& family,
                                  const Selection& selection,
                                  std::span<const double> column_c_v) {
  PLFamilyT<MeasureT> out;
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (!selection.chosen[j]) continue;
    out.pls.push_back(family.pls[j]);
    out.provenance.push_back(family.provenance[j]);
    out.c_v.push_back(column_c_v[j]);
  }
  return out;
}

}  // namespace dynanom
