#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dynanom/pl_refinement.hpp"
#include "dynanom/rng.hpp"

using namespace dynanom;

namespace {

CoverageProblem problem_from_rows(std::vector<std::vector<int>> rows,
                                  std::vector<double> c_v, double lambda = 0.5) {
  CoverageProblem p;
  p.window_count = rows.size();
  p.pl_count = rows.empty() ? 0 : rows[0].size();
  p.lambda = lambda;
  for (const auto& row : rows)
    for (int v : row) {
      p.covers.push_back(static_cast<std::uint8_t>(v));
      p.divergence.push_back(v ? 0.0 : 1.0);
    }
  p.c_v = std::move(c_v);
  return p;
}

// Exhaustive oracle with an explicitly different search order: depth-first
// over columns, exploring "exclude" before "include", keeping the first
// minimum found. That order visits chosen-vectors lexicographically, so the
// first minimum is also the lexicographically smallest one.
Selection dfs_exact_oracle(const CoverageProblem& p, double gamma) {
  std::vector<std::uint8_t> current(p.pl_count, 0);
  Selection best;
  double best_cost = std::numeric_limits<double>::infinity();
  bool found = false;

  std::function<void(std::size_t)> walk = [&](std::size_t j) {
    if (j == p.pl_count) {
      for (std::size_t i = 0; i < p.window_count; ++i) {
        bool covered = false;
        for (std::size_t k = 0; k < p.pl_count && !covered; ++k)
          covered = current[k] && p.covered(i, k);
        if (!covered) return;
      }
      double cost = 0;
      for (std::size_t k = 0; k < p.pl_count; ++k)
        if (current[k]) cost += 1.0 + gamma * p.c_v[k];
      if (!found || cost < best_cost) {
        found = true;
        best_cost = cost;
        best.chosen = current;
      }
      return;
    }
    current[j] = 0;
    walk(j + 1);
    current[j] = 1;
    walk(j + 1);
    current[j] = 0;
  };
  walk(0);

  best.primary_cost = 0;
  best.secondary_cost = 0;
  for (std::size_t k = 0; k < p.pl_count; ++k)
    if (best.chosen[k]) {
      ++best.primary_cost;
      best.secondary_cost += p.c_v[k];
    }
  return best;
}

CoverageProblem random_problem(std::uint64_t seed) {
  rng::Engine eng(seed);
  std::size_t m = 1 + rng::below(eng, 12);
  std::size_t n = 1 + rng::below(eng, 15);
  std::vector<double> div(m * n);
  for (double& d : div) d = rng::uniform01(eng);
  // Guarantee feasibility: every row gets one strong column.
  for (std::size_t i = 0; i < m; ++i)
    div[i * n + rng::below(eng, n)] = 0.0;
  return coverage_from_divergence(std::move(div), m, n, 0.4);
}

double harmonic(std::size_t m) {
  double h = 0;
  for (std::size_t i = 1; i <= m; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

double refine_score(const Selection& s, double gamma_th) {
  return static_cast<double>(s.primary_cost) + gamma_th * s.secondary_cost;
}

}  // namespace

TEST_CASE("coefficient of variation of coverage gaps") {
  auto cv = [](std::vector<std::uint8_t> col) {
    return coefficient_of_variation(col);
  };
  // Perfectly regular: gaps 2, 2, 2.
  CHECK(cv({1, 0, 1, 0, 1, 0, 1, 0}) == 0.0);
  // Covered at 0, 1, 9: gaps 1 and 8.
  CHECK(cv({1, 1, 0, 0, 0, 0, 0, 0, 0, 1}) ==
        Catch::Approx(std::sqrt(24.5) / 4.5).margin(1e-12));
  CHECK(cv({1, 1, 0, 0, 0, 0, 0, 0, 0, 1}) ==
        Catch::Approx(1.0999438).margin(1e-6));
  // Fewer than three covered rows: no regularity judgement.
  CHECK(cv({0, 0, 1, 0}) == 0.0);
  CHECK(cv({1, 0, 0, 1}) == 0.0);
  CHECK(cv({0, 0, 0, 0}) == 0.0);
}

TEST_CASE("coverage thresholds the divergence matrix") {
  auto p = coverage_from_divergence({0.1, 0.9, 0.8, 0.2}, 2, 2, 0.5);
  CHECK(p.covered(0, 0) == 1);
  CHECK(p.covered(0, 1) == 0);
  CHECK(p.covered(1, 0) == 0);
  CHECK(p.covered(1, 1) == 1);
  CHECK(p.lambda == 0.5);
  // Boundary included: divergence equal to lambda covers.
  auto q = coverage_from_divergence({0.5}, 1, 1, 0.5);
  CHECK(q.covered(0, 0) == 1);
}

TEST_CASE("coverage built from measures marks identical windows") {
  ModelFreeFamily family;
  family.pls.push_back({{0.5, 0.5}, 100});
  family.pls.push_back({{0.9, 0.1}, 100});
  family.provenance.resize(2);
  std::vector<ModelFreeMeasure> windows{{{0.5, 0.5}, 40}};
  auto p = build_coverage(std::span<const ModelFreeMeasure>(windows), family,
                          0.1, DivergenceConfig{});
  CHECK(p.divergence[0] == 0.0);
  CHECK(p.covered(0, 0) == 1);
  CHECK(p.covered(0, 1) == 0);
}

TEST_CASE("greedy picks the column covering everything") {
  auto p = problem_from_rows({{1, 1}, {1, 0}}, {0, 0});
  auto sel = greedy_set_cover(p, 0.0);
  CHECK(sel.chosen == std::vector<std::uint8_t>{1, 0});
  CHECK(sel.primary_cost == 1);
  CHECK(sel.secondary_cost == 0.0);
}

TEST_CASE("greedy breaks ties toward the lowest index") {
  auto p = problem_from_rows({{1, 0, 1}, {1, 0, 1}, {0, 1, 0}}, {0, 0, 0});
  auto sel = greedy_set_cover(p, 1.0);
  CHECK(sel.chosen == std::vector<std::uint8_t>{1, 1, 0});
}

TEST_CASE("uncoverable rows are reported") {
  auto p = problem_from_rows({{0, 0}, {1, 0}, {0, 0}}, {0, 0});
  try {
    greedy_set_cover(p, 0.0);
    FAIL("expected an infeasibility error");
  } catch (const InfeasibleCoverError& e) {
    CHECK(e.uncoverable_rows == std::vector<std::size_t>{0, 2});
  }
  CHECK_THROWS_AS(exact_set_cover(p, 0.0), InfeasibleCoverError);
}

TEST_CASE("exact cover weighs regularity against count") {
  auto p = problem_from_rows({{1, 1, 0}, {0, 1, 1}}, {0, 0.5, 0});
  auto sel = exact_set_cover(p, 1.0);
  CHECK(sel.chosen == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(sel.primary_cost == 1);
  CHECK(sel.secondary_cost == 0.5);
}

TEST_CASE("exact cover refuses oversized instances") {
  std::vector<std::vector<int>> rows(1, std::vector<int>(21, 1));
  auto p = problem_from_rows(rows, std::vector<double>(21, 0.0));
  CHECK_THROWS_AS(exact_set_cover(p, 0.0), TooLargeError);
}

TEST_CASE("gamma sweep prefers regular covers over fewer-pick greedy luck") {
  // col0 covers {0,1,6} irregularly; col2+col3 cover everything with zero
  // regularity cost. Pure count greedy would grab col0 for the leftovers.
  auto p = problem_from_rows(
      {
          {1, 0, 1, 0},
          {1, 0, 0, 1},
          {0, 1, 0, 1},
          {0, 1, 0, 1},
          {0, 1, 0, 1},
          {0, 1, 0, 1},
          {1, 0, 1, 0},
      },
      {0.9428090415820634, 0.0, 0.0, 0.0});
  auto counts_only = greedy_set_cover(p, 0.0);
  CHECK(counts_only.chosen == std::vector<std::uint8_t>{1, 0, 0, 1});
  auto refined = heuristic_refine(p, RefinementParams{});
  CHECK(refined.chosen == std::vector<std::uint8_t>{0, 0, 1, 1});
  CHECK(refine_score(refined, 0.01) < refine_score(counts_only, 0.01));
  CHECK(refine_score(refined, 0.01) <=
        refine_score(greedy_set_cover(p, 0.01), 0.01));
  CHECK(refine_score(refined, 0.01) <=
        refine_score(greedy_set_cover(p, 1.0), 0.01));
}

TEST_CASE("scaling all regularity costs is irrelevant at gamma zero") {
  auto p = random_problem(404);
  auto scaled = p;
  for (double& c : scaled.c_v) c *= 10.0;
  CHECK(greedy_set_cover(p, 0.0).chosen == greedy_set_cover(scaled, 0.0).chosen);
}

TEST_CASE("solvers agree with the oracle on random instances") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto p = random_problem(seed);
    for (double gamma : {0.0, 0.01, 1.0}) {
      auto exact = exact_set_cover(p, gamma);
      auto oracle = dfs_exact_oracle(p, gamma);
      CHECK(exact.chosen == oracle.chosen);

      auto greedy = greedy_set_cover(p, gamma);
      // Feasibility of the greedy pick.
      for (std::size_t i = 0; i < p.window_count; ++i) {
        bool covered = false;
        for (std::size_t j = 0; j < p.pl_count && !covered; ++j)
          covered = greedy.chosen[j] && p.covered(i, j);
        CHECK(covered);
      }
    }
    // Classic harmonic bound for the unweighted greedy.
    auto greedy0 = greedy_set_cover(p, 0.0);
    auto exact0 = exact_set_cover(p, 0.0);
    CHECK(static_cast<double>(greedy0.primary_cost) <=
          harmonic(p.window_count) *
                  static_cast<double>(exact0.primary_cost) +
              1e-9);
    // The sweep never loses to its own endpoints.
    auto refined = heuristic_refine(p, RefinementParams{});
    CHECK(refine_score(refined, 0.01) <=
          refine_score(greedy_set_cover(p, 0.01), 0.01) + 1e-12);
  }
}

TEST_CASE("selected families keep provenance and regularity cost") {
  ModelFreeFamily family;
  family.pls.push_back({{1.0, 0.0}, 10});
  family.pls.push_back({{0.0, 1.0}, 10});
  family.pls.push_back({{0.5, 0.5}, 10});
  family.provenance = {{"a", 1, 2, 0, 1}, {"b", 1, 2, 0, 1}, {"c", 1, 2, 0, 1}};
  Selection sel;
  sel.chosen = {1, 0, 1};
  std::vector<double> c_v{0.25, 0.5, 0.75};
  auto subset = subset_family(family, sel, c_v);
  REQUIRE(subset.size() == 2);
  CHECK(subset.provenance[0].source == "a");
  CHECK(subset.provenance[1].source == "c");
  CHECK(subset.c_v == std::vector<double>{0.25, 0.75});
}
