#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dynanom/detector.hpp"
#include "dynanom/rng.hpp"

using namespace dynanom;

namespace {

ModelFreeFamily free_family(std::vector<std::vector<double>> pls) {
  ModelFreeFamily f;
  for (auto& p : pls) {
    f.pls.push_back({std::move(p), 100});
    f.provenance.push_back({"test", 1, 2, 0, 1});
    f.c_v.push_back(0.0);
  }
  return f;
}

SymbolWindow window_of(std::size_t index, double start,
                       std::vector<std::uint32_t> symbols) {
  SymbolWindow w;
  w.index = index;
  w.start_s = start;
  w.end_s = start + 100;
  for (std::size_t i = 0; i < symbols.size(); ++i)
    w.items.push_back({start + static_cast<double>(i), symbols[i]});
  return w;
}

}  // namespace

TEST_CASE("a window matching a family member has zero divergence") {
  auto family = free_family({{0.25, 0.75}, {0.5, 0.5}});
  ModelFreeMeasure window{{0.5, 0.5}, 40};
  auto d = min_divergence(window, family);
  CHECK(d.value == 0.0);
  CHECK(d.pl_index == 1);
}

TEST_CASE("the family minimum never exceeds any single member") {
  rng::Engine eng(3);
  auto family = free_family({{0.1, 0.9}, {0.5, 0.5}, {0.9, 0.1}});
  for (int trial = 0; trial < 100; ++trial) {
    double a = rng::uniform01(eng);
    ModelFreeMeasure w{{a, 1.0 - a}, 50};
    auto d = min_divergence(w, family);
    for (const auto& pl : family.pls)
      CHECK(d.value <= model_free_divergence(w, pl) + 1e-15);
  }
}

TEST_CASE("adding a member can only shrink the family divergence") {
  ModelFreeMeasure w{{0.3, 0.7}, 50};
  auto small = free_family({{0.1, 0.9}});
  auto large = free_family({{0.1, 0.9}, {0.3, 0.7}});
  CHECK(min_divergence(w, large).value <= min_divergence(w, small).value);
}

TEST_CASE("argmin ties resolve to the lowest index") {
  auto family = free_family({{0.5, 0.5}, {0.5, 0.5}});
  ModelFreeMeasure w{{0.5, 0.5}, 40};
  CHECK(min_divergence(w, family).pl_index == 0);
}

TEST_CASE("empty families are rejected") {
  ModelFreeFamily empty;
  ModelFreeMeasure w{{1.0}, 10};
  CHECK_THROWS_AS(min_divergence(w, empty), EmptyFamilyError);
}

TEST_CASE("detection alarms at and above the threshold") {
  auto family = free_family({{0.5, 0.5}});
  // 20 symbols, all zeros: measure (1, 0), divergence ln 2 vs the family.
  std::vector<SymbolWindow> windows{
      window_of(0, 0, std::vector<std::uint32_t>(20, 0)),
      window_of(1, 100, {0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1})};

  DetectionConfig det;
  det.lambda_free = std::log(2.0);  // exactly the divergence of window 0
  det.min_flows_per_window = 10;
  auto verdicts = detect(windows, &family, nullptr, det);
  REQUIRE(verdicts.size() == 2);
  CHECK(verdicts[0].alarm_free);  // >= lambda alarms, boundary included
  CHECK(*verdicts[0].div_free == Catch::Approx(std::log(2.0)).margin(1e-12));
  CHECK_FALSE(verdicts[1].alarm_free);
  CHECK(*verdicts[1].div_free == 0.0);
  CHECK_FALSE(verdicts[0].div_based.has_value());
}

TEST_CASE("sparse windows carry no verdict and never alarm") {
  auto family = free_family({{0.5, 0.5}});
  std::vector<SymbolWindow> windows{window_of(0, 0, {0, 0, 0})};
  DetectionConfig det;
  det.min_flows_per_window = 10;
  auto verdicts = detect(windows, &family, nullptr, det);
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].sparse);
  CHECK_FALSE(verdicts[0].div_free.has_value());
  CHECK_FALSE(verdicts[0].alarm_free);
  CHECK(verdicts[0].flow_count == 3);
}

TEST_CASE("model based detection runs alongside model free") {
  std::vector<QuantizedFlow> reference;
  rng::Engine eng(8);
  for (int i = 0; i < 2000; ++i)
    reference.push_back({static_cast<double>(i),
                         static_cast<std::uint32_t>(rng::below(eng, 2))});
  auto [vf, vb] = single_pl_family(reference, 2);
  REQUIRE(vf.pls.size() == 1);
  REQUIRE(vb.pls.size() == 1);
  CHECK(vf.provenance[0].source == "vanilla");

  std::vector<std::uint32_t> alternating;
  for (int i = 0; i < 50; ++i) alternating.push_back(i % 2 == 0 ? 0 : 1);
  std::vector<SymbolWindow> windows{window_of(0, 0, alternating)};
  DetectionConfig det;
  det.lambda_free = 0.6;
  det.lambda_based = 0.4;
  auto verdicts = detect(windows, &vf, &vb, det);
  REQUIRE(verdicts.size() == 1);
  // Marginals match the fair-coin reference: model-free stays quiet.
  CHECK_FALSE(verdicts[0].alarm_free);
  // Strict alternation is far from the i.i.d. pair law: model-based alarms.
  CHECK(verdicts[0].alarm_based);
  CHECK(*verdicts[0].div_based > 0.4);
}

TEST_CASE("families with different alphabets cannot be mixed") {
  auto ff = free_family({{0.5, 0.5}});
  std::vector<QuantizedFlow> reference{{0, 0}, {1, 1}, {2, 2}};
  auto [vf, vb] = single_pl_family(reference, 3);
  std::vector<SymbolWindow> windows{window_of(0, 0, {0, 1})};
  CHECK_THROWS_AS(detect(windows, &ff, &vb, DetectionConfig{}),
                  AlphabetMismatchError);
}

TEST_CASE("baseline family refuses an empty reference") {
  CHECK_THROWS_AS(single_pl_family({}, 4), EmptyReferenceError);
}
