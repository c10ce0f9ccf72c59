#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dynanom/errors.hpp"
#include "dynanom/flow.hpp"
#include "dynanom/rng.hpp"

namespace dynanom {

inline double squared_distance(const std::array<double, 4>& a,
                               const std::array<double, 4>& b) {
  double s = 0;
  for (int i = 0; i < 4; ++i) {
    double d = a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)];
    s += d * d;
  }
  return s;
}

// K cluster centers over IPv4 addresses viewed as points in [0,255]^4.
struct IpClusterModel {
  std::vector<std::array<double, 4>> centers;

  std::uint32_t cluster_count() const {
    return static_cast<std::uint32_t>(centers.size());
  }

  // Nearest center by Euclidean distance; ties take the lowest index.
  std::uint32_t assign(const Ipv4& ip) const {
    auto p = ip.as_point();
    std::uint32_t best = 0;
    double best_d = squared_distance(p, centers[0]);
    for (std::uint32_t j = 1; j < centers.size(); ++j) {
      double d = squared_distance(p, centers[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return best;
  }

  double distance_to_center(const Ipv4& ip) const {
    return std::sqrt(
        squared_distance(ip.as_point(), centers[assign(ip)]));
  }
};

// Lloyd's iteration with pinned determinism: input IPs are deduplicated and
// sorted, initial centers are the first k after a seeded shuffle, assignment
// ties go to the lowest center index, an emptied cluster keeps its previous
// center. Stops after 100 rounds or when no center moves more than 1e-9.
inline IpClusterModel fit_ip_clusters(std::span<const Ipv4> ips,
                                      std::uint32_t k, std::uint64_t seed) {
  std::vector<Ipv4> unique(ips.begin(), ips.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (k == 0 || unique.size() < k)
    throw TooFewPointsError("need at least k distinct addresses");

  rng::Engine eng(seed);
  rng::shuffle(unique, eng);

  IpClusterModel model;
  model.centers.reserve(k);
  for (std::uint32_t j = 0; j < k; ++j)
    model.centers.push_back(unique[j].as_point());

  std::vector<std::array<double, 4>> points;
  points.reserve(unique.size());
  for (const Ipv4& ip : unique) points.push_back(ip.as_point());

  for (int round = 0; round < 100; ++round) {
    std::vector<std::array<double, 4>> sums(k, {0, 0, 0, 0});
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::uint32_t j = model.assign(unique[i]);
      for (int c = 0; c < 4; ++c)
        sums[j][static_cast<std::size_t>(c)] +=
            points[i][static_cast<std::size_t>(c)];
      ++sizes[j];
    }
    double moved = 0;
    for (std::uint32_t j = 0; j < k; ++j) {
      if (sizes[j] == 0) continue;
      std::array<double, 4> next{};
      for (int c = 0; c < 4; ++c)
        next[static_cast<std::size_t>(c)] =
            sums[j][static_cast<std::size_t>(c)] /
            static_cast<double>(sizes[j]);
      moved = std::max(moved,
                       std::sqrt(squared_distance(next, model.centers[j])));
      model.centers[j] = next;
    }
    if (moved < 1e-9) break;
  }
  return model;
}

// Uniform quantizer over [lo, hi] with clamping at both ends.
struct ScalarQuantizer {
  double lo = 0;
  double hi = 0;
  std::uint32_t levels = 1;

  std::uint32_t quantize(double v) const {
    if (levels <= 1 || !(hi > lo)) return 0;
    double t = (v - lo) / (hi - lo) * static_cast<double>(levels);
    double idx = std::floor(t);
    if (idx < 0) return 0;
    if (idx >= static_cast<double>(levels)) return levels - 1;
    return static_cast<std::uint32_t>(idx);
  }
};

// Per-flow scalar feature quantizers: distance to assigned cluster center,
// flow size in bytes, flow duration in seconds.
struct Quantizer {
  ScalarQuantizer distance;
  ScalarQuantizer size;
  ScalarQuantizer duration;
};

inline Quantizer fit_quantizer(std::span<const Flow> flows,
                               const IpClusterModel& model,
                               std::array<std::uint32_t, 3> levels) {
  if (flows.empty()) throw EmptyReferenceError("no flows to fit quantizer");
  Quantizer q;
  q.distance.levels = levels[0];
  q.size.levels = levels[1];
  q.duration.levels = levels[2];
  q.distance.lo = q.size.lo = q.duration.lo =
      std::numeric_limits<double>::infinity();
  q.distance.hi = q.size.hi = q.duration.hi =
      -std::numeric_limits<double>::infinity();
  for (const Flow& f : flows) {
    double da = model.distance_to_center(f.user_ip);
    q.distance.lo = std::min(q.distance.lo, da);
    q.distance.hi = std::max(q.distance.hi, da);
    q.size.lo = std::min(q.size.lo, f.size_bytes);
    q.size.hi = std::max(q.size.hi, f.size_bytes);
    q.duration.lo = std::min(q.duration.lo, f.duration_s);
    q.duration.hi = std::max(q.duration.hi, f.duration_s);
  }
  return q;
}

// Mixed-radix symbol space over (cluster, distance, size, duration) levels.
// Cluster is the most significant digit, duration the least.
struct SymbolAlphabet {
  std::uint32_t cluster_count = 1;
  std::uint32_t distance_levels = 1;
  std::uint32_t size_levels = 1;
  std::uint32_t duration_levels = 1;

  std::uint32_t total() const {
    return cluster_count * distance_levels * size_levels * duration_levels;
  }

  std::uint32_t encode(std::uint32_t cluster, std::uint32_t distance,
                       std::uint32_t size, std::uint32_t duration) const {
    return ((cluster * distance_levels + distance) * size_levels + size) *
               duration_levels +
           duration;
  }

  // Feature values in channel order: {cluster, distance, size, duration}.
  std::array<std::uint32_t, 4> decode(std::uint32_t symbol) const {
    std::array<std::uint32_t, 4> out{};
    out[3] = symbol % duration_levels;
    symbol /= duration_levels;
    out[2] = symbol % size_levels;
    symbol /= size_levels;
    out[1] = symbol % distance_levels;
    symbol /= distance_levels;
    out[0] = symbol;
    return out;
  }

  std::uint32_t levels_of_feature(std::uint32_t feature) const {
    switch (feature) {
      case 1: return cluster_count;
      case 2: return distance_levels;
      case 3: return size_levels;
      default: return duration_levels;
    }
  }
};

inline SymbolAlphabet make_alphabet(const IpClusterModel& model,
                                    const Quantizer& q) {
  return {model.cluster_count(), q.distance.levels, q.size.levels,
          q.duration.levels};
}

struct QuantizedFlow {
  double start_time_s = 0;
  std::uint32_t symbol = 0;
};

inline std::vector<QuantizedFlow> quantize_flows(std::span<const Flow> flows,
                                                 const IpClusterModel& model,
                                                 const Quantizer& q) {
  SymbolAlphabet alphabet = make_alphabet(model, q);
  std::vector<QuantizedFlow> out;
  out.reserve(flows.size());
  for (const Flow& f : flows) {
    std::uint32_t cluster = model.assign(f.user_ip);
    std::uint32_t da = q.distance.quantize(model.distance_to_center(f.user_ip));
    std::uint32_t b = q.size.quantize(f.size_bytes);
    std::uint32_t dt = q.duration.quantize(f.duration_s);
    out.push_back({f.start_time_s, alphabet.encode(cluster, da, b, dt)});
  }
  return out;
}

using SymbolWindow = BasicWindow<QuantizedFlow>;

}  // namespace dynanom
