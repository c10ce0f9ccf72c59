#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dynanom/errors.hpp"
#include "dynanom/flow.hpp"
#include "dynanom/rng.hpp"

namespace dynanom {

// Periodic activity level p(t) in (0, 1], piecewise linear between phase
// samples with wraparound. Scales both flow rate and mean flow size.
struct DiurnalProfile {
  double period_s = 86400;
  // (phase in [0,1), level); phases strictly increasing.
  std::vector<std::pair<double, double>> samples;

  void validate() const {
    if (!(period_s > 0)) throw ParseError("profile period must be positive");
    if (samples.empty()) throw ParseError("profile needs samples");
    double prev = -1;
    for (const auto& [phase, lvl] : samples) {
      if (phase < 0 || phase >= 1 || phase <= prev)
        throw ParseError("profile phases must increase within [0, 1)");
      if (!(lvl > 0) || lvl > 1)
        throw ParseError("profile levels must lie in (0, 1]");
      prev = phase;
    }
  }

  double level(double wall_time_s) const {
    double phase = std::fmod(wall_time_s / period_s, 1.0);
    if (phase < 0) phase += 1.0;
    // Bracketing samples with wraparound at either end of the cycle.
    std::size_t n = samples.size();
    std::size_t hi = 0;
    while (hi < n && samples[hi].first <= phase) ++hi;
    std::size_t lo_i = hi == 0 ? n - 1 : hi - 1;
    std::size_t hi_i = hi == n ? 0 : hi;
    double x0 = samples[lo_i].first - (hi == 0 ? 1.0 : 0.0);
    double x1 = samples[hi_i].first + (hi == n ? 1.0 : 0.0);
    double t = x1 > x0 ? (phase - x0) / (x1 - x0) : 0.0;
    return samples[lo_i].second +
           t * (samples[hi_i].second - samples[lo_i].second);
  }
};

// 24 hourly samples of a smooth day-night wave: trough 0.2 at 04:00, peak
// 1.0 at 20:00, tanh-shaped shoulders so the active and quiet plateaus are
// long and the transitions short.
inline DiurnalProfile default_diurnal_profile() {
  DiurnalProfile p;
  p.period_s = 86400;
  double scale = std::tanh(4.0);
  for (int h = 0; h < 24; ++h) {
    double lvl;
    if (h >= 4 && h <= 20)
      lvl = 0.6 + 0.4 * std::tanh((h - 12) / 2.0) / scale;
    else {
      double hh = h < 4 ? h + 24 : h;
      lvl = 0.6 - 0.4 * std::tanh((hh - 24) / 1.0) / scale;
    }
    p.samples.emplace_back(h / 24.0, std::min(lvl, 1.0));
  }
  return p;
}

struct NodeSpec {
  Ipv4 ip;
  double peak_rate_fps = 0.1;           // Poisson rate at p(t) = 1
  double peak_mean_size_bytes = 4e6;    // mean flow size at p(t) = 1
  double size_stddev_bytes = 1e5;
  double mean_duration_s = 60;
};

struct AnomalySpec {
  std::string id;
  Ipv4 ip;
  double start_s = 0;
  double duration_s = 0;
  double mean_size_multiplier = 1.0;
};

struct GroundTruth {
  struct Entry {
    std::string id;
    Ipv4 ip;
    double start_s = 0;
    double end_s = 0;
    double mean_size_multiplier = 1.0;
  };
  std::vector<Entry> entries;
  double horizon_s = 0;
};

struct GeneratorConfig {
  std::uint64_t seed = 1;
  double horizon_s = 604800;
  // Wall-clock time of t = 0; shifts where the horizon starts inside the
  // diurnal cycle.
  double clock_offset_s = 0;
  DiurnalProfile profile = default_diurnal_profile();
  std::vector<NodeSpec> nodes;
  std::vector<AnomalySpec> anomalies;
};

struct GeneratedTraffic {
  std::vector<Flow> flows;
  GroundTruth truth;
};

// Per node: inhomogeneous Poisson arrivals of rate peak_rate * p(t) via
// thinning, size ~ Normal(peak_mean_size * p(t) * multiplier, stddev^2)
// floored at 1 byte, duration ~ Exponential(mean_duration). Each node draws
// from its own engine seeded from (seed, node index), so adding or removing
// a node never perturbs the others. Output sorted by (start_time, ip).
inline GeneratedTraffic generate_traffic(const GeneratorConfig& cfg) {
  cfg.profile.validate();
  if (!(cfg.horizon_s > 0)) throw ParseError("horizon must be positive");
  if (cfg.nodes.empty()) throw ParseError("generator needs at least one node");

  GeneratedTraffic out;
  for (std::size_t node = 0; node < cfg.nodes.size(); ++node) {
    const NodeSpec& spec = cfg.nodes[node];
    rng::Engine eng(rng::derive_seed(cfg.seed, node));
    double t = 0;
    while (true) {
      t += rng::exponential(eng, 1.0 / spec.peak_rate_fps);
      if (t >= cfg.horizon_s) break;
      double p = cfg.profile.level(cfg.clock_offset_s + t);
      if (rng::uniform01(eng) >= p) continue;  // thinned out

      double multiplier = 1.0;
      for (const AnomalySpec& a : cfg.anomalies)
        if (a.ip == spec.ip && t >= a.start_s && t < a.start_s + a.duration_s)
          multiplier *= a.mean_size_multiplier;

      double size = rng::normal(eng, spec.peak_mean_size_bytes * p * multiplier,
                                spec.size_stddev_bytes);
      double duration = rng::exponential(eng, spec.mean_duration_s);
      out.flows.push_back({t, spec.ip, std::max(size, 1.0), duration});
    }
  }
  std::sort(out.flows.begin(), out.flows.end(),
            [](const Flow& a, const Flow& b) {
              if (a.start_time_s != b.start_time_s)
                return a.start_time_s < b.start_time_s;
              return a.user_ip < b.user_ip;
            });

  out.truth.horizon_s = cfg.horizon_s;
  for (const AnomalySpec& a : cfg.anomalies)
    out.truth.entries.push_back({a.id, a.ip, a.start_s,
                                 a.start_s + a.duration_s,
                                 a.mean_size_multiplier});
  return out;
}

}  // namespace dynanom
