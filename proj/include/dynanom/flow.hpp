#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynanom/errors.hpp"

namespace dynanom {

struct Ipv4 {
  std::array<std::uint8_t, 4> octets{};

  auto operator<=>(const Ipv4&) const = default;

  std::array<double, 4> as_point() const {
    return {static_cast<double>(octets[0]), static_cast<double>(octets[1]),
            static_cast<double>(octets[2]), static_cast<double>(octets[3])};
  }

  static Ipv4 parse(std::string_view text) {
    Ipv4 ip;
    const char* p = text.data();
    const char* end = p + text.size();
    for (int i = 0; i < 4; ++i) {
      int value = -1;
      auto [next, ec] = std::from_chars(p, end, value);
      if (ec != std::errc{} || value < 0 || value > 255)
        throw ParseError("bad IPv4 address: " + std::string(text));
      ip.octets[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value);
      p = next;
      if (i < 3) {
        if (p == end || *p != '.')
          throw ParseError("bad IPv4 address: " + std::string(text));
        ++p;
      }
    }
    if (p != end) throw ParseError("bad IPv4 address: " + std::string(text));
    return ip;
  }

  std::string to_string() const {
    std::string out;
    for (int i = 0; i < 4; ++i) {
      if (i) out += '.';
      out += std::to_string(octets[static_cast<std::size_t>(i)]);
    }
    return out;
  }
};

struct Packet {
  double start_time_s = 0;
  Ipv4 user_ip;
  double size_bytes = 0;
};

struct Flow {
  double start_time_s = 0;
  Ipv4 user_ip;
  double size_bytes = 0;
  double duration_s = 0;
};

struct WindowingConfig {
  double window_size_s = 2000;
  double hop_s = 2000;
  double flow_gap_s = 60;

  void validate() const {
    if (!(window_size_s > 0) || !(hop_s > 0) || !(flow_gap_s > 0))
      throw ParseError("windowing parameters must be positive");
  }
};

template <typename ItemT>
struct BasicWindow {
  std::size_t index = 0;
  double start_s = 0;
  double end_s = 0;
  std::vector<ItemT> items;

  bool empty() const { return items.empty(); }
};

using FlowWindow = BasicWindow<Flow>;

// Groups a time-sorted packet stream into flows: per IP, packets closer
// than flow_gap_s to the previous one extend the open flow, anything else
// starts a new flow. Flow size is the byte sum, duration the span between
// first and last packet. Output is sorted by (start_time, ip).
inline std::vector<Flow> compile_flows(std::span<const Packet> packets,
                                       double flow_gap_s) {
  if (!(flow_gap_s > 0)) throw ParseError("flow_gap_s must be positive");

  struct Open {
    double first_s = 0;
    double last_s = 0;
    double bytes = 0;
  };
  std::map<Ipv4, Open> open;
  std::vector<Flow> flows;
  double prev_time = -std::numeric_limits<double>::infinity();

  for (const Packet& p : packets) {
    if (p.start_time_s < prev_time)
      throw UnsortedInputError("packet timestamps decrease at t=" +
                               std::to_string(p.start_time_s));
    prev_time = p.start_time_s;

    auto it = open.find(p.user_ip);
    if (it != open.end() && p.start_time_s - it->second.last_s < flow_gap_s) {
      it->second.last_s = p.start_time_s;
      it->second.bytes += p.size_bytes;
      continue;
    }
    if (it != open.end()) {
      flows.push_back({it->second.first_s, p.user_ip, it->second.bytes,
                       it->second.last_s - it->second.first_s});
      it->second = {p.start_time_s, p.start_time_s, p.size_bytes};
    } else {
      open.emplace(p.user_ip,
                   Open{p.start_time_s, p.start_time_s, p.size_bytes});
    }
  }
  for (const auto& [ip, o] : open)
    flows.push_back({o.first_s, ip, o.bytes, o.last_s - o.first_s});

  std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
    if (a.start_time_s != b.start_time_s) return a.start_time_s < b.start_time_s;
    return a.user_ip < b.user_ip;
  });
  return flows;
}

inline std::size_t window_count(double horizon_begin_s, double horizon_end_s,
                                const WindowingConfig& cfg) {
  double span = horizon_end_s - horizon_begin_s - cfg.window_size_s;
  if (span < 0) return 0;
  return static_cast<std::size_t>(std::floor(span / cfg.hop_s)) + 1;
}

// Slides windows of window_size_s seconds, hop_s apart, across the horizon
// [begin, end); only windows fully inside the horizon are emitted. An item
// belongs to window k iff begin + k*hop <= start_time < begin + k*hop + size
// (membership by start time only). Items must be time-sorted. Windows with
// no items are still emitted. Items outside every window are ignored.
template <typename ItemT>
std::vector<BasicWindow<ItemT>> aggregate_windows(std::span<const ItemT> items,
                                                  const WindowingConfig& cfg,
                                                  double horizon_begin_s,
                                                  double horizon_end_s) {
  cfg.validate();
  for (std::size_t i = 1; i < items.size(); ++i)
    if (items[i].start_time_s < items[i - 1].start_time_s)
      throw UnsortedInputError("window input not sorted by start time");

  std::size_t count = window_count(horizon_begin_s, horizon_end_s, cfg);
  std::vector<BasicWindow<ItemT>> windows(count);
  for (std::size_t k = 0; k < count; ++k) {
    double start = horizon_begin_s + static_cast<double>(k) * cfg.hop_s;
    windows[k].index = k;
    windows[k].start_s = start;
    windows[k].end_s = start + cfg.window_size_s;

    auto lo = std::lower_bound(items.begin(), items.end(), start,
                               [](const ItemT& f, double t) {
                                 return f.start_time_s < t;
                               });
    for (auto it = lo; it != items.end() && it->start_time_s < windows[k].end_s;
         ++it)
      windows[k].items.push_back(*it);
  }
  return windows;
}

}  // namespace dynanom
