#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dynanom/detector.hpp"
#include "dynanom/errors.hpp"
#include "dynanom/features.hpp"
#include "dynanom/flow.hpp"
#include "dynanom/measures.hpp"
#include "dynanom/pl_learning.hpp"
#include "dynanom/pl_refinement.hpp"
#include "dynanom/traffic_gen.hpp"

namespace dynanom::io {

using nlohmann::json;

// %.17g guarantees exact double round trips and a fixed byte rendering.
inline std::string format_double(double v) {
  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

inline double parse_double(std::string_view text, const char* what) {
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ParseError(std::string("bad ") + what + ": '" + std::string(text) +
                     "'");
  return v;
}

inline std::size_t parse_size(std::string_view text, const char* what) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ParseError(std::string("bad ") + what + ": '" + std::string(text) +
                     "'");
  return v;
}

// Write-then-rename so readers never observe a half-written file.
inline void atomic_write(const std::filesystem::path& path,
                         std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline std::vector<std::string_view> split_csv_row(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

// Line iteration tolerating a trailing newline and CRLF endings.
template <typename Fn>
void for_each_csv_line(std::string_view text, Fn&& fn) {
  std::size_t begin = 0;
  std::size_t line_no = 0;
  while (begin < text.size()) {
    std::size_t nl = text.find('\n', begin);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(begin)
                                : text.substr(begin, nl - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) fn(line_no, line);
    ++line_no;
    if (nl == std::string_view::npos) break;
    begin = nl + 1;
  }
}

// ---- flow and packet CSV ----
// flows: start_time,ip,size_bytes,duration_s
// packets: start_time,ip,size_bytes

inline constexpr std::string_view kFlowHeader =
    "start_time,ip,size_bytes,duration_s";
inline constexpr std::string_view kPacketHeader = "start_time,ip,size_bytes";

inline void write_flows_csv(const std::filesystem::path& path,
                            std::span<const Flow> flows) {
  std::string out;
  out.reserve(flows.size() * 48 + 64);
  out += kFlowHeader;
  out += '\n';
  for (const Flow& f : flows) {
    out += format_double(f.start_time_s);
    out += ',';
    out += f.user_ip.to_string();
    out += ',';
    out += format_double(f.size_bytes);
    out += ',';
    out += format_double(f.duration_s);
    out += '\n';
  }
  atomic_write(path, out);
}

inline std::vector<Flow> read_flows_csv(const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<Flow> flows;
  bool saw_header = false;
  for_each_csv_line(text, [&](std::size_t line_no, std::string_view line) {
    if (!saw_header) {
      if (line != kFlowHeader)
        throw ParseError(path.string() + ": expected header '" +
                         std::string(kFlowHeader) + "'");
      saw_header = true;
      return;
    }
    auto fields = split_csv_row(line);
    if (fields.size() != 4)
      throw ParseError(path.string() + ":" + std::to_string(line_no + 1) +
                       ": expected 4 fields");
    flows.push_back({parse_double(fields[0], "start_time"),
                     Ipv4::parse(fields[1]),
                     parse_double(fields[2], "size_bytes"),
                     parse_double(fields[3], "duration_s")});
  });
  if (!saw_header)
    throw ParseError(path.string() + ": empty file, header required");
  std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
    if (a.start_time_s != b.start_time_s) return a.start_time_s < b.start_time_s;
    return a.user_ip < b.user_ip;
  });
  return flows;
}

inline std::vector<Packet> read_packets_csv(
    const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<Packet> packets;
  bool saw_header = false;
  for_each_csv_line(text, [&](std::size_t line_no, std::string_view line) {
    if (!saw_header) {
      if (line != kPacketHeader)
        throw ParseError(path.string() + ": expected header '" +
                         std::string(kPacketHeader) + "'");
      saw_header = true;
      return;
    }
    auto fields = split_csv_row(line);
    if (fields.size() != 3)
      throw ParseError(path.string() + ":" + std::to_string(line_no + 1) +
                       ": expected 3 fields");
    packets.push_back({parse_double(fields[0], "start_time"),
                       Ipv4::parse(fields[1]),
                       parse_double(fields[2], "size_bytes")});
  });
  if (!saw_header)
    throw ParseError(path.string() + ": empty file, header required");
  return packets;
}

// ---- detection timeline CSV ----
// Absent divergences (sparse window or method not run) render as empty
// fields with an empty alarm cell; alarms otherwise render as 0/1.

inline constexpr std::string_view kTimelineHeader =
    "window_index,start_time,flow_count,div_free,argmin_free,alarm_free,"
    "div_based,argmin_based,alarm_based";

inline void write_timeline_csv(const std::filesystem::path& path,
                               std::span<const WindowVerdict> verdicts) {
  std::string out;
  out += kTimelineHeader;
  out += '\n';
  auto opt_double = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  auto opt_index = [](const std::optional<std::size_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  for (const WindowVerdict& v : verdicts) {
    out += std::to_string(v.window_index);
    out += ',';
    out += format_double(v.start_s);
    out += ',';
    out += std::to_string(v.flow_count);
    out += ',';
    out += opt_double(v.div_free);
    out += ',';
    out += opt_index(v.argmin_free);
    out += ',';
    out += v.div_free ? (v.alarm_free ? "1" : "0") : "";
    out += ',';
    out += opt_double(v.div_based);
    out += ',';
    out += opt_index(v.argmin_based);
    out += ',';
    out += v.div_based ? (v.alarm_based ? "1" : "0") : "";
    out += '\n';
  }
  atomic_write(path, out);
}

inline std::vector<WindowVerdict> read_timeline_csv(
    const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<WindowVerdict> verdicts;
  bool saw_header = false;
  for_each_csv_line(text, [&](std::size_t line_no, std::string_view line) {
    if (!saw_header) {
      if (line != kTimelineHeader)
        throw ParseError(path.string() + ": expected header '" +
                         std::string(kTimelineHeader) + "'");
      saw_header = true;
      return;
    }
    auto fields = split_csv_row(line);
    if (fields.size() != 9)
      throw ParseError(path.string() + ":" + std::to_string(line_no + 1) +
                       ": expected 9 fields");
    WindowVerdict v;
    v.window_index = parse_size(fields[0], "window_index");
    v.start_s = parse_double(fields[1], "start_time");
    v.flow_count = parse_size(fields[2], "flow_count");
    if (!fields[3].empty()) {
      v.div_free = parse_double(fields[3], "div_free");
      v.argmin_free = parse_size(fields[4], "argmin_free");
      v.alarm_free = fields[5] == "1";
    }
    if (!fields[6].empty()) {
      v.div_based = parse_double(fields[6], "div_based");
      v.argmin_based = parse_size(fields[7], "argmin_based");
      v.alarm_based = fields[8] == "1";
    }
    v.sparse = !v.div_free && !v.div_based;
    verdicts.push_back(std::move(v));
  });
  if (!saw_header)
    throw ParseError(path.string() + ": empty file, header required");
  return verdicts;
}

// ---- JSON helpers ----

inline json parse_json(std::string_view text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON in " + what);
  return j;
}

inline json read_json_file(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string("missing required field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + key + "' has the wrong type");
  }
}

// ---- quantization model ----

inline json scalar_quantizer_to_json(const ScalarQuantizer& q) {
  return {{"lo", q.lo}, {"hi", q.hi}, {"levels", q.levels}};
}

inline ScalarQuantizer scalar_quantizer_from_json(const json& j) {
  ScalarQuantizer q;
  q.lo = require<double>(j, "lo");
  q.hi = require<double>(j, "hi");
  q.levels = require<std::uint32_t>(j, "levels");
  return q;
}

struct Model {
  IpClusterModel clusters;
  Quantizer quantizer;

  SymbolAlphabet alphabet() const { return make_alphabet(clusters, quantizer); }
};

inline json model_to_json(const Model& m) {
  json centers = json::array();
  for (const auto& c : m.clusters.centers)
    centers.push_back(json::array({c[0], c[1], c[2], c[3]}));
  return {{"cluster_centers", centers},
          {"quantizer",
           {{"distance", scalar_quantizer_to_json(m.quantizer.distance)},
            {"size", scalar_quantizer_to_json(m.quantizer.size)},
            {"duration", scalar_quantizer_to_json(m.quantizer.duration)}}}};
}

inline Model model_from_json(const json& j) {
  Model m;
  auto centers = require<json>(j, "cluster_centers");
  if (!centers.is_array() || centers.empty())
    throw ParseError("cluster_centers must be a non-empty array");
  for (const auto& c : centers) {
    if (!c.is_array() || c.size() != 4)
      throw ParseError("each cluster center needs 4 coordinates");
    m.clusters.centers.push_back(
        {c[0].get<double>(), c[1].get<double>(), c[2].get<double>(),
         c[3].get<double>()});
  }
  auto q = require<json>(j, "quantizer");
  m.quantizer.distance = scalar_quantizer_from_json(require<json>(q, "distance"));
  m.quantizer.size = scalar_quantizer_from_json(require<json>(q, "size"));
  m.quantizer.duration =
      scalar_quantizer_from_json(require<json>(q, "duration"));
  return m;
}

// ---- PL families ----

inline json provenance_to_json(const PLProvenance& p) {
  return {{"source", p.source},
          {"quiet_threshold_s", p.quiet_threshold_s},
          {"period_s", p.period_s},
          {"segment", p.segment},
          {"segment_count", p.segment_count}};
}

inline PLProvenance provenance_from_json(const json& j) {
  PLProvenance p;
  p.source = require<std::string>(j, "source");
  p.quiet_threshold_s = require<double>(j, "quiet_threshold_s");
  p.period_s = require<double>(j, "period_s");
  p.segment = require<std::uint32_t>(j, "segment");
  p.segment_count = require<std::uint32_t>(j, "segment_count");
  return p;
}

inline json family_to_json(const ModelFreeFamily& f) {
  json pls = json::array();
  for (std::size_t i = 0; i < f.pls.size(); ++i)
    pls.push_back({{"probs", f.pls[i].probs},
                   {"sample_count", f.pls[i].sample_count},
                   {"c_v", i < f.c_v.size() ? f.c_v[i] : 0.0},
                   {"provenance", provenance_to_json(f.provenance[i])}});
  return {{"kind", "model_free"}, {"pls", pls}};
}

inline json family_to_json(const ModelBasedFamily& f) {
  json pls = json::array();
  for (std::size_t i = 0; i < f.pls.size(); ++i)
    pls.push_back({{"pair_probs", f.pls[i].pair_probs},
                   {"alphabet", f.pls[i].alphabet},
                   {"pair_count", f.pls[i].pair_count},
                   {"c_v", i < f.c_v.size() ? f.c_v[i] : 0.0},
                   {"provenance", provenance_to_json(f.provenance[i])}});
  return {{"kind", "model_based"}, {"pls", pls}};
}

inline ModelFreeFamily free_family_from_json(const json& j) {
  if (get_or<std::string>(j, "kind", "") != "model_free")
    throw ParseError("expected a model_free family");
  ModelFreeFamily f;
  for (const auto& pj : require<json>(j, "pls")) {
    ModelFreeMeasure m;
    m.probs = require<std::vector<double>>(pj, "probs");
    m.sample_count = require<std::size_t>(pj, "sample_count");
    f.pls.push_back(std::move(m));
    f.c_v.push_back(require<double>(pj, "c_v"));
    f.provenance.push_back(provenance_from_json(require<json>(pj, "provenance")));
  }
  return f;
}

inline ModelBasedFamily based_family_from_json(const json& j) {
  if (get_or<std::string>(j, "kind", "") != "model_based")
    throw ParseError("expected a model_based family");
  ModelBasedFamily f;
  for (const auto& pj : require<json>(j, "pls")) {
    ModelBasedMeasure m;
    m.pair_probs = require<std::vector<double>>(pj, "pair_probs");
    m.alphabet = require<std::uint32_t>(pj, "alphabet");
    m.pair_count = require<std::size_t>(pj, "pair_count");
    if (m.pair_probs.size() !=
        static_cast<std::size_t>(m.alphabet) * m.alphabet)
      throw ParseError("pair_probs size does not match alphabet");
    f.pls.push_back(std::move(m));
    f.c_v.push_back(require<double>(pj, "c_v"));
    f.provenance.push_back(provenance_from_json(require<json>(pj, "provenance")));
  }
  return f;
}

// The family file carries the refined families plus the single-PL baselines
// so baseline detection needs no access to the reference data.
struct FamilyFile {
  std::uint32_t alphabet_size = 0;
  double lambda_free = 0.6;
  double lambda_based = 0.4;
  ModelFreeFamily model_free;
  ModelBasedFamily model_based;
  ModelFreeFamily vanilla_free;
  ModelBasedFamily vanilla_based;
};

inline json family_file_to_json(const FamilyFile& f) {
  return {{"alphabet_size", f.alphabet_size},
          {"lambda_free", f.lambda_free},
          {"lambda_based", f.lambda_based},
          {"model_free", family_to_json(f.model_free)},
          {"model_based", family_to_json(f.model_based)},
          {"vanilla_model_free", family_to_json(f.vanilla_free)},
          {"vanilla_model_based", family_to_json(f.vanilla_based)}};
}

inline FamilyFile family_file_from_json(const json& j) {
  FamilyFile f;
  f.alphabet_size = require<std::uint32_t>(j, "alphabet_size");
  f.lambda_free = require<double>(j, "lambda_free");
  f.lambda_based = require<double>(j, "lambda_based");
  f.model_free = free_family_from_json(require<json>(j, "model_free"));
  f.model_based = based_family_from_json(require<json>(j, "model_based"));
  f.vanilla_free = free_family_from_json(require<json>(j, "vanilla_model_free"));
  f.vanilla_based =
      based_family_from_json(require<json>(j, "vanilla_model_based"));
  for (const auto& pl : f.model_free.pls)
    if (pl.alphabet_size() != f.alphabet_size)
      throw AlphabetMismatchError("family PL alphabet != declared alphabet");
  for (const auto& pl : f.model_based.pls)
    if (pl.alphabet != f.alphabet_size)
      throw AlphabetMismatchError("family PL alphabet != declared alphabet");
  return f;
}

// ---- ground truth ----

inline json ground_truth_to_json(const GroundTruth& t) {
  json entries = json::array();
  for (const auto& e : t.entries)
    entries.push_back({{"id", e.id},
                       {"ip", e.ip.to_string()},
                       {"start_s", e.start_s},
                       {"end_s", e.end_s},
                       {"mean_size_multiplier", e.mean_size_multiplier}});
  return {{"horizon_s", t.horizon_s}, {"entries", entries}};
}

inline GroundTruth ground_truth_from_json(const json& j) {
  GroundTruth t;
  t.horizon_s = require<double>(j, "horizon_s");
  for (const auto& ej : require<json>(j, "entries"))
    t.entries.push_back({require<std::string>(ej, "id"),
                         Ipv4::parse(require<std::string>(ej, "ip")),
                         require<double>(ej, "start_s"),
                         require<double>(ej, "end_s"),
                         require<double>(ej, "mean_size_multiplier")});
  return t;
}

// ---- generator config ----

inline json profile_to_json(const DiurnalProfile& p) {
  json samples = json::array();
  for (const auto& [phase, lvl] : p.samples)
    samples.push_back(json::array({phase, lvl}));
  return {{"period_s", p.period_s}, {"samples", samples}};
}

inline DiurnalProfile profile_from_json(const json& j) {
  DiurnalProfile p;
  p.period_s = require<double>(j, "period_s");
  for (const auto& s : require<json>(j, "samples")) {
    if (!s.is_array() || s.size() != 2)
      throw ParseError("profile samples are [phase, level] pairs");
    p.samples.emplace_back(s[0].get<double>(), s[1].get<double>());
  }
  p.validate();
  return p;
}

inline json generator_config_to_json(const GeneratorConfig& c) {
  json nodes = json::array();
  for (const auto& n : c.nodes)
    nodes.push_back({{"ip", n.ip.to_string()},
                     {"peak_rate_fps", n.peak_rate_fps},
                     {"peak_mean_size_bytes", n.peak_mean_size_bytes},
                     {"size_stddev_bytes", n.size_stddev_bytes},
                     {"mean_duration_s", n.mean_duration_s}});
  json anomalies = json::array();
  for (const auto& a : c.anomalies)
    anomalies.push_back({{"id", a.id},
                         {"ip", a.ip.to_string()},
                         {"start_s", a.start_s},
                         {"duration_s", a.duration_s},
                         {"mean_size_multiplier", a.mean_size_multiplier}});
  return {{"seed", c.seed},
          {"horizon_s", c.horizon_s},
          {"clock_offset_s", c.clock_offset_s},
          {"profile", profile_to_json(c.profile)},
          {"nodes", nodes},
          {"anomalies", anomalies}};
}

inline GeneratorConfig generator_config_from_json(const json& j) {
  GeneratorConfig c;
  c.seed = require<std::uint64_t>(j, "seed");
  c.horizon_s = require<double>(j, "horizon_s");
  c.clock_offset_s = get_or<double>(j, "clock_offset_s", 0.0);
  if (j.contains("profile")) {
    const json& pj = j.at("profile");
    if (pj.is_string() && pj.get<std::string>() == "default")
      c.profile = default_diurnal_profile();
    else
      c.profile = profile_from_json(pj);
  }
  for (const auto& nj : require<json>(j, "nodes")) {
    NodeSpec n;
    n.ip = Ipv4::parse(require<std::string>(nj, "ip"));
    n.peak_rate_fps = require<double>(nj, "peak_rate_fps");
    n.peak_mean_size_bytes = require<double>(nj, "peak_mean_size_bytes");
    n.size_stddev_bytes = require<double>(nj, "size_stddev_bytes");
    n.mean_duration_s = require<double>(nj, "mean_duration_s");
    c.nodes.push_back(std::move(n));
  }
  if (j.contains("anomalies"))
    for (const auto& aj : j.at("anomalies")) {
      AnomalySpec a;
      a.id = require<std::string>(aj, "id");
      a.ip = Ipv4::parse(require<std::string>(aj, "ip"));
      a.start_s = require<double>(aj, "start_s");
      a.duration_s = require<double>(aj, "duration_s");
      a.mean_size_multiplier = require<double>(aj, "mean_size_multiplier");
      c.anomalies.push_back(std::move(a));
    }
  return c;
}

// ---- run config (estimate / detect / evaluate) ----

struct FeatureConfig {
  std::uint32_t cluster_count = 2;
  std::uint64_t cluster_seed = 1;
  std::uint32_t distance_levels = 2;
  std::uint32_t size_levels = 2;
  std::uint32_t duration_levels = 8;
};

struct RunConfig {
  double horizon_begin_s = 0;
  double horizon_end_s = 604800;
  WindowingConfig windowing;
  FeatureConfig features;
  HistogramConfig histogram;
  std::vector<PeriodPair> priors;
  DivergenceConfig divergence;
  DetectionConfig detection;
  RefinementParams refinement;
};

inline RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  auto h = require<json>(j, "horizon");
  c.horizon_begin_s = get_or<double>(h, "begin_s", 0.0);
  c.horizon_end_s = require<double>(h, "end_s");
  if (!(c.horizon_end_s > c.horizon_begin_s))
    throw ParseError("horizon end_s must exceed begin_s");

  if (j.contains("windowing")) {
    const json& w = j.at("windowing");
    c.windowing.window_size_s =
        get_or<double>(w, "window_size_s", c.windowing.window_size_s);
    c.windowing.hop_s = get_or<double>(w, "hop_s", c.windowing.hop_s);
    c.windowing.flow_gap_s =
        get_or<double>(w, "flow_gap_s", c.windowing.flow_gap_s);
  }
  c.windowing.validate();

  if (j.contains("features")) {
    const json& f = j.at("features");
    c.features.cluster_count =
        get_or<std::uint32_t>(f, "cluster_count", c.features.cluster_count);
    c.features.cluster_seed =
        get_or<std::uint64_t>(f, "cluster_seed", c.features.cluster_seed);
    c.features.distance_levels =
        get_or<std::uint32_t>(f, "distance_levels", c.features.distance_levels);
    c.features.size_levels =
        get_or<std::uint32_t>(f, "size_levels", c.features.size_levels);
    c.features.duration_levels = get_or<std::uint32_t>(
        f, "duration_levels", c.features.duration_levels);
    if (c.features.cluster_count == 0 || c.features.distance_levels == 0 ||
        c.features.size_levels == 0 || c.features.duration_levels == 0)
      throw ParseError("feature level counts must be positive");
  }

  if (j.contains("histogram")) {
    const json& hg = j.at("histogram");
    c.histogram.bin_width_s =
        get_or<double>(hg, "bin_width_s", c.histogram.bin_width_s);
    c.histogram.freq_threshold =
        get_or<double>(hg, "freq_threshold", c.histogram.freq_threshold);
    c.histogram.peak_min_prominence = get_or<double>(
        hg, "peak_min_prominence", c.histogram.peak_min_prominence);
    if (!(c.histogram.bin_width_s > 0))
      throw ParseError("histogram bin_width_s must be positive");
  }

  if (j.contains("priors")) {
    std::size_t k = 0;
    for (const auto& pj : j.at("priors")) {
      PeriodPair p;
      p.label = get_or<std::string>(pj, "label",
                                    "prior-" + std::to_string(++k));
      p.quiet_threshold_s = require<double>(pj, "quiet_threshold_s");
      p.period_s = require<double>(pj, "period_s");
      if (!(p.quiet_threshold_s > 0) || !(p.period_s > p.quiet_threshold_s))
        throw ParseError("prior needs 0 < quiet_threshold_s < period_s");
      c.priors.push_back(std::move(p));
    }
  }

  if (j.contains("divergence")) {
    c.divergence.epsilon =
        get_or<double>(j.at("divergence"), "epsilon", c.divergence.epsilon);
    if (!(c.divergence.epsilon > 0) || c.divergence.epsilon > 1e-6)
      throw ParseError("divergence epsilon must lie in (0, 1e-6]");
  }

  if (j.contains("detection")) {
    const json& d = j.at("detection");
    c.detection.lambda_free =
        get_or<double>(d, "lambda_free", c.detection.lambda_free);
    c.detection.lambda_based =
        get_or<double>(d, "lambda_based", c.detection.lambda_based);
    c.detection.min_flows_per_window = get_or<std::size_t>(
        d, "min_flows_per_window", c.detection.min_flows_per_window);
    if (!(c.detection.lambda_free > 0) || !(c.detection.lambda_based > 0))
      throw ParseError("detection thresholds must be positive");
  }

  if (j.contains("refinement")) {
    const json& r = j.at("refinement");
    c.refinement.gamma_start =
        get_or<double>(r, "gamma_start", c.refinement.gamma_start);
    c.refinement.discount_ratio =
        get_or<double>(r, "discount_ratio", c.refinement.discount_ratio);
    c.refinement.gamma_th = get_or<double>(r, "gamma_th", c.refinement.gamma_th);
    if (!(c.refinement.gamma_th > 0) ||
        !(c.refinement.discount_ratio > 0) ||
        c.refinement.discount_ratio >= 1.0 ||
        !(c.refinement.gamma_start >= c.refinement.gamma_th))
      throw ParseError("refinement needs gamma_start >= gamma_th > 0 and "
                       "0 < discount_ratio < 1");
  }
  return c;
}

}  // namespace dynanom::io
