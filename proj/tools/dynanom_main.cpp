// Command-line front end: generate synthetic diurnal traffic, learn a PL
// family from reference flows, run detection on a timeline, and score it
// against ground truth.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynanom/dynanom.hpp"

namespace {

using dynanom::io::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::vector<dynanom::Flow> load_flows(const std::string& flows_path,
                                      const std::string& packets_path,
                                      double flow_gap_s) {
  std::vector<dynanom::Flow> flows;
  if (!packets_path.empty()) {
    auto packets = dynanom::io::read_packets_csv(packets_path);
    flows = dynanom::compile_flows(packets, flow_gap_s);
  } else {
    flows = dynanom::io::read_flows_csv(flows_path);
  }
  if (flows.empty())
    throw dynanom::ParseError("input contains no flows");
  return flows;
}

int cmd_generate(const std::string& config_path, const std::string& out_path,
                 const std::string& truth_path,
                 std::optional<std::uint64_t> seed) {
  auto cfg = dynanom::io::generator_config_from_json(
      dynanom::io::read_json_file(config_path));
  if (seed) cfg.seed = *seed;
  auto traffic = dynanom::generate_traffic(cfg);
  dynanom::io::write_flows_csv(out_path, traffic.flows);
  if (!truth_path.empty())
    dynanom::io::write_json_file(
        truth_path, dynanom::io::ground_truth_to_json(traffic.truth));
  std::printf("generated %zu flows over %.0f s from %zu nodes (%zu anomalies)\n",
              traffic.flows.size(), cfg.horizon_s, cfg.nodes.size(),
              cfg.anomalies.size());
  return 0;
}

int cmd_estimate(const std::string& config_path, const std::string& flows_path,
                 const std::string& packets_path, const std::string& model_path,
                 const std::string& family_path,
                 const std::string& report_path) {
  auto cfg =
      dynanom::io::run_config_from_json(dynanom::io::read_json_file(config_path));
  auto flows = load_flows(flows_path, packets_path, cfg.windowing.flow_gap_s);
  auto result = dynanom::run_estimate(flows, cfg);

  dynanom::io::write_json_file(model_path,
                               dynanom::io::model_to_json(result.model));
  dynanom::io::write_json_file(
      family_path, dynanom::io::family_file_to_json(result.family));
  if (!report_path.empty())
    dynanom::io::write_json_file(report_path,
                                 dynanom::estimate_report_json(result));

  std::printf("flows: %zu (%zu outside horizon)\n", result.flow_count,
              result.dropped_outside_horizon);
  std::printf("windows: %zu (%zu eligible)\n", result.window_count,
              result.eligible_window_count);
  for (std::size_t f = 0; f < 4; ++f) {
    const auto& e = result.feature_estimates[f];
    std::printf("feature %zu: t_d=%s t_p=%s\n", f + 1,
                e.quiet_threshold_s
                    ? dynanom::io::format_double(*e.quiet_threshold_s).c_str()
                    : "-",
                e.period_s ? dynanom::io::format_double(*e.period_s).c_str()
                           : "-");
  }
  std::printf("model-free: %zu of %zu candidates selected (c_v sum %.4f)\n",
              result.selection_free.primary_cost, result.candidate_count_free,
              result.selection_free.secondary_cost);
  std::printf("model-based: %zu of %zu candidates selected (c_v sum %.4f)\n",
              result.selection_based.primary_cost,
              result.candidate_count_based,
              result.selection_based.secondary_cost);
  return 0;
}

int cmd_detect(const std::string& config_path, const std::string& flows_path,
               const std::string& packets_path, const std::string& model_path,
               const std::string& family_path, const std::string& out_path,
               bool vanilla, const std::string& method,
               std::optional<double> lambda_free,
               std::optional<double> lambda_based) {
  auto cfg =
      dynanom::io::run_config_from_json(dynanom::io::read_json_file(config_path));
  auto model =
      dynanom::io::model_from_json(dynanom::io::read_json_file(model_path));
  auto family = dynanom::io::family_file_from_json(
      dynanom::io::read_json_file(family_path));
  auto flows = load_flows(flows_path, packets_path, cfg.windowing.flow_gap_s);

  dynanom::DetectOptions opt;
  opt.vanilla = vanilla;
  opt.run_free = method != "based";
  opt.run_based = method != "free";
  opt.lambda_free = lambda_free;
  opt.lambda_based = lambda_based;
  auto verdicts = dynanom::run_detect(flows, model, family, cfg, opt);
  dynanom::io::write_timeline_csv(out_path, verdicts);

  std::size_t sparse = 0, alarms_free = 0, alarms_based = 0;
  for (const auto& v : verdicts) {
    sparse += v.sparse ? 1 : 0;
    alarms_free += v.alarm_free ? 1 : 0;
    alarms_based += v.alarm_based ? 1 : 0;
  }
  std::printf("windows: %zu (%zu sparse)\n", verdicts.size(), sparse);
  if (opt.run_free)
    std::printf("model-free alarms: %zu\n", alarms_free);
  if (opt.run_based)
    std::printf("model-based alarms: %zu\n", alarms_based);
  return 0;
}

int cmd_evaluate(const std::string& config_path,
                 const std::string& timeline_path,
                 const std::string& truth_path, const std::string& out_path,
                 const std::string& method) {
  auto cfg =
      dynanom::io::run_config_from_json(dynanom::io::read_json_file(config_path));
  auto timeline = dynanom::io::read_timeline_csv(timeline_path);
  auto truth = dynanom::io::ground_truth_from_json(
      dynanom::io::read_json_file(truth_path));

  json out = json::object();
  for (bool based : {false, true}) {
    if (based && method == "free") continue;
    if (!based && method == "based") continue;
    auto metrics = dynanom::evaluate_timeline(timeline, truth,
                                              cfg.windowing.window_size_s,
                                              based);
    out[metrics.method] = dynanom::metrics_to_json(metrics);
    std::printf("%s: FA rate %.4f, %zu/%zu anomalies detected\n",
                metrics.method.c_str(), metrics.false_alarm_rate,
                static_cast<std::size_t>(
                    std::count_if(metrics.anomalies.begin(),
                                  metrics.anomalies.end(),
                                  [](const auto& a) { return a.detected; })),
                metrics.anomalies.size());
  }
  if (!out_path.empty()) dynanom::io::write_json_file(out_path, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anomaly detection for time-varying network flow traffic"};
  app.require_subcommand(1);

  std::string config_path, flows_path, packets_path, model_path, family_path;
  std::string out_path, truth_path, report_path, timeline_path;
  std::string method = "both";
  bool vanilla = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda_free, lambda_based;

  auto* gen = app.add_subcommand("generate", "synthesize diurnal flow traffic");
  gen->add_option("--config", config_path, "generator config JSON")->required();
  gen->add_option("--out", out_path, "output flow CSV")->required();
  gen->add_option("--truth", truth_path, "output ground-truth JSON");
  gen->add_option("--seed", seed, "override the config seed");

  auto* est = app.add_subcommand("estimate", "learn a PL family from flows");
  est->add_option("--config", config_path, "run config JSON")->required();
  est->add_option("--flows", flows_path, "input flow CSV");
  est->add_option("--packets", packets_path,
                  "input packet CSV (compiled to flows)");
  est->add_option("--model", model_path, "output model JSON")->required();
  est->add_option("--family", family_path, "output PL-family JSON")->required();
  est->add_option("--report", report_path, "output refinement report JSON");

  auto* det = app.add_subcommand("detect", "run the test on a flow timeline");
  det->add_option("--config", config_path, "run config JSON")->required();
  det->add_option("--flows", flows_path, "input flow CSV");
  det->add_option("--packets", packets_path,
                  "input packet CSV (compiled to flows)");
  det->add_option("--model", model_path, "model JSON from estimate")->required();
  det->add_option("--family", family_path, "PL-family JSON from estimate")
      ->required();
  det->add_option("--out", out_path, "output timeline CSV")->required();
  det->add_flag("--vanilla", vanilla, "use the single-PL baseline family");
  det->add_option("--method", method, "free|based|both")
      ->check(CLI::IsMember({"free", "based", "both"}));
  det->add_option("--lambda-free", lambda_free, "override model-free lambda");
  det->add_option("--lambda-based", lambda_based,
                  "override model-based lambda");

  auto* eva = app.add_subcommand("evaluate", "score a timeline against truth");
  eva->add_option("--config", config_path, "run config JSON")->required();
  eva->add_option("--timeline", timeline_path, "timeline CSV from detect")
      ->required();
  eva->add_option("--truth", truth_path, "ground-truth JSON")->required();
  eva->add_option("--out", out_path, "output metrics JSON");
  eva->add_option("--method", method, "free|based|both")
      ->check(CLI::IsMember({"free", "based", "both"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(config_path, out_path, truth_path, seed);
    if (*est) {
      if (flows_path.empty() == packets_path.empty()) {
        std::fprintf(stderr,
                     "estimate needs exactly one of --flows / --packets\n");
        return kExitUsage;
      }
      return cmd_estimate(config_path, flows_path, packets_path, model_path,
                          family_path, report_path);
    }
    if (*det) {
      if (flows_path.empty() == packets_path.empty()) {
        std::fprintf(stderr,
                     "detect needs exactly one of --flows / --packets\n");
        return kExitUsage;
      }
      return cmd_detect(config_path, flows_path, packets_path, model_path,
                        family_path, out_path, vanilla, method, lambda_free,
                        lambda_based);
    }
    if (*eva)
      return cmd_evaluate(config_path, timeline_path, truth_path, out_path,
                          method);
  } catch (const dynanom::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const dynanom::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return 0;
}
