#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cadnn/config.hpp"
#include "cadnn/diagnostics.hpp"
#include "cadnn/io.hpp"
#include "cadnn/metrics.hpp"
#include "cadnn/sim.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 2;
constexpr int kExitBadConfig = 3;

std::string hex_hash(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string run_stem(const cadnn::SimConfig& cfg) {
  return cadnn::controller_name(cfg.controller) + "_seed" +
         std::to_string(cfg.seed);
}

json metrics_json(const cadnn::RunMetrics& m) {
  return {{"e_rms_deg", m.e_rms_deg},
          {"f_err_rms_traj", m.f_err_rms_traj},
          {"f_err_rms_test", m.f_err_rms_test}};
}

json run_report(const cadnn::SimConfig& cfg, const cadnn::SimLog& log,
                std::optional<double> pe_window) {
  json rep;
  rep["controller"] = cadnn::controller_name(cfg.controller);
  rep["seed"] = cfg.seed;
  rep["config_hash"] = hex_hash(cadnn::config_hash(cfg));
  rep["status"] = log.status == cadnn::RunStatus::Completed ? "completed"
                                                            : "diverged";
  rep["end_time"] = log.end_time;
  if (log.status == cadnn::RunStatus::Completed) {
    rep["metrics"] = metrics_json(cadnn::run_metrics(log, cfg));
    rep["window"] = {cfg.window_start, cfg.window_end};

    const cadnn::GainConditionReport gc =
        cadnn::gain_condition_report(cfg.gains, log);
    rep["gain_condition"] = {
        {"gamma3", gc.gamma3},
        {"gamma3_time", gc.gamma3_time},
        {"alpha3_minus_half", gc.alpha3_minus_half},
        {"alpha3_ok", gc.alpha3_ok},
        {"leak_margin_needs_beta1", gc.leak_margin_needs_beta1}};

    if (pe_window) {
      json windows = json::array();
      for (const cadnn::PeWindow& w :
           cadnn::pe_monitor(log, cfg.dnn, *pe_window, 0.5 * *pe_window)) {
        windows.push_back({{"t_start", w.t_start},
                           {"t_end", w.t_end},
                           {"lambda_min", w.lambda_min},
                           {"lambda_max", w.lambda_max}});
      }
      rep["pe_windows"] = windows;
    }
  } else {
    rep["abort_reason"] = log.abort_reason;
  }
  return rep;
}

int cmd_simulate(const std::string& config_path,
                 const std::string& controller, std::optional<std::uint64_t> seed,
                 const std::string& out_dir, std::optional<double> pe_window) {
  cadnn::SimConfig cfg = cadnn::load_config(config_path);
  cfg.controller = cadnn::controller_from_name(controller);
  if (seed) cfg.seed = *seed;

  std::filesystem::create_directories(out_dir);
  const cadnn::SimLog log = cadnn::run_simulation(cfg);

  const std::string stem = out_dir + "/" + run_stem(cfg);
  cadnn::write_csv(log, stem + ".csv");
  cadnn::save_weights(stem + "_weights.json", log.theta_final);
  const json rep = run_report(cfg, log, pe_window);
  cadnn::write_text_file(stem + "_metrics.json", rep.dump(2) + "\n");
  std::cout << rep.dump(2) << "\n";

  return log.status == cadnn::RunStatus::Completed ? kExitOk : kExitDiverged;
}

int cmd_compare(const std::string& config_path, int n_seeds,
                const std::string& out_dir) {
  const cadnn::SimConfig cfg = cadnn::load_config(config_path);
  std::filesystem::create_directories(out_dir);

  const auto sink = [&](const cadnn::SimConfig& run_cfg,
                        const cadnn::SimLog& log) {
    const std::string stem = out_dir + "/" + run_stem(run_cfg);
    cadnn::write_csv(log, stem + ".csv");
    cadnn::save_weights(stem + "_weights.json", log.theta_final);
  };
  const cadnn::CompareReport report =
      cadnn::compare_experiment(cfg, n_seeds, sink);

  json doc;
  doc["config_hash"] = hex_hash(cadnn::config_hash(cfg));
  doc["seeds"] = n_seeds;
  doc["valid"] = report.valid;
  json pairs = json::array();
  for (const cadnn::PairOutcome& pair : report.pairs) {
    json pj;
    pj["seed"] = pair.seed;
    pj["valid"] = pair.valid;
    if (pair.valid) {
      pj["baseline"] = metrics_json(pair.baseline);
      pj["composite"] = metrics_json(pair.composite);
      pj["percent_decrease"] = {{"e_rms_deg", pair.dec_e},
                                {"f_err_rms_traj", pair.dec_traj},
                                {"f_err_rms_test", pair.dec_test}};
    }
    pairs.push_back(pj);
  }
  doc["pairs"] = pairs;
  if (report.valid) {
    doc["median"] = {
        {"baseline", metrics_json(report.baseline_median)},
        {"composite", metrics_json(report.composite_median)},
        {"percent_decrease", {{"e_rms_deg", report.dec_e_of_medians},
                              {"f_err_rms_traj", report.dec_traj_of_medians},
                              {"f_err_rms_test", report.dec_test_of_medians}}}};
  }
  cadnn::write_text_file(out_dir + "/compare_report.json", doc.dump(2) + "\n");
  std::cout << doc.dump(2) << "\n";

  return report.valid ? kExitOk : kExitDiverged;
}

int cmd_testgen(const std::string& weights_path, const std::string& config_path,
                int points, std::optional<std::uint64_t> seed,
                const std::string& out_path) {
  cadnn::SimConfig cfg = cadnn::load_config(config_path);
  const Eigen::VectorXd theta = cadnn::load_weights(weights_path);
  if (theta.size() != cadnn::param_count(cfg.dnn)) {
    throw cadnn::ConfigError("weight count does not match the dnn spec");
  }
  const std::uint64_t use_seed = seed.value_or(cfg.test_seed);
  const double rms = cadnn::test_set_eval(cfg, theta, points, use_seed);

  json doc;
  doc["weights"] = weights_path;
  doc["points"] = points;
  doc["seed"] = use_seed;
  doc["f_err_rms_test"] = rms;
  if (!out_path.empty()) {
    cadnn::write_text_file(out_path, doc.dump(2) + "\n");
  }
  std::cout << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Composite adaptive DNN tracking controller: closed-loop simulation "
      "and comparison harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::string controller = "composite";
  std::optional<std::uint64_t> seed;
  std::optional<double> pe_window;

  auto* sim = app.add_subcommand("simulate", "Run one closed-loop simulation");
  sim->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  sim->add_option("--controller", controller, "composite|baseline")
      ->check(CLI::IsMember({"composite", "baseline"}));
  sim->add_option("--seed", seed, "override the config seed");
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--pe-window", pe_window,
                  "also report excitation eigenvalues over windows of this "
                  "length (s)");

  int n_seeds = 5;
  auto* cmp = app.add_subcommand(
      "compare", "Run baseline and composite over a sweep of seeds");
  cmp->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  cmp->add_option("--seeds", n_seeds, "number of seeds (config seed + i)")
      ->check(CLI::PositiveNumber);
  cmp->add_option("--out", out_dir, "output directory")->required();

  std::string weights_path;
  std::string test_out;
  int points = 100;
  auto* tg = app.add_subcommand(
      "testgen", "Evaluate checkpointed weights on a random test set");
  tg->add_option("--weights", weights_path, "weight checkpoint (JSON or CSV)")
      ->required();
  tg->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  tg->add_option("--points", points, "test-set size")
      ->check(CLI::PositiveNumber);
  tg->add_option("--seed", seed, "test-set seed (default: config test_seed)");
  tg->add_option("--out", test_out, "optional JSON report path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(config_path, controller, seed, out_dir, pe_window);
    }
    if (cmp->parsed()) {
      return cmd_compare(config_path, n_seeds, out_dir);
    }
    return cmd_testgen(weights_path, config_path, points, seed, test_out);
  } catch (const cadnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadConfig;
  }
}
