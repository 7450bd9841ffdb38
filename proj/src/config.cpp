#include "cadnn/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "cadnn/io.hpp"

namespace cadnn {

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ConfigError(std::string("missing or non-numeric key: ") + key);
  }
  return obj[key].get<double>();
}

double optional_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ConfigError(std::string("non-numeric key: ") + key);
  }
  return obj[key].get<double>();
}

Eigen::Vector2d vector2(const json& arr, const char* key) {
  if (!arr.is_array() || arr.size() != 2) {
    throw ConfigError(std::string(key) + " must be a 2-element array");
  }
  return {arr[0].get<double>(), arr[1].get<double>()};
}

}  // namespace

SimConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("JSON parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be an object");

  SimConfig cfg;
  try {
    if (doc.contains("plant")) {
      const json& p = doc["plant"];
      cfg.plant.p1 = optional_number(p, "p1", cfg.plant.p1);
      cfg.plant.p2 = optional_number(p, "p2", cfg.plant.p2);
      cfg.plant.p3 = optional_number(p, "p3", cfg.plant.p3);
      cfg.plant.fd1 = optional_number(p, "fd1", cfg.plant.fd1);
      cfg.plant.fd2 = optional_number(p, "fd2", cfg.plant.fd2);
    }

    if (!doc.contains("gains")) throw ConfigError("missing key: gains");
    const json& g = doc["gains"];
    cfg.gains.alpha1 = require_number(g, "alpha1");
    cfg.gains.alpha2 = require_number(g, "alpha2");
    cfg.gains.alpha3 = require_number(g, "alpha3");
    cfg.gains.k_r = require_number(g, "k_r");
    cfg.gains.k_f = require_number(g, "k_f");
    cfg.gains.k_theta = require_number(g, "k_theta");
    cfg.gains.beta0 = require_number(g, "beta0");
    cfg.gains.kappa0 = require_number(g, "kappa0");
    cfg.gains.theta_bar = require_number(g, "theta_bar");
    cfg.gains.projection_band =
        optional_number(g, "projection_band", cfg.gains.projection_band);
    cfg.gamma0_scale = optional_number(g, "gamma0", cfg.gamma0_scale);

    if (!doc.contains("dnn")) throw ConfigError("missing key: dnn");
    const json& d = doc["dnn"];
    cfg.dnn.input_size = static_cast<int>(require_number(d, "input_size"));
    cfg.dnn.output_size = static_cast<int>(require_number(d, "output_size"));
    if (d.contains("hidden_widths")) {
      if (!d["hidden_widths"].is_array() || d["hidden_widths"].empty()) {
        throw ConfigError("hidden_widths must be a non-empty array");
      }
      for (const auto& w : d["hidden_widths"]) {
        cfg.dnn.hidden_widths.push_back(w.get<int>());
      }
    } else {
      const int layers = static_cast<int>(require_number(d, "hidden_layers"));
      const int width = static_cast<int>(require_number(d, "hidden_width"));
      if (layers < 1) throw ConfigError("hidden_layers must be >= 1");
      cfg.dnn.hidden_widths.assign(static_cast<size_t>(layers), width);
    }
    cfg.dnn.activation = activation_from_name(
        d.contains("activation") ? d["activation"].get<std::string>()
                                 : "tanh");

    if (!doc.contains("sim")) throw ConfigError("missing key: sim");
    const json& s = doc["sim"];
    cfg.duration = require_number(s, "duration");
    cfg.step = require_number(s, "step");
    cfg.decimation =
        static_cast<int>(optional_number(s, "decimation", cfg.decimation));
    cfg.seed = static_cast<std::uint64_t>(
        optional_number(s, "seed", static_cast<double>(cfg.seed)));
    if (s.contains("window")) {
      const json& w = s["window"];
      if (!w.is_array() || w.size() != 2) {
        throw ConfigError("sim.window must be a 2-element array");
      }
      cfg.window_start = w[0].get<double>();
      cfg.window_end = w[1].get<double>();
    } else {
      cfg.window_start = 0.5 * cfg.duration;
      cfg.window_end = cfg.duration;
    }
    cfg.blow_up = optional_number(s, "blow_up", cfg.blow_up);
    cfg.test_points = static_cast<int>(
        optional_number(s, "test_points", cfg.test_points));
    cfg.test_seed = static_cast<std::uint64_t>(optional_number(
        s, "test_seed", static_cast<double>(cfg.test_seed)));
    cfg.theta_checkpoint_stride = static_cast<int>(
        optional_number(s, "theta_checkpoint_stride",
                        cfg.theta_checkpoint_stride));

    if (doc.contains("init")) {
      const json& init = doc["init"];
      if (init.contains("x0")) cfg.x0 = vector2(init["x0"], "init.x0");
      if (init.contains("xdot0")) {
        cfg.xdot0 = vector2(init["xdot0"], "init.xdot0");
      }
      if (init.contains("observer")) {
        const json& obs = init["observer"];
        if (obs.contains("f_hat0")) {
          cfg.f_hat0 = vector2(obs["f_hat0"], "init.observer.f_hat0");
        }
        if (obs.contains("r_hat0")) {
          cfg.r_hat0 = vector2(obs["r_hat0"], "init.observer.r_hat0");
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  try {
    validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string config_to_json(const SimConfig& cfg) {
  json doc;
  doc["plant"] = {{"p1", cfg.plant.p1},
                  {"p2", cfg.plant.p2},
                  {"p3", cfg.plant.p3},
                  {"fd1", cfg.plant.fd1},
                  {"fd2", cfg.plant.fd2}};
  doc["gains"] = {{"alpha1", cfg.gains.alpha1},
                  {"alpha2", cfg.gains.alpha2},
                  {"alpha3", cfg.gains.alpha3},
                  {"k_r", cfg.gains.k_r},
                  {"k_f", cfg.gains.k_f},
                  {"k_theta", cfg.gains.k_theta},
                  {"beta0", cfg.gains.beta0},
                  {"kappa0", cfg.gains.kappa0},
                  {"theta_bar", cfg.gains.theta_bar},
                  {"projection_band", cfg.gains.projection_band},
                  {"gamma0", cfg.gamma0_scale}};
  doc["dnn"] = {{"input_size", cfg.dnn.input_size},
                {"hidden_widths", cfg.dnn.hidden_widths},
                {"output_size", cfg.dnn.output_size},
                {"activation", activation_name(cfg.dnn.activation)}};
  doc["sim"] = {{"duration", cfg.duration},
                {"step", cfg.step},
                {"decimation", cfg.decimation},
                {"seed", cfg.seed},
                {"window", {cfg.window_start, cfg.window_end}},
                {"blow_up", cfg.blow_up},
                {"test_points", cfg.test_points},
                {"test_seed", cfg.test_seed},
                {"theta_checkpoint_stride", cfg.theta_checkpoint_stride}};
  doc["init"] = {{"x0", {cfg.x0(0), cfg.x0(1)}},
                 {"xdot0", {cfg.xdot0(0), cfg.xdot0(1)}},
                 {"observer", {{"f_hat0", {cfg.f_hat0(0), cfg.f_hat0(1)}}}}};
  if (cfg.r_hat0) {
    doc["init"]["observer"]["r_hat0"] = {(*cfg.r_hat0)(0), (*cfg.r_hat0)(1)};
  }
  doc["controller"] = controller_name(cfg.controller);
  return doc.dump(2);
}

std::uint64_t config_hash(const SimConfig& cfg) {
  return hash_string(config_to_json(cfg));
}

}  // namespace cadnn
