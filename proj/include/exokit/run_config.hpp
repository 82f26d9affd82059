#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "exokit/actuator_model.hpp"
#include "exokit/bench_sim.hpp"
#include "exokit/errors.hpp"
#include "exokit/gravity_comp.hpp"

namespace exokit {

/// Structured run configuration (JSON). Every section is optional and
/// defaults match the identified hardware; unknown keys are rejected so a
/// typo cannot silently fall back to a default.
struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<std::string> out_dir;
  ActuatorParams actuator = ActuatorParams::identified();
  ExoConfig exo;
  SineBackdriveSpec backdrive{1.0, deg2rad(35.0), 10.0, 1000.0, 0.0};
  std::vector<double> grid_speeds_deg_s = default_grid_speeds_deg_s();
  std::vector<double> grid_torques_nm = default_grid_torques_nm();
  double grid_dwell = 10.0;
  double grid_sample_rate = 500.0;
  double noise_sigma = 0.0;  // Nm, shared by backdrive/grid simulation
  double step_tau_target = 30.0;
  double step_duration = 10.0;
  double step_sample_rate = 500.0;
  SquatSpec squat;

  RunConfig() {
    exo.layout = Layout::kHipKnee;
    exo.mass = 82.0;
    exo.alpha = 0.2;
  }
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("config: unknown key '" + where + it.key() + "'");
  }
}

template <typename T>
inline void read_field(const nlohmann::json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

inline Layout parse_layout(const std::string& name) {
  if (name == "hip-only" || name == "hip") return Layout::kHipOnly;
  if (name == "knee-only" || name == "knee") return Layout::kKneeOnly;
  if (name == "hip-knee") return Layout::kHipKnee;
  throw ConfigError("config: unknown layout '" + name + "' (hip-only|knee-only|hip-knee)");
}

}  // namespace detail

/// Parses and validates a RunConfig file. Referenced paths must resolve.
inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown_keys(
      j, "", {"seed", "out", "actuator", "exo", "backdrive", "grid", "step", "squat"});

  RunConfig cfg;
  detail::read_field(j, "seed", cfg.seed);
  if (j.contains("out")) {
    cfg.out_dir = j.at("out").get<std::string>();
    const std::filesystem::path parent =
        std::filesystem::path(*cfg.out_dir).parent_path();
    if (!parent.empty() && !std::filesystem::exists(parent)) {
      throw ConfigError("config: out directory parent '" + parent.string() + "' does not exist");
    }
  }

  if (j.contains("actuator")) {
    const auto& a = j.at("actuator");
    detail::reject_unknown_keys(a, "actuator.",
                                {"gear_ratio", "k_tau", "k_n", "f_coulomb", "f_gear", "bias",
                                 "reflected_inertia", "k_t_nominal"});
    detail::read_field(a, "gear_ratio", cfg.actuator.gear_ratio);
    detail::read_field(a, "k_tau", cfg.actuator.k_tau);
    detail::read_field(a, "k_n", cfg.actuator.k_n);
    detail::read_field(a, "f_coulomb", cfg.actuator.f_coulomb);
    detail::read_field(a, "f_gear", cfg.actuator.f_gear);
    detail::read_field(a, "bias", cfg.actuator.bias);
    detail::read_field(a, "reflected_inertia", cfg.actuator.reflected_inertia);
    detail::read_field(a, "k_t_nominal", cfg.actuator.k_t_nominal);
    cfg.actuator.validate();
  }

  if (j.contains("exo")) {
    const auto& e = j.at("exo");
    detail::reject_unknown_keys(e, "exo.",
                                {"layout", "mass", "alpha", "l_t", "l_h", "g", "tau_ext_max",
                                 "tau_flex_max"});
    if (e.contains("layout")) cfg.exo.layout = detail::parse_layout(e.at("layout").get<std::string>());
    detail::read_field(e, "mass", cfg.exo.mass);
    detail::read_field(e, "alpha", cfg.exo.alpha);
    detail::read_field(e, "l_t", cfg.exo.l_t);
    detail::read_field(e, "l_h", cfg.exo.l_h);
    detail::read_field(e, "g", cfg.exo.g);
    detail::read_field(e, "tau_ext_max", cfg.exo.tau_ext_max);
    detail::read_field(e, "tau_flex_max", cfg.exo.tau_flex_max);
    if (cfg.exo.layout == Layout::kKneeOnly) cfg.exo.l_h = 0.0;
    cfg.exo.validate();
  }

  if (j.contains("backdrive")) {
    const auto& b = j.at("backdrive");
    detail::reject_unknown_keys(
        b, "backdrive.",
        {"freq", "amplitude_p2p_deg", "duration", "sample_rate", "phase_deg", "noise_sigma"});
    detail::read_field(b, "freq", cfg.backdrive.freq);
    if (b.contains("amplitude_p2p_deg")) {
      cfg.backdrive.amplitude = deg2rad(b.at("amplitude_p2p_deg").get<double>() / 2.0);
    }
    detail::read_field(b, "duration", cfg.backdrive.duration);
    detail::read_field(b, "sample_rate", cfg.backdrive.sample_rate);
    if (b.contains("phase_deg")) cfg.backdrive.phase = deg2rad(b.at("phase_deg").get<double>());
    detail::read_field(b, "noise_sigma", cfg.noise_sigma);
    cfg.backdrive.validate();
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    detail::reject_unknown_keys(
        g, "grid.", {"speeds_deg_s", "torques_nm", "dwell", "sample_rate", "noise_sigma"});
    detail::read_field(g, "speeds_deg_s", cfg.grid_speeds_deg_s);
    detail::read_field(g, "torques_nm", cfg.grid_torques_nm);
    detail::read_field(g, "dwell", cfg.grid_dwell);
    detail::read_field(g, "sample_rate", cfg.grid_sample_rate);
    detail::read_field(g, "noise_sigma", cfg.noise_sigma);
  }

  if (j.contains("step")) {
    const auto& s = j.at("step");
    detail::reject_unknown_keys(s, "step.", {"tau_target", "duration", "sample_rate"});
    detail::read_field(s, "tau_target", cfg.step_tau_target);
    detail::read_field(s, "duration", cfg.step_duration);
    detail::read_field(s, "sample_rate", cfg.step_sample_rate);
  }

  if (j.contains("squat")) {
    const auto& s = j.at("squat");
    detail::reject_unknown_keys(s, "squat.",
                                {"cadence", "depth_deg", "reps", "payload", "subject_mass",
                                 "rest_beats", "sample_rate"});
    detail::read_field(s, "cadence", cfg.squat.cadence);
    if (s.contains("depth_deg")) {
      const auto depth = s.at("depth_deg").get<std::vector<double>>();
      if (depth.size() != 3) {
        throw ConfigError("config: squat.depth_deg must be [theta_t, theta_h, theta_k] degrees");
      }
      cfg.squat.theta_t_max = deg2rad(depth[0]);
      cfg.squat.theta_h_max = deg2rad(depth[1]);
      cfg.squat.theta_k_max = deg2rad(depth[2]);
    }
    detail::read_field(s, "reps", cfg.squat.reps);
    detail::read_field(s, "payload", cfg.squat.payload);
    detail::read_field(s, "subject_mass", cfg.squat.subject_mass);
    detail::read_field(s, "rest_beats", cfg.squat.rest_beats);
    detail::read_field(s, "sample_rate", cfg.squat.sample_rate);
    cfg.squat.validate();
  }

  return cfg;
}

}  // namespace exokit
