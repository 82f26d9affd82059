#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "exokit/actuator_model.hpp"
#include "exokit/csv.hpp"
#include "exokit/gravity_comp.hpp"
#include "exokit/log.hpp"
#include "exokit/rng.hpp"
#include "exokit/trial_log.hpp"

namespace exokit {

inline constexpr double deg2rad(double d) { return d * M_PI / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / M_PI; }

/// Benchtop torque/speed grid used for the torque-model fit (deg/s, Nm);
/// every combination of signs of each pair is exercised.
inline const std::vector<double>& default_grid_speeds_deg_s() {
  static const std::vector<double> v = {0, 1, 3, 10, 30, 100, 300};
  return v;
}
inline const std::vector<double>& default_grid_torques_nm() {
  static const std::vector<double> v = {0, 1, 3, 5, 9, 25};
  return v;
}

struct SineBackdriveSpec {
  double freq = 1.0;          // Hz
  double amplitude = 0.0;     // rad, half of peak-to-peak
  double duration = 10.0;     // s
  double sample_rate = 1000;  // Hz
  double phase = 0.0;         // rad, initial phase of the sine

  void validate() const {
    if (!(freq > 0.0)) throw ConfigError("SineBackdriveSpec: freq must be positive");
    if (!(amplitude > 0.0)) throw ConfigError("SineBackdriveSpec: amplitude must be positive");
    if (!(duration > 0.0)) throw ConfigError("SineBackdriveSpec: duration must be positive");
    if (!(sample_rate > 20.0 * freq)) {
      throw ConfigError("SineBackdriveSpec: sample_rate must exceed 20x freq");
    }
  }
};

/// Passive backdrive trial: theta = A*sin(2*pi*f*t + phase) with zero current.
/// The load cell sees the torque driving the actuator, i.e. the inertia
/// reaction plus Coulomb friction, plus the sensor bias and optional
/// Gaussian noise. Deterministic for a fixed seed.
inline TrialLog simulate_backdrive(const SineBackdriveSpec& spec, const ActuatorParams& params,
                                   double noise_sigma = 0.0, std::uint64_t seed = 0) {
  spec.validate();
  Rng rng(seed);
  const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
  const double w = 2.0 * M_PI * spec.freq;

  TrialLog log;
  log.sample_rate = spec.sample_rate;
  log.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / spec.sample_rate;
    const double ph = w * t + spec.phase;
    const double theta = spec.amplitude * std::sin(ph);
    const double omega = spec.amplitude * w * std::cos(ph);
    const double alpha = -spec.amplitude * w * w * std::sin(ph);
    double tau = backdrive_torque(params, omega, alpha) + params.bias;
    if (noise_sigma > 0.0) tau += rng.gaussian(0.0, noise_sigma);
    log.push(t, 0.0, theta, omega, tau);
  }
  return log;
}

struct GridSkip {
  double speed_deg_s = 0.0;
  double torque_nm = 0.0;
  std::string reason;
};

struct GridResult {
  TrialLog log;
  std::vector<GridSkip> skipped;
};

/// Constant torque/speed characterization: for every speed and torque
/// magnitude, all sign combinations are held for `dwell` seconds with the
/// current chosen by the inverse model. Grid points whose torque the model
/// cannot reach are skipped and recorded.
inline GridResult simulate_grid(const ActuatorParams& params,
                                const std::vector<double>& speeds_deg_s,
                                const std::vector<double>& torques_nm, double dwell = 10.0,
                                double sample_rate = 500.0, double noise_sigma = 0.0,
                                std::uint64_t seed = 0) {
  if (speeds_deg_s.empty() || torques_nm.empty()) {
    throw ConfigError("simulate_grid: speed and torque lists must be non-empty");
  }
  if (!(dwell > 0.0) || !(sample_rate > 0.0)) {
    throw ConfigError("simulate_grid: dwell and sample_rate must be positive");
  }
  Rng rng(seed);
  const std::size_t per_segment = static_cast<std::size_t>(std::llround(dwell * sample_rate));
  const double dt = 1.0 / sample_rate;

  GridResult out;
  out.log.sample_rate = sample_rate;
  double theta = 0.0;
  std::size_t k = 0;

  auto run_segment = [&](double speed_deg, double torque) {
    const double omega = deg2rad(speed_deg);
    double current = 0.0;
    try {
      // Commanded torque is the delivered (bias-free) torque; the sensor
      // reads it with the bias on top.
      current = current_for_torque(params, torque + params.bias, omega);
    } catch (const NumericError& e) {
      out.skipped.push_back({speed_deg, torque, e.what()});
      return;
    }
    for (std::size_t i = 0; i < per_segment; ++i) {
      double tau = predict_torque(params, current, omega);
      if (noise_sigma > 0.0) tau += rng.gaussian(0.0, noise_sigma);
      out.log.push(static_cast<double>(k) * dt, current, theta, omega, tau);
      theta += omega * dt;
      ++k;
    }
  };

  for (double speed : speeds_deg_s) {
    for (double torque : torques_nm) {
      run_segment(speed, torque);
      if (torque != 0.0) run_segment(speed, -torque);
      if (speed != 0.0) {
        run_segment(-speed, torque);
        if (torque != 0.0) run_segment(-speed, -torque);
      }
    }
  }
  if (out.log.size() < 2) throw NumericError("simulate_grid: every grid point was skipped");
  for (const auto& s : out.skipped) {
    log_info("simulate_grid: skipped (" + format_double(s.speed_deg_s) + " deg/s, " +
             format_double(s.torque_nm) + " Nm): " + s.reason);
  }
  return out;
}

/// Commanded-torque step at locked output (omega = 0): zero torque for the
/// first half, tau_target for the second half.
inline TrialLog simulate_step(const ActuatorParams& params, double tau_target,
                              double duration = 10.0, double sample_rate = 500.0) {
  if (!(duration > 0.0) || !(sample_rate > 0.0)) {
    throw ConfigError("simulate_step: duration and sample_rate must be positive");
  }
  const double i_zero = current_for_torque(params, params.bias, 0.0);  // zero command
  const double i_step = current_for_torque(params, tau_target + params.bias, 0.0);
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));

  TrialLog log;
  log.sample_rate = sample_rate;
  log.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double current = t < duration / 2.0 ? i_zero : i_step;
    log.push(t, current, 0.0, 0.0, predict_torque(params, current, 0.0));
  }
  return log;
}

/// Minimum-jerk interpolant s(u) on [0, 1]: rest-to-rest, C2 boundaries.
inline double min_jerk(double u) {
  const double u3 = u * u * u;
  return 10.0 * u3 - 15.0 * u3 * u + 6.0 * u3 * u * u;
}
/// ds/du for min_jerk.
inline double min_jerk_rate(double u) {
  const double u2 = u * u;
  return 30.0 * u2 - 60.0 * u2 * u + 30.0 * u2 * u2;
}

struct SquatSpec {
  double cadence = 60.0;       // beats/min; descent and ascent take one beat each
  double theta_t_max = deg2rad(80.0);
  double theta_h_max = deg2rad(100.0);
  double theta_k_max = deg2rad(100.0);
  int reps = 20;               // alternating lift / lower, starting with lift
  double payload = 12.5;       // kg
  double subject_mass = 82.0;  // kg
  double rest_beats = 2.0;     // standing rest after each rep
  double sample_rate = 300.0;  // Hz

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("SquatSpec: " + m); };
    if (!(cadence > 0.0)) fail("cadence must be positive");
    if (reps < 1) fail("reps must be >= 1");
    if (!(payload >= 0.0)) fail("payload must be non-negative");
    if (!(subject_mass > 0.0)) fail("subject_mass must be positive");
    if (!(rest_beats >= 0.0)) fail("rest_beats must be non-negative");
    if (!(sample_rate > 0.0)) fail("sample_rate must be positive");
    for (double d : {theta_t_max, theta_h_max, theta_k_max}) {
      if (!(d > 0.0 && d < deg2rad(120.0))) fail("squat depth angles must be in (0, 120) deg");
    }
  }
};

/// Quasi-static sagittal plant behind the squat simulation: a per-leg share
/// of the head-arms-trunk bundle and payload acting above the hip, plus the
/// exo-side thigh segment above the knee. Gravity only; the extension
/// demands are exact gradients of the plant potential in the chain
/// coordinates (theta_t, theta_h), so integrated joint power balances the
/// potential-energy change of the modeled masses.
struct SquatPlantModel {
  double hat_mass_fraction = 0.678;   // head-arms-trunk share of body mass
  double hat_lever = 0.30;            // m, HAT centre of mass above the hip
  double thigh_mass_fraction = 0.10;  // one thigh's share of body mass
  double thigh_com_fraction = 0.567;  // of l_t, thigh COM above the knee
  double payload_lever = 0.40;        // m, carried mass above the hip
};

struct SquatRepRow {
  int rep = 0;                       // 1-based
  std::string phase;                 // "lift" or "lower"
  double peak_tau_k_exo = 0.0;       // Nm
  double peak_tau_h_exo = 0.0;       // Nm
  double human_knee_integral = 0.0;  // Nm*s, assisted
  double human_hip_integral = 0.0;   // Nm*s, assisted
  double human_knee_integral_bare = 0.0;
  double human_hip_integral_bare = 0.0;
};

struct SquatResult {
  double sample_rate = 0.0;
  std::vector<double> t;
  std::vector<double> theta_t, theta_h, theta_k;  // rad
  std::vector<double> payload_kg;                 // carried mass per sample
  std::vector<double> tau_k_exo, tau_h_exo;       // Nm (0 where the layout has no joint)
  std::vector<double> tau_k_human, tau_h_human;   // Nm, assisted
  std::vector<double> tau_k_human_bare, tau_h_human_bare;  // Nm, plant demand
  std::vector<SquatRepRow> reps;
  SquatPlantModel plant;
};

/// Lifting-and-lowering squats: minimum-jerk descent and ascent paced by the
/// cadence, payload grasped at the bottom of lift reps, carried through the
/// rest, and released at the bottom of lower reps. Human torque is the plant
/// demand minus the exo contribution. Deterministic (no randomness).
inline SquatResult simulate_squat(const SquatSpec& spec, const ExoConfig& cfg) {
  spec.validate();
  cfg.validate();
  const SquatPlantModel plant;
  const double beat = 60.0 / spec.cadence;
  const double rep_period = (2.0 + spec.rest_beats) * beat;
  const std::size_t per_rep =
      static_cast<std::size_t>(std::llround(rep_period * spec.sample_rate));
  const std::size_t n = per_rep * static_cast<std::size_t>(spec.reps);
  if (per_rep < 4) throw ConfigError("simulate_squat: sample_rate too low for the cadence");

  const double m_hat = plant.hat_mass_fraction * spec.subject_mass;
  const double m_thigh = plant.thigh_mass_fraction * spec.subject_mass;
  const double d_thigh = plant.thigh_com_fraction * cfg.l_t;

  SquatResult out;
  out.sample_rate = spec.sample_rate;
  out.plant = plant;
  const auto reserve_all = [&](std::size_t count) {
    for (auto* v : {&out.t, &out.theta_t, &out.theta_h, &out.theta_k, &out.payload_kg,
                    &out.tau_k_exo, &out.tau_h_exo, &out.tau_k_human, &out.tau_h_human,
                    &out.tau_k_human_bare, &out.tau_h_human_bare}) {
      v->reserve(count);
    }
  };
  reserve_all(n);

  for (int rep = 0; rep < spec.reps; ++rep) {
    const bool lifting = rep % 2 == 0;
    SquatRepRow row;
    row.rep = rep + 1;
    row.phase = lifting ? "lift" : "lower";

    for (std::size_t i = 0; i < per_rep; ++i) {
      const std::size_t k = static_cast<std::size_t>(rep) * per_rep + i;
      const double t_local = static_cast<double>(i) / spec.sample_rate;
      double depth = 0.0;      // 0 standing, 1 bottom of the squat
      bool past_bottom = false;
      if (t_local < beat) {
        depth = min_jerk(t_local / beat);
      } else if (t_local < 2.0 * beat) {
        depth = 1.0 - min_jerk((t_local - beat) / beat);
        past_bottom = true;
      } else {
        depth = 0.0;
        past_bottom = true;
      }
      const bool loaded = lifting ? past_bottom : !past_bottom;
      const double m_pay = loaded ? spec.payload : 0.0;

      const double th_t = spec.theta_t_max * depth;
      const double th_h = spec.theta_h_max * depth;
      const double th_k = spec.theta_k_max * depth;
      const double psi = th_h - th_t;  // forward torso lean
      const double s_t = std::sin(th_t);
      const double s_psi = std::sin(psi);

      // Masses riding above the hip sit behind the knee in a squat; their
      // lean term unloads the knee while loading the hip.
      const double knee_demand =
          cfg.g * (0.5 * (m_hat * (cfg.l_t * s_t - plant.hat_lever * s_psi) +
                          m_pay * (cfg.l_t * s_t - plant.payload_lever * s_psi)) +
                   m_thigh * d_thigh * s_t);
      const double hip_demand =
          cfg.g * 0.5 * (m_hat * plant.hat_lever + m_pay * plant.payload_lever) * s_psi;

      const JointTorques assist = assist_torques(cfg, th_t, th_h);
      const double exo_k = assist.tau_k.value_or(0.0);
      const double exo_h = assist.tau_h.value_or(0.0);

      out.t.push_back(static_cast<double>(k) / spec.sample_rate);
      out.theta_t.push_back(th_t);
      out.theta_h.push_back(th_h);
      out.theta_k.push_back(th_k);
      out.payload_kg.push_back(m_pay);
      out.tau_k_exo.push_back(exo_k);
      out.tau_h_exo.push_back(exo_h);
      out.tau_k_human.push_back(knee_demand - exo_k);
      out.tau_h_human.push_back(hip_demand - exo_h);
      out.tau_k_human_bare.push_back(knee_demand);
      out.tau_h_human_bare.push_back(hip_demand);
    }

    // Per-rep summary over the closed sample span of this rep.
    const std::size_t s0 = static_cast<std::size_t>(rep) * per_rep;
    const std::size_t s1 = std::min(s0 + per_rep, n - 1);
    const double dt = 1.0 / spec.sample_rate;
    auto trapz = [&](const std::vector<double>& v) {
      double acc = 0.0;
      for (std::size_t i = s0; i < s1 && i + 1 < out.t.size(); ++i) {
        acc += 0.5 * (v[i] + v[i + 1]) * dt;
      }
      return acc;
    };
    for (std::size_t i = s0; i < s0 + per_rep; ++i) {
      row.peak_tau_k_exo = std::max(row.peak_tau_k_exo, out.tau_k_exo[i]);
      row.peak_tau_h_exo = std::max(row.peak_tau_h_exo, out.tau_h_exo[i]);
    }
    row.human_knee_integral = trapz(out.tau_k_human);
    row.human_hip_integral = trapz(out.tau_h_human);
    row.human_knee_integral_bare = trapz(out.tau_k_human_bare);
    row.human_hip_integral_bare = trapz(out.tau_h_human_bare);
    out.reps.push_back(std::move(row));
  }
  return out;
}

/// Per-rep results CSV: `rep,phase,peak_tau_k_exo,peak_tau_h_exo,
/// human_knee_integral,human_hip_integral` (SI units).
inline void write_squat_results_csv(const SquatResult& result, const std::filesystem::path& path) {
  std::string buf = "rep,phase,peak_tau_k_exo,peak_tau_h_exo,human_knee_integral,human_hip_integral\n";
  for (const auto& r : result.reps) {
    buf += std::to_string(r.rep);
    buf += ',';
    buf += r.phase;
    buf += ',';
    buf += format_double(r.peak_tau_k_exo);
    buf += ',';
    buf += format_double(r.peak_tau_h_exo);
    buf += ',';
    buf += format_double(r.human_knee_integral);
    buf += ',';
    buf += format_double(r.human_hip_integral);
    buf += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_squat_timeseries_csv(const SquatResult& r, const std::filesystem::path& path) {
  const std::vector<std::string> names = {
      "t",         "theta_t",        "theta_h",        "theta_k",
      "payload_kg", "tau_k_exo",     "tau_h_exo",      "tau_k_human",
      "tau_h_human", "tau_k_human_bare", "tau_h_human_bare"};
  const std::vector<std::vector<double>> cols = {
      r.t,         r.theta_t,        r.theta_h,        r.theta_k,
      r.payload_kg, r.tau_k_exo,     r.tau_h_exo,      r.tau_k_human,
      r.tau_h_human, r.tau_k_human_bare, r.tau_h_human_bare};
  write_numeric_csv(path, names, cols);
}

}  // namespace exokit
