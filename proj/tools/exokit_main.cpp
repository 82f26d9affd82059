// exokit command-line front end: deterministic simulation of the benchtop
// trials and the squat task, the two-stage least-squares fit, controller
// evaluation sweeps, and the EMG effort pipeline. All outputs are plain CSV
// or key-value text and reproduce byte-for-byte under a fixed seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "exokit/exokit.hpp"

namespace fs = std::filesystem;
using namespace exokit;

namespace {

std::vector<double> split_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t at = 0;
  while (at <= text.size()) {
    const std::size_t comma = text.find(',', at);
    const std::string cell =
        text.substr(at, comma == std::string::npos ? std::string::npos : comma - at);
    if (!cell.empty()) out.push_back(parse_double(cell, what));
    if (comma == std::string::npos) break;
    at = comma + 1;
  }
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

struct Range {
  double min, max, step;
};

Range parse_range(const std::string& text, const char* what) {
  const std::size_t c1 = text.find(':');
  const std::size_t c2 = text.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ConfigError(std::string(what) + ": expected min:max:step");
  }
  Range r{parse_double(text.substr(0, c1), what),
          parse_double(text.substr(c1 + 1, c2 - c1 - 1), what),
          parse_double(text.substr(c2 + 1), what)};
  if (!(r.step > 0.0) || r.max < r.min) {
    throw ConfigError(std::string(what) + ": need min <= max and step > 0");
  }
  return r;
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

using KvList = std::vector<std::pair<std::string, std::string>>;

void write_kv_file(const fs::path& path, const KvList& entries) {
  std::string s;
  for (const auto& [k, v] : entries) {
    s += k;
    s += " = ";
    s += v;
    s += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void echo_actuator(KvList& kv, const ActuatorParams& p) {
  kv.emplace_back("actuator.gear_ratio", format_double(p.gear_ratio));
  kv.emplace_back("actuator.k_tau", format_double(p.k_tau));
  kv.emplace_back("actuator.k_n", format_double(p.k_n));
  kv.emplace_back("actuator.f_coulomb", format_double(p.f_coulomb));
  kv.emplace_back("actuator.f_gear", format_double(p.f_gear));
  kv.emplace_back("actuator.bias", format_double(p.bias));
  kv.emplace_back("actuator.reflected_inertia", format_double(p.reflected_inertia));
  kv.emplace_back("actuator.k_t_nominal", format_double(p.k_t_nominal));
}

// ---------------------------------------------------------------------------
// sysid

int cmd_sysid(const RunConfig& cfg, const std::string& grid_csv, const std::string& inertia_csv,
              double gear_ratio, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  const TrialLog log = read_trial_csv(grid_csv);
  FitReport report = fit_torque_model(log, gear_ratio);

  std::optional<InertiaFit> inertia;
  if (!inertia_csv.empty()) {
    const TrialLog bd = read_trial_csv(inertia_csv);
    inertia = fit_inertia(bd, report.params);
    report.params.reflected_inertia = inertia->reflected_inertia;
  }
  (void)cfg;

  write_fit_report_txt(report, inertia, dir / "fit_report.txt");
  write_fit_report_json(report, inertia, dir / "fit_report.json");

  std::printf("fit: k_tau=%s k_n=%s f_coulomb=%s f_gear=%s bias=%s\n",
              format_double(report.params.k_tau).c_str(), format_double(report.params.k_n).c_str(),
              format_double(report.params.f_coulomb).c_str(),
              format_double(report.params.f_gear).c_str(),
              format_double(report.params.bias).c_str());
  std::printf("residual: rmse=%s Nm p95=%s Nm over %zu samples\n",
              format_double(report.residual_rmse).c_str(),
              format_double(report.residual_p95).c_str(), report.n_samples);
  if (inertia) {
    std::printf("inertia: %s kg*m^2 (rmse %s -> %s Nm)\n",
                format_double(inertia->reflected_inertia).c_str(),
                format_double(inertia->rmse_before).c_str(),
                format_double(inertia->rmse_after).c_str());
  }
  std::printf("wrote %s and %s\n", (dir / "fit_report.txt").string().c_str(),
              (dir / "fit_report.json").string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate_backdrive(const RunConfig& cfg, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  const TrialLog log = simulate_backdrive(cfg.backdrive, cfg.actuator, cfg.noise_sigma, cfg.seed);
  write_trial_csv(log, dir / "backdrive.csv");

  KvList kv;
  kv.emplace_back("command", "simulate backdrive");
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("freq_hz", format_double(cfg.backdrive.freq));
  kv.emplace_back("amplitude_p2p_deg", format_double(2.0 * rad2deg(cfg.backdrive.amplitude)));
  kv.emplace_back("phase_deg", format_double(rad2deg(cfg.backdrive.phase)));
  kv.emplace_back("duration_s", format_double(cfg.backdrive.duration));
  kv.emplace_back("sample_rate_hz", format_double(cfg.backdrive.sample_rate));
  kv.emplace_back("noise_sigma_nm", format_double(cfg.noise_sigma));
  echo_actuator(kv, cfg.actuator);
  write_kv_file(dir / "backdrive_meta.txt", kv);

  double peak = 0.0;
  for (double v : log.tau_meas) peak = std::max(peak, std::abs(v));
  std::printf("backdrive: %zu samples, peak |tau| %s Nm -> %s\n", log.size(),
              format_double(peak).c_str(), (dir / "backdrive.csv").string().c_str());
  return 0;
}

int cmd_simulate_grid(const RunConfig& cfg, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  const GridResult result = simulate_grid(cfg.actuator, cfg.grid_speeds_deg_s,
                                          cfg.grid_torques_nm, cfg.grid_dwell,
                                          cfg.grid_sample_rate, cfg.noise_sigma, cfg.seed);
  write_trial_csv(result.log, dir / "grid.csv");

  KvList kv;
  kv.emplace_back("command", "simulate grid");
  kv.emplace_back("seed", std::to_string(cfg.seed));
  {
    std::string speeds, torques;
    for (std::size_t i = 0; i < cfg.grid_speeds_deg_s.size(); ++i) {
      if (i) speeds += ',';
      speeds += format_double(cfg.grid_speeds_deg_s[i]);
    }
    for (std::size_t i = 0; i < cfg.grid_torques_nm.size(); ++i) {
      if (i) torques += ',';
      torques += format_double(cfg.grid_torques_nm[i]);
    }
    kv.emplace_back("speeds_deg_s", speeds);
    kv.emplace_back("torques_nm", torques);
  }
  kv.emplace_back("dwell_s", format_double(cfg.grid_dwell));
  kv.emplace_back("sample_rate_hz", format_double(cfg.grid_sample_rate));
  kv.emplace_back("noise_sigma_nm", format_double(cfg.noise_sigma));
  kv.emplace_back("skipped_points", std::to_string(result.skipped.size()));
  for (const auto& s : result.skipped) {
    kv.emplace_back("skipped", format_double(s.speed_deg_s) + " deg/s, " +
                                   format_double(s.torque_nm) + " Nm: " + s.reason);
  }
  echo_actuator(kv, cfg.actuator);
  write_kv_file(dir / "grid_meta.txt", kv);

  std::printf("grid: %zu samples, %zu skipped points -> %s\n", result.log.size(),
              result.skipped.size(), (dir / "grid.csv").string().c_str());
  return 0;
}

int cmd_simulate_step(const RunConfig& cfg, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  const TrialLog log =
      simulate_step(cfg.actuator, cfg.step_tau_target, cfg.step_duration, cfg.step_sample_rate);
  write_trial_csv(log, dir / "step.csv");

  KvList kv;
  kv.emplace_back("command", "simulate step");
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("tau_target_nm", format_double(cfg.step_tau_target));
  kv.emplace_back("duration_s", format_double(cfg.step_duration));
  kv.emplace_back("sample_rate_hz", format_double(cfg.step_sample_rate));
  kv.emplace_back("commanded_current_a", format_double(log.i_q.back()));
  echo_actuator(kv, cfg.actuator);
  write_kv_file(dir / "step_meta.txt", kv);

  std::printf("step: settles at %s Nm with %s A -> %s\n", format_double(log.tau_meas.back()).c_str(),
              format_double(log.i_q.back()).c_str(), (dir / "step.csv").string().c_str());
  return 0;
}

int cmd_simulate_squat(const RunConfig& cfg, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  const SquatResult result = simulate_squat(cfg.squat, cfg.exo);
  write_squat_results_csv(result, dir / "squat_results.csv");
  write_squat_timeseries_csv(result, dir / "squat_timeseries.csv");

  double peak_k = 0.0, peak_h = 0.0;
  double red_knee = 0.0, red_hip = 0.0;
  for (const auto& r : result.reps) {
    peak_k = std::max(peak_k, r.peak_tau_k_exo);
    peak_h = std::max(peak_h, r.peak_tau_h_exo);
    red_knee += r.human_knee_integral_bare - r.human_knee_integral;
    red_hip += r.human_hip_integral_bare - r.human_hip_integral;
  }
  const double nreps = static_cast<double>(result.reps.size());

  KvList kv;
  kv.emplace_back("command", "simulate squat");
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("layout", layout_name(cfg.exo.layout));
  kv.emplace_back("subject_mass_kg", format_double(cfg.squat.subject_mass));
  kv.emplace_back("controller_mass_kg", format_double(cfg.exo.mass));
  kv.emplace_back("alpha", format_double(cfg.exo.alpha));
  kv.emplace_back("payload_kg", format_double(cfg.squat.payload));
  kv.emplace_back("cadence_bpm", format_double(cfg.squat.cadence));
  kv.emplace_back("reps", std::to_string(cfg.squat.reps));
  kv.emplace_back("rest_beats", format_double(cfg.squat.rest_beats));
  kv.emplace_back("depth_deg",
                  format_double(rad2deg(cfg.squat.theta_t_max)) + "," +
                      format_double(rad2deg(cfg.squat.theta_h_max)) + "," +
                      format_double(rad2deg(cfg.squat.theta_k_max)));
  kv.emplace_back("sample_rate_hz", format_double(cfg.squat.sample_rate));
  kv.emplace_back("plant.hat_mass_fraction", format_double(result.plant.hat_mass_fraction));
  kv.emplace_back("plant.hat_lever_m", format_double(result.plant.hat_lever));
  kv.emplace_back("plant.thigh_mass_fraction", format_double(result.plant.thigh_mass_fraction));
  kv.emplace_back("plant.thigh_com_fraction", format_double(result.plant.thigh_com_fraction));
  kv.emplace_back("plant.payload_lever_m", format_double(result.plant.payload_lever));
  kv.emplace_back("peak_tau_k_exo_nm", format_double(peak_k));
  kv.emplace_back("peak_tau_h_exo_nm", format_double(peak_h));
  kv.emplace_back("mean_knee_integral_reduction_nms", format_double(red_knee / nreps));
  kv.emplace_back("mean_hip_integral_reduction_nms", format_double(red_hip / nreps));
  write_kv_file(dir / "squat_meta.txt", kv);

  std::printf("squat: %d reps, exo peaks knee %s Nm / hip %s Nm -> %s\n", cfg.squat.reps,
              format_double(peak_k).c_str(), format_double(peak_h).c_str(),
              (dir / "squat_results.csv").string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// control-eval

int cmd_control_eval(const ExoConfig& exo, const Range& range_t, const Range& range_h,
                     const std::string& out) {
  exo.validate();
  std::vector<double> col_t, col_h, col_tau_k, col_tau_h;
  const bool has_knee = exo.layout != Layout::kHipOnly;
  const bool has_hip = exo.layout != Layout::kKneeOnly;

  std::printf("layout: %s, mass %s kg, alpha %s\n", layout_name(exo.layout),
              format_double(exo.mass).c_str(), format_double(exo.alpha).c_str());
  std::printf("%12s %12s %12s %12s\n", "theta_t_deg", "theta_h_deg", "tau_k", "tau_h");
  for (double td = range_t.min; td <= range_t.max + 1e-9; td += range_t.step) {
    for (double hd = range_h.min; hd <= range_h.max + 1e-9; hd += range_h.step) {
      const JointTorques tq = assist_torques(exo, deg2rad(td), deg2rad(hd));
      col_t.push_back(td);
      col_h.push_back(hd);
      if (has_knee) col_tau_k.push_back(*tq.tau_k);
      if (has_hip) col_tau_h.push_back(*tq.tau_h);
      std::printf("%12s %12s %12s %12s\n", format_double(td).c_str(), format_double(hd).c_str(),
                  tq.tau_k ? format_double(*tq.tau_k).c_str() : "-",
                  tq.tau_h ? format_double(*tq.tau_h).c_str() : "-");
    }
  }

  if (!out.empty()) {
    const fs::path dir = ensure_out_dir(out);
    std::vector<std::string> names = {"theta_t_deg", "theta_h_deg"};
    std::vector<std::vector<double>> cols = {col_t, col_h};
    if (has_knee) {
      names.push_back("tau_k");
      cols.push_back(col_tau_k);
    }
    if (has_hip) {
      names.push_back("tau_h");
      cols.push_back(col_tau_h);
    }
    write_numeric_csv(dir / "control_eval.csv", names, cols);
    std::printf("wrote %s\n", (dir / "control_eval.csv").string().c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// emg

struct EmgOptions {
  std::string recording;
  std::string thigh;
  std::string mvc;
  std::string units = "volts";
  double mvc_percentile = 100.0;  // 100 = plain maximum
  std::size_t expected_reps = 0;
  std::string label = "recording";
  std::string out;
};

int cmd_emg(const EmgOptions& opt) {
  const fs::path dir = ensure_out_dir(opt.out);

  const EmgRecording rec = read_emg_recording_csv(opt.recording, opt.thigh);
  const double emg_rate = rec.sample_rate;
  const std::size_t n_ch = rec.channels.size();
  const std::size_t n_samples = rec.channels.empty() ? 0 : rec.channels.front().size();

  std::vector<std::vector<double>> pct(n_ch);
  if (opt.units == "volts") {
    rec.validate();  // raw EMG must clear twice the band edge
    if (opt.mvc.empty()) {
      throw ConfigError("emg: --mvc recording is required when --units volts");
    }
    NumericTable mvc = read_numeric_csv(opt.mvc);
    if (mvc.names.size() < 2 || mvc.names.front() != "t") {
      throw InputError("mvc: expected header 't,<channel>,...'");
    }
    if (mvc.rows() < 3) throw InputError("mvc: too few samples");
    const double mvc_rate = 1.0 / (mvc.columns[0][1] - mvc.columns[0][0]);
    for (std::size_t c = 0; c < n_ch; ++c) {
      const std::string& name = rec.channel_names[c];
      std::size_t m = 0;
      for (; m < mvc.names.size(); ++m) {
        if (mvc.names[m] == name) break;
      }
      if (m == mvc.names.size()) {
        throw InputError("mvc: channel '" + name + "' missing from the MVC recording");
      }
      const std::vector<double> env = envelope(rec.channels[c], emg_rate);
      const std::vector<double> mvc_env = envelope(mvc.columns[m], mvc_rate);
      pct[c] = normalize_mvc(env, mvc_env, opt.mvc_percentile);
    }
  } else if (opt.units == "pct") {
    // Channels already hold processed %MVC envelopes; the raw-EMG rate floor
    // does not apply.
    pct = rec.channels;
  } else {
    throw ConfigError("emg: --units must be volts or pct");
  }

  const std::vector<RepBounds> angle_reps = crop_reps(rec.thigh_angle, opt.expected_reps);
  std::vector<RepBounds> reps;
  reps.reserve(angle_reps.size());
  for (const RepBounds& r : angle_reps) {
    auto to_idx = [&](std::size_t k) {
      const double tt = rec.thigh_t[k];
      const long long i = std::llround(tt * emg_rate);
      return static_cast<std::size_t>(std::clamp<long long>(
          i, 0, static_cast<long long>(n_samples) - 1));
    };
    reps.push_back({to_idx(r.start), to_idx(r.end)});
  }

  std::vector<ChannelSummary> summaries(n_ch);
  for (std::size_t c = 0; c < n_ch; ++c) summaries[c] = summarize(pct[c], reps, emg_rate);

  // Per-rep metrics CSV.
  {
    std::string buf = "channel,rep,start_sample,end_sample,effort_pct_mvc_s,peak_pct_mvc\n";
    for (std::size_t c = 0; c < n_ch; ++c) {
      for (std::size_t r = 0; r < summaries[c].effort.size(); ++r) {
        buf += rec.channel_names[c];
        buf += ',';
        buf += std::to_string(r + 1);
        buf += ',';
        buf += std::to_string(reps[r].start);
        buf += ',';
        buf += std::to_string(reps[r].end);
        buf += ',';
        buf += format_double(summaries[c].effort[r]);
        buf += ',';
        buf += format_double(summaries[c].peak[r]);
        buf += '\n';
      }
    }
    std::ofstream f(dir / "rep_metrics.csv", std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write rep_metrics.csv");
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }

  // Summary table, one row per muscle, mean (SD) to one decimal.
  std::string report;
  {
    std::size_t width = 0;
    for (std::size_t c = 0; c < n_ch; ++c) width = std::max(width, rec.channel_names[c].size());
    auto pad = [&](const std::string& s) {
      std::string p = s;
      p.resize(width, ' ');
      return p;
    };
    report += "condition: " + opt.label + "\n";
    report += "reps: " + std::to_string(reps.size()) + "\n\n";
    report += "Muscle effort (%MVC*s), mean (SD)\n";
    for (std::size_t c = 0; c < n_ch; ++c) {
      report += pad(rec.channel_names[c]) + " " +
                format_mean_sd(summaries[c].effort_mean, summaries[c].effort_sd) + "\n";
    }
    report += "\nPeak muscle activation (%MVC), mean (SD)\n";
    for (std::size_t c = 0; c < n_ch; ++c) {
      report += pad(rec.channel_names[c]) + " " +
                format_mean_sd(summaries[c].peak_mean, summaries[c].peak_sd) + "\n";
    }
    std::ofstream f(dir / "emg_report.txt", std::ios::binary | std::ios::trunc);
    if (!f) throw InputError("cannot write emg_report.txt");
    f.write(report.data(), static_cast<std::streamsize>(report.size()));
  }

  // Ensemble curves: 101-point mean cycle per channel.
  {
    std::vector<std::string> names = {"pct_cycle"};
    std::vector<std::vector<double>> cols;
    std::vector<double> cycle(101);
    for (int k = 0; k <= 100; ++k) cycle[static_cast<std::size_t>(k)] = k;
    cols.push_back(cycle);
    for (std::size_t c = 0; c < n_ch; ++c) {
      names.push_back(rec.channel_names[c]);
      cols.push_back(ensemble_mean_curve(pct[c], reps));
    }
    write_numeric_csv(dir / "ensemble.csv", names, cols);
  }

  std::fputs(report.c_str(), stdout);
  std::printf("wrote %s, %s, %s\n", (dir / "rep_metrics.csv").string().c_str(),
              (dir / "emg_report.txt").string().c_str(), (dir / "ensemble.csv").string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  const fs::path dir = ensure_out_dir(out);
  KvList kv;
  kv.emplace_back("command", "report");
  kv.emplace_back("files", std::to_string(inputs.size()));
  for (const auto& in : inputs) {
    const fs::path src(in);
    if (!fs::exists(src)) throw InputError("report: input '" + in + "' does not exist");
    const fs::path dst = dir / src.filename();
    fs::copy_file(src, dst, fs::copy_options::overwrite_existing);
    kv.emplace_back("file", src.filename().string() + " (" +
                                std::to_string(fs::file_size(dst)) + " bytes)");
  }
  write_kv_file(dir / "manifest.txt", kv);
  std::printf("report: bundled %zu file(s) into %s\n", inputs.size(), dir.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exokit: actuator identification, gravity-compensation control and EMG analysis toolkit"};
  app.fallthrough(true);
  app.set_version_flag("--version", std::string("exokit ") + kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (u64)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");

  auto make_config = [&]() {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (out_opt->count() > 0) cfg.out_dir = out_dir;
    return cfg;
  };
  auto resolved_out = [&](const RunConfig& cfg) {
    return cfg.out_dir.value_or(out_dir.empty() ? std::string(".") : out_dir);
  };

  int rc = 0;

  // sysid ------------------------------------------------------------------
  auto* sysid = app.add_subcommand("sysid", "fit the torque model from a grid trial CSV");
  std::string sysid_input, sysid_inertia;
  double sysid_gear = 9.0;
  sysid->add_option("input", sysid_input, "TrialLog CSV (t,i_q,theta,omega,tau_meas)")->required();
  sysid->add_option("--inertia", sysid_inertia, "backdrive TrialLog CSV for the inertia fit");
  sysid->add_option("--gear-ratio", sysid_gear, "known gear ratio");
  sysid->callback([&] {
    const RunConfig cfg = make_config();
    rc = cmd_sysid(cfg, sysid_input, sysid_inertia, sysid_gear, resolved_out(cfg));
  });

  // simulate ----------------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "regenerate benchtop trials and the squat task");
  sim->fallthrough(true);
  sim->require_subcommand(1);

  auto* bd = sim->add_subcommand("backdrive", "sinusoidal zero-current backdrive trial");
  double bd_freq = 1.0, bd_p2p = 70.0, bd_phase = 0.0, bd_dur = 10.0, bd_rate = 1000.0,
         bd_noise = 0.0;
  auto* bd_freq_o = bd->add_option("--freq", bd_freq, "sine frequency, Hz");
  auto* bd_p2p_o = bd->add_option("--amp-p2p-deg", bd_p2p, "peak-to-peak amplitude, deg");
  auto* bd_phase_o = bd->add_option("--phase-deg", bd_phase, "initial phase, deg");
  auto* bd_dur_o = bd->add_option("--duration", bd_dur, "trial length, s");
  auto* bd_rate_o = bd->add_option("--rate", bd_rate, "sample rate, Hz");
  auto* bd_noise_o = bd->add_option("--noise-sigma", bd_noise, "torque noise sigma, Nm");
  bd->callback([&] {
    RunConfig cfg = make_config();
    if (bd_freq_o->count()) cfg.backdrive.freq = bd_freq;
    if (bd_p2p_o->count()) cfg.backdrive.amplitude = deg2rad(bd_p2p / 2.0);
    if (bd_phase_o->count()) cfg.backdrive.phase = deg2rad(bd_phase);
    if (bd_dur_o->count()) cfg.backdrive.duration = bd_dur;
    if (bd_rate_o->count()) cfg.backdrive.sample_rate = bd_rate;
    if (bd_noise_o->count()) cfg.noise_sigma = bd_noise;
    rc = cmd_simulate_backdrive(cfg, resolved_out(cfg));
  });

  auto* grid = sim->add_subcommand("grid", "constant torque/speed characterization grid");
  std::string grid_speeds, grid_torques;
  double grid_dwell = 10.0, grid_rate = 500.0, grid_noise = 0.0;
  auto* grid_speeds_o = grid->add_option("--speeds", grid_speeds, "speed magnitudes, deg/s (comma list)");
  auto* grid_torques_o = grid->add_option("--torques", grid_torques, "torque magnitudes, Nm (comma list)");
  auto* grid_dwell_o = grid->add_option("--dwell", grid_dwell, "dwell per grid point, s");
  auto* grid_rate_o = grid->add_option("--rate", grid_rate, "sample rate, Hz");
  auto* grid_noise_o = grid->add_option("--noise-sigma", grid_noise, "torque noise sigma, Nm");
  grid->callback([&] {
    RunConfig cfg = make_config();
    if (grid_speeds_o->count()) cfg.grid_speeds_deg_s = split_doubles(grid_speeds, "--speeds");
    if (grid_torques_o->count()) cfg.grid_torques_nm = split_doubles(grid_torques, "--torques");
    if (grid_dwell_o->count()) cfg.grid_dwell = grid_dwell;
    if (grid_rate_o->count()) cfg.grid_sample_rate = grid_rate;
    if (grid_noise_o->count()) cfg.noise_sigma = grid_noise;
    rc = cmd_simulate_grid(cfg, resolved_out(cfg));
  });

  auto* step = sim->add_subcommand("step", "commanded torque step at locked output");
  double step_tau = 30.0, step_dur = 10.0, step_rate = 500.0;
  auto* step_tau_o = step->add_option("--tau", step_tau, "target torque, Nm");
  auto* step_dur_o = step->add_option("--duration", step_dur, "trial length, s");
  auto* step_rate_o = step->add_option("--rate", step_rate, "sample rate, Hz");
  step->callback([&] {
    RunConfig cfg = make_config();
    if (step_tau_o->count()) cfg.step_tau_target = step_tau;
    if (step_dur_o->count()) cfg.step_duration = step_dur;
    if (step_rate_o->count()) cfg.step_sample_rate = step_rate;
    rc = cmd_simulate_step(cfg, resolved_out(cfg));
  });

  auto* squat = sim->add_subcommand("squat", "lifting-and-lowering squat assistance simulation");
  double sq_mass = 82.0, sq_alpha = 0.2, sq_payload = 12.5, sq_cadence = 60.0, sq_rest = 2.0,
         sq_rate = 300.0;
  int sq_reps = 20;
  std::string sq_layout = "hip-knee", sq_depth;
  auto* sq_mass_o = squat->add_option("--mass", sq_mass, "subject mass, kg");
  auto* sq_alpha_o = squat->add_option("--alpha", sq_alpha, "assistance ratio");
  auto* sq_layout_o = squat->add_option("--layout", sq_layout, "hip-only|knee-only|hip-knee");
  auto* sq_payload_o = squat->add_option("--payload", sq_payload, "carried mass, kg");
  auto* sq_cadence_o = squat->add_option("--cadence", sq_cadence, "beats/min");
  auto* sq_reps_o = squat->add_option("--reps", sq_reps, "repetitions");
  auto* sq_depth_o = squat->add_option("--depth-deg", sq_depth, "theta_t,theta_h,theta_k at the bottom, deg");
  auto* sq_rest_o = squat->add_option("--rest-beats", sq_rest, "standing rest after each rep, beats");
  auto* sq_rate_o = squat->add_option("--rate", sq_rate, "sample rate, Hz");
  squat->callback([&] {
    RunConfig cfg = make_config();
    if (sq_mass_o->count()) {
      cfg.squat.subject_mass = sq_mass;
      cfg.exo.mass = sq_mass;
    }
    if (sq_alpha_o->count()) cfg.exo.alpha = sq_alpha;
    if (sq_layout_o->count()) {
      cfg.exo.layout = detail::parse_layout(sq_layout);
      if (cfg.exo.layout == Layout::kKneeOnly) cfg.exo.l_h = 0.0;
    }
    if (sq_payload_o->count()) cfg.squat.payload = sq_payload;
    if (sq_cadence_o->count()) cfg.squat.cadence = sq_cadence;
    if (sq_reps_o->count()) cfg.squat.reps = sq_reps;
    if (sq_depth_o->count()) {
      const auto depth = split_doubles(sq_depth, "--depth-deg");
      if (depth.size() != 3) throw ConfigError("--depth-deg: expected theta_t,theta_h,theta_k");
      cfg.squat.theta_t_max = deg2rad(depth[0]);
      cfg.squat.theta_h_max = deg2rad(depth[1]);
      cfg.squat.theta_k_max = deg2rad(depth[2]);
    }
    if (sq_rest_o->count()) cfg.squat.rest_beats = sq_rest;
    if (sq_rate_o->count()) cfg.squat.sample_rate = sq_rate;
    rc = cmd_simulate_squat(cfg, resolved_out(cfg));
  });

  // control-eval -------------------------------------------------------------
  auto* ctrl = app.add_subcommand("control-eval", "assist-torque table over an angle sweep");
  std::string ctrl_layout = "hip-knee", ctrl_range_t = "-20:80:10", ctrl_range_h = "-20:100:10";
  double ctrl_mass = 82.0, ctrl_alpha = 0.2, ctrl_lt = 0.4572, ctrl_lh = 0.1778;
  ctrl->add_option("--layout", ctrl_layout, "hip-only|knee-only|hip-knee");
  ctrl->add_option("--mass", ctrl_mass, "subject mass, kg");
  ctrl->add_option("--alpha", ctrl_alpha, "assistance ratio");
  ctrl->add_option("--lt", ctrl_lt, "thigh link length, m");
  ctrl->add_option("--lh", ctrl_lh, "point-mass height above hip, m");
  ctrl->add_option("--theta-t-deg", ctrl_range_t, "thigh angle sweep min:max:step, deg");
  ctrl->add_option("--theta-h-deg", ctrl_range_h, "hip angle sweep min:max:step, deg");
  ctrl->callback([&] {
    ExoConfig exo;
    exo.layout = detail::parse_layout(ctrl_layout);
    exo.mass = ctrl_mass;
    exo.alpha = ctrl_alpha;
    exo.l_t = ctrl_lt;
    exo.l_h = exo.layout == Layout::kKneeOnly ? 0.0 : ctrl_lh;
    rc = cmd_control_eval(exo, parse_range(ctrl_range_t, "--theta-t-deg"),
                          parse_range(ctrl_range_h, "--theta-h-deg"),
                          out_opt->count() ? out_dir : "");
  });

  // emg -----------------------------------------------------------------------
  auto* emg = app.add_subcommand("emg", "EMG envelope, %MVC, repetition cropping and effort metrics");
  EmgOptions emg_opt;
  emg->add_option("--recording", emg_opt.recording, "EMG CSV: t,<channel>,... (volts)")->required();
  emg->add_option("--thigh", emg_opt.thigh, "thigh-angle CSV: t,theta_t_deg")->required();
  emg->add_option("--mvc", emg_opt.mvc, "MVC trial CSV (same schema as the recording)");
  emg->add_option("--mvc-percentile", emg_opt.mvc_percentile,
                  "MVC reference percentile; 100 uses the plain maximum");
  emg->add_option("--units", emg_opt.units, "volts (full pipeline) or pct (already %MVC)");
  emg->add_option("--expected-reps", emg_opt.expected_reps, "rep-count hint for diagnostics");
  emg->add_option("--label", emg_opt.label, "condition label for the report");
  emg->callback([&] {
    const RunConfig cfg = make_config();
    emg_opt.out = resolved_out(cfg);
    rc = cmd_emg(emg_opt);
  });

  // report ----------------------------------------------------------------------
  auto* rep = app.add_subcommand("report", "bundle outputs into one directory with a manifest");
  std::vector<std::string> rep_inputs;
  rep->add_option("--add", rep_inputs, "file to include (repeatable)");
  rep->callback([&] {
    const RunConfig cfg = make_config();
    rc = cmd_report(rep_inputs, resolved_out(cfg));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  } catch (const InputError& e) {
    std::fprintf(stderr, "exokit: input error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "exokit: config error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "exokit: numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "exokit: %s\n", e.what());
    return 1;
  }
  return rc;
}
