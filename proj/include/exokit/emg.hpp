#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "exokit/csv.hpp"
#include "exokit/errors.hpp"
#include "exokit/filters.hpp"
#include "exokit/log.hpp"

namespace exokit {

inline constexpr double kEmgBandLowHz = 20.0;
inline constexpr double kEmgBandHighHz = 200.0;
inline constexpr double kEmgRmsWindowSec = 0.1;
inline constexpr double kEmgMinSampleRate = 400.0;  // must clear twice the band edge

/// Multi-channel surface EMG record plus the companion thigh-angle track
/// (which runs on its own clock).
struct EmgRecording {
  double sample_rate = 0.0;                        // Hz, EMG channels
  std::vector<std::string> channel_names;          // muscle labels or free-form
  std::vector<std::vector<double>> channels;       // raw volts
  std::vector<double> thigh_t;                     // s
  std::vector<double> thigh_angle;                 // rad

  void validate() const {
    if (!(sample_rate > kEmgMinSampleRate)) {
      throw ConfigError("EmgRecording: sample rate must exceed " +
                        std::to_string(kEmgMinSampleRate) + " Hz");
    }
    if (channel_names.size() != channels.size()) {
      throw InputError("EmgRecording: channel name/data count mismatch");
    }
    for (const auto& ch : channels) {
      if (ch.size() != channels.front().size()) {
        throw InputError("EmgRecording: channel lengths differ");
      }
    }
  }
};

/// Demeaned, 20-200 Hz band-passed, 100 ms moving-RMS envelope of a raw
/// channel. The RMS window is centered with truncated edges so rep-aligned
/// ensembles carry no phase lag.
inline std::vector<double> envelope(const std::vector<double>& raw, double sample_rate) {
  if (!(sample_rate > kEmgMinSampleRate)) {
    throw ConfigError("envelope: sample rate must exceed " +
                      std::to_string(kEmgMinSampleRate) + " Hz");
  }
  double mean = 0.0;
  for (double v : raw) mean += v;
  if (!raw.empty()) mean /= static_cast<double>(raw.size());
  std::vector<double> x(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) x[i] = raw[i] - mean;

  x = filter_series(make_butterworth_bandpass4(sample_rate, kEmgBandLowHz, kEmgBandHighHz), x);

  std::size_t width = static_cast<std::size_t>(std::llround(kEmgRmsWindowSec * sample_rate));
  if (width % 2 == 0) ++width;
  if (width < 1) width = 1;
  return moving_rms(x, width);
}

/// 100 * envelope / reference, where the reference is the maximum of the MVC
/// envelope. Passing a percentile in (0, 100) swaps the maximum for that
/// percentile of the MVC envelope (nearest rank), for recordings whose MVC
/// trial carries spikes.
inline std::vector<double> normalize_mvc(const std::vector<double>& env,
                                         const std::vector<double>& mvc_envelope,
                                         double percentile = 100.0) {
  if (mvc_envelope.empty()) throw InputError("normalize_mvc: empty MVC envelope");
  if (!(percentile > 0.0 && percentile <= 100.0)) {
    throw ConfigError("normalize_mvc: percentile must be in (0, 100]");
  }
  double mvc = 0.0;
  if (percentile == 100.0) {
    for (double v : mvc_envelope) mvc = std::max(mvc, v);
  } else {
    std::vector<double> sorted = mvc_envelope;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t idx = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(sorted.size())));
    mvc = sorted[std::min(sorted.size(), std::max<std::size_t>(idx, 1)) - 1];
  }
  if (!(mvc > 0.0)) throw InputError("normalize_mvc: MVC envelope has no positive reference");
  std::vector<double> out(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) out[i] = 100.0 * env[i] / mvc;
  return out;
}

/// Closed sample span of one repetition; consecutive reps share the valley
/// sample at the boundary.
struct RepBounds {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive
};

/// Splits a thigh-angle trace into repetitions at the standing-posture
/// minima. Hysteresis thresholds sit at 25% and 60% of the excursion: a
/// valley region opens when the angle drops below the low threshold and
/// closes when it climbs above the high one; each region contributes its
/// minimum as a rep boundary.
inline std::vector<RepBounds> crop_reps(const std::vector<double>& theta_t,
                                        std::size_t expected_reps = 0) {
  if (theta_t.size() < 3) throw InputError("crop_reps: trace too short");
  double lo_v = theta_t[0], hi_v = theta_t[0];
  for (double v : theta_t) {
    lo_v = std::min(lo_v, v);
    hi_v = std::max(hi_v, v);
  }
  const double range = hi_v - lo_v;
  const double min_excursion = 5.0 * M_PI / 180.0;
  if (range < min_excursion) {
    throw InputError("crop_reps: thigh-angle excursion " + std::to_string(range) +
                     " rad is below the " + std::to_string(min_excursion) +
                     " rad detection threshold");
  }
  const double th_lo = lo_v + 0.25 * range;
  const double th_hi = lo_v + 0.60 * range;

  std::vector<std::size_t> valleys;
  bool in_valley = theta_t[0] <= th_lo;
  std::size_t min_idx = 0;
  for (std::size_t i = 1; i < theta_t.size(); ++i) {
    if (in_valley) {
      if (theta_t[i] < theta_t[min_idx]) min_idx = i;
      if (theta_t[i] >= th_hi) {
        valleys.push_back(min_idx);
        in_valley = false;
      }
    } else if (theta_t[i] <= th_lo) {
      in_valley = true;
      min_idx = i;
    }
  }
  if (in_valley) valleys.push_back(min_idx);

  if (valleys.size() < 2) {
    throw InputError("crop_reps: found " + std::to_string(valleys.size()) +
                     " standing valley(s), need at least 2 to bound a repetition (range " +
                     std::to_string(range) + " rad, thresholds " + std::to_string(th_lo) +
                     "/" + std::to_string(th_hi) + ")");
  }
  std::vector<RepBounds> reps;
  reps.reserve(valleys.size() - 1);
  for (std::size_t i = 0; i + 1 < valleys.size(); ++i) {
    reps.push_back({valleys[i], valleys[i + 1]});
  }
  if (expected_reps > 0 && reps.size() != expected_reps) {
    log_warn("crop_reps: detected " + std::to_string(reps.size()) + " reps, expected " +
             std::to_string(expected_reps));
  }
  return reps;
}

/// Per-repetition metrics for one channel.
struct ChannelSummary {
  std::vector<double> effort;  // %MVC*s per rep (trapezoidal integral)
  std::vector<double> peak;    // %MVC per rep
  double effort_mean = 0.0, effort_sd = 0.0;
  double peak_mean = 0.0, peak_sd = 0.0;
};

namespace detail {
inline void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
}
}  // namespace detail

/// Effort (trapezoidal time integral of %MVC, in %MVC*s) and peak per rep,
/// plus mean and sample SD across reps. Empty reps are skipped with a warning.
inline ChannelSummary summarize(const std::vector<double>& emg_pct,
                                const std::vector<RepBounds>& reps, double sample_rate) {
  if (!(sample_rate > 0.0)) throw ConfigError("summarize: sample rate must be positive");
  const double dt = 1.0 / sample_rate;
  ChannelSummary out;
  for (const RepBounds& r : reps) {
    if (r.end <= r.start || r.end >= emg_pct.size()) {
      if (r.end >= emg_pct.size()) {
        throw InputError("summarize: rep bounds exceed the series length");
      }
      log_warn("summarize: skipping empty rep [" + std::to_string(r.start) + ", " +
               std::to_string(r.end) + "]");
      continue;
    }
    double integral = 0.0;
    double peak = emg_pct[r.start];
    for (std::size_t i = r.start; i < r.end; ++i) {
      integral += 0.5 * (emg_pct[i] + emg_pct[i + 1]) * dt;
      peak = std::max(peak, emg_pct[i + 1]);
    }
    out.effort.push_back(integral);
    out.peak.push_back(peak);
  }
  detail::mean_sd(out.effort, out.effort_mean, out.effort_sd);
  detail::mean_sd(out.peak, out.peak_mean, out.peak_sd);
  return out;
}

/// "mean (SD)" to one decimal, the layout used by the summary tables.
inline std::string format_mean_sd(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f (%.1f)", mean, sd);
  return buf;
}

/// Resamples one rep to 101 points spanning 0-100% of the cycle (linear
/// interpolation over the closed span).
inline std::vector<double> resample_rep(const std::vector<double>& series, const RepBounds& rep) {
  if (rep.end <= rep.start || rep.end >= series.size()) {
    throw InputError("resample_rep: invalid bounds");
  }
  std::vector<double> out(101);
  const double span = static_cast<double>(rep.end - rep.start);
  for (int k = 0; k <= 100; ++k) {
    const double pos = static_cast<double>(rep.start) + span * (static_cast<double>(k) / 100.0);
    const std::size_t i0 = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    const std::size_t i1 = std::min(i0 + 1, rep.end);
    out[static_cast<std::size_t>(k)] = series[i0] * (1.0 - frac) + series[i1] * frac;
  }
  return out;
}

/// Pointwise mean of the 101-point cycles of every rep.
inline std::vector<double> ensemble_mean_curve(const std::vector<double>& series,
                                               const std::vector<RepBounds>& reps) {
  if (reps.empty()) throw InputError("ensemble_mean_curve: no reps");
  std::vector<double> mean(101, 0.0);
  for (const RepBounds& r : reps) {
    const std::vector<double> cycle = resample_rep(series, r);
    for (std::size_t k = 0; k < 101; ++k) mean[k] += cycle[k];
  }
  for (double& v : mean) v /= static_cast<double>(reps.size());
  return mean;
}

/// Loads a recording CSV (`t,<channel>,...`) plus its thigh-angle companion
/// (`t,theta_t_deg`, converted to radians). The channel columns stay in
/// whatever unit the file carries; callers decide whether the full volts
/// pipeline applies.
inline EmgRecording read_emg_recording_csv(const std::filesystem::path& recording,
                                           const std::filesystem::path& thigh) {
  NumericTable rec = read_numeric_csv(recording);
  if (rec.names.size() < 2 || rec.names.front() != "t") {
    throw InputError(recording.filename().string() + ": expected header 't,<channel>,...'");
  }
  if (rec.rows() < 3) throw InputError(recording.filename().string() + ": too few samples");

  NumericTable ang = read_numeric_csv(thigh);
  if (ang.names != std::vector<std::string>{"t", "theta_t_deg"}) {
    throw InputError(thigh.filename().string() + ": expected header 't,theta_t_deg'");
  }

  EmgRecording out;
  out.sample_rate = 1.0 / (rec.columns[0][1] - rec.columns[0][0]);
  out.channel_names.assign(rec.names.begin() + 1, rec.names.end());
  out.channels.assign(rec.columns.begin() + 1, rec.columns.end());
  out.thigh_t = std::move(ang.columns[0]);
  out.thigh_angle.resize(ang.columns[1].size());
  for (std::size_t i = 0; i < out.thigh_angle.size(); ++i) {
    out.thigh_angle[i] = ang.columns[1][i] * M_PI / 180.0;
  }
  return out;
}

}  // namespace exokit
