#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "exokit/csv.hpp"
#include "exokit/errors.hpp"

namespace exokit {

/// Uniformly sampled benchtop record: commanded current, output kinematics
/// and load-cell torque. The CSV schema is `t,i_q,theta,omega,tau_meas`
/// (SI units, LF line endings).
struct TrialLog {
  std::vector<double> t;         // s, strictly increasing, uniform step
  std::vector<double> i_q;       // A
  std::vector<double> theta;     // rad
  std::vector<double> omega;     // rad/s
  std::vector<double> tau_meas;  // Nm
  double sample_rate = 0.0;      // Hz, 1/dt

  std::size_t size() const { return t.size(); }

  void reserve(std::size_t n) {
    t.reserve(n);
    i_q.reserve(n);
    theta.reserve(n);
    omega.reserve(n);
    tau_meas.reserve(n);
  }

  void push(double time, double current, double pos, double vel, double torque) {
    t.push_back(time);
    i_q.push_back(current);
    theta.push_back(pos);
    omega.push_back(vel);
    tau_meas.push_back(torque);
  }

  /// Enforces the column-length, uniform-step and rate invariants.
  void validate() const {
    const std::size_t n = t.size();
    if (n < 2) throw InputError("TrialLog: need at least 2 samples");
    if (i_q.size() != n || theta.size() != n || omega.size() != n || tau_meas.size() != n) {
      throw InputError("TrialLog: column lengths differ");
    }
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw InputError("TrialLog: time must be strictly increasing");
    for (std::size_t i = 1; i < n; ++i) {
      const double step = t[i] - t[i - 1];
      if (!(step > 0.0)) {
        throw InputError("TrialLog: time not strictly increasing at sample " + std::to_string(i));
      }
      if (std::abs(step - dt) > 1e-6) {
        throw InputError("TrialLog: non-uniform time step at sample " + std::to_string(i));
      }
    }
    if (!(sample_rate > 0.0) || std::abs(sample_rate * dt - 1.0) > 1e-6) {
      throw InputError("TrialLog: sample_rate does not match the time step");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(i_q[i]) || !std::isfinite(theta[i]) || !std::isfinite(omega[i]) ||
          !std::isfinite(tau_meas[i])) {
        throw InputError("TrialLog: non-finite sample at row " + std::to_string(i));
      }
    }
  }
};

inline const std::vector<std::string>& trial_csv_header() {
  static const std::vector<std::string> names = {"t", "i_q", "theta", "omega", "tau_meas"};
  return names;
}

inline void write_trial_csv(const TrialLog& log, const std::filesystem::path& path) {
  const std::vector<std::vector<double>> cols = {log.t, log.i_q, log.theta, log.omega,
                                                 log.tau_meas};
  write_numeric_csv(path, trial_csv_header(), cols);
}

inline TrialLog read_trial_csv(const std::filesystem::path& path) {
  NumericTable table = read_numeric_csv(path);
  const auto& expect = trial_csv_header();
  if (table.names != expect) {
    std::string got;
    for (std::size_t i = 0; i < table.names.size(); ++i) {
      if (i) got += ',';
      got += table.names[i];
    }
    throw InputError(path.filename().string() +
                     ": bad header '" + got + "', expected 't,i_q,theta,omega,tau_meas'");
  }
  TrialLog log;
  log.t = std::move(table.columns[0]);
  log.i_q = std::move(table.columns[1]);
  log.theta = std::move(table.columns[2]);
  log.omega = std::move(table.columns[3]);
  log.tau_meas = std::move(table.columns[4]);
  if (log.t.size() < 2) {
    throw InputError(path.filename().string() + ": need at least 2 data rows");
  }
  log.sample_rate = 1.0 / (log.t[1] - log.t[0]);
  log.validate();
  return log;
}

/// Appends b after a, shifting b's clock to continue a's uniform grid.
/// Sample rates must match.
inline TrialLog concat_trials(const TrialLog& a, const TrialLog& b) {
  if (std::abs(a.sample_rate - b.sample_rate) > 1e-9) {
    throw InputError("concat_trials: sample rates differ");
  }
  TrialLog out = a;
  out.reserve(a.size() + b.size());
  const double dt = 1.0 / a.sample_rate;
  const double t0 = a.t.empty() ? 0.0 : a.t.back() + dt;
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.push(t0 + static_cast<double>(i) * dt, b.i_q[i], b.theta[i], b.omega[i], b.tau_meas[i]);
  }
  return out;
}

}  // namespace exokit
