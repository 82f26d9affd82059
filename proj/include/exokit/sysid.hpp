#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "exokit/actuator_model.hpp"
#include "exokit/filters.hpp"
#include "exokit/log.hpp"
#include "exokit/trial_log.hpp"

namespace exokit {

/// Regression filter: steady-state torque is what the model should explain,
/// so both sides of the least-squares problem are low-passed hard.
inline constexpr double kFitFilterHz = 2.0;
inline constexpr double kFitFilterZeta = 0.7;

/// The causal filter needs this long to forget its zero initial state; the
/// leading 3/fc seconds are dropped from every regression window.
inline std::size_t fit_transient_samples(double sample_rate) {
  return static_cast<std::size_t>(std::ceil(3.0 / kFitFilterHz * sample_rate));
}

struct FitReport {
  ActuatorParams params;
  double residual_rmse = 0.0;  // Nm, filtered residual
  double residual_p95 = 0.0;   // Nm, 95th percentile of |filtered residual|
  std::size_t n_samples = 0;   // rows entering the regression
  double sample_rate = 0.0;    // Hz, echoed from the log
  std::vector<std::string> warnings;
};

struct RegressorData {
  Eigen::MatrixXd X;  // filtered columns [1, g_r*i, -g_r*|i|*i, -sgn(w), -|i|*sgn(w)]
  Eigen::VectorXd y;  // filtered tau_meas
  std::size_t transient_skip = 0;
  std::vector<std::string> warnings;
};

inline const char* regressor_column_name(int j) {
  static constexpr const char* kNames[] = {"bias", "k_tau", "k_n", "f_coulomb", "f_gear"};
  return kNames[j];
}

/// Builds the filtered least-squares problem for the torque model. Rows where
/// |omega| falls inside the rest deadband get sign 0 and contribute nothing
/// to the friction columns; a warning is recorded for columns with no
/// excitation at all.
inline RegressorData build_regressor(const TrialLog& log, double gear_ratio = 9.0) {
  log.validate();
  if (!(gear_ratio > 0.0)) throw ConfigError("build_regressor: gear_ratio must be positive");
  const std::size_t n = log.size();

  std::vector<std::vector<double>> cols(5, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double i_q = log.i_q[i];
    const double s = sign_deadband(log.omega[i]);
    cols[0][i] = 1.0;
    cols[1][i] = gear_ratio * i_q;
    cols[2][i] = -gear_ratio * std::abs(i_q) * i_q;
    cols[3][i] = -s;
    cols[4][i] = -std::abs(i_q) * s;
  }

  RegressorData out;
  for (int j = 1; j < 5; ++j) {
    double peak = 0.0;
    for (double v : cols[j]) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) {
      out.warnings.push_back(std::string("no excitation in column ") +
                             regressor_column_name(j));
    }
  }

  out.X.resize(static_cast<Eigen::Index>(n), 5);
  for (int j = 0; j < 5; ++j) {
    const std::vector<double> filtered =
        lowpass2(cols[j], log.sample_rate, kFitFilterHz, kFitFilterZeta);
    for (std::size_t i = 0; i < n; ++i) out.X(static_cast<Eigen::Index>(i), j) = filtered[i];
  }
  const std::vector<double> y_f =
      lowpass2(log.tau_meas, log.sample_rate, kFitFilterHz, kFitFilterZeta);
  out.y.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) out.y(static_cast<Eigen::Index>(i)) = y_f[i];

  out.transient_skip = fit_transient_samples(log.sample_rate);
  return out;
}

namespace detail {

/// Column-equilibrated least squares through Householder QR. Never forms the
/// normal equations. Throws NumericError naming the first dead or dependent
/// column when the system is rank deficient.
inline Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                           const char* (*col_name)(int)) {
  const Eigen::Index m = X.cols();
  Eigen::VectorXd scale(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double norm = X.col(j).norm();
    if (norm == 0.0) {
      throw NumericError(std::string("rank-deficient regressor: column '") + col_name(int(j)) +
                         "' has no excitation");
    }
    scale(j) = norm;
  }
  Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  qr.setThreshold(1e-10);
  if (qr.rank() < m) {
    const auto perm = qr.colsPermutation().indices();
    const int dropped = perm(m - 1);  // column pivoted last carries least new information
    throw NumericError(std::string("rank-deficient regressor: column '") + col_name(dropped) +
                       "' is linearly dependent on the others");
  }
  const Eigen::VectorXd c_scaled = qr.solve(y);
  return c_scaled.cwiseQuotient(scale);
}

inline double rms(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

inline double percentile_abs(const Eigen::VectorXd& v, double pct) {
  if (v.size() == 0) return 0.0;
  std::vector<double> mag(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) mag[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::sort(mag.begin(), mag.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(mag.size())));
  return mag[std::min(mag.size(), std::max<std::size_t>(idx, 1)) - 1];
}

}  // namespace detail

/// Fits the five torque-model constants by filtered ordinary least squares
/// and reports residual statistics over the post-transient window. The
/// returned params carry reflected_inertia = 0; the backdrive regression
/// below fills it in.
inline FitReport fit_torque_model(const TrialLog& log, double gear_ratio = 9.0) {
  RegressorData reg = build_regressor(log, gear_ratio);
  const Eigen::Index n = reg.X.rows();
  const Eigen::Index skip = static_cast<Eigen::Index>(reg.transient_skip);
  if (n - skip < 16) {
    throw NumericError("fit_torque_model: log shorter than the filter transient window");
  }
  const Eigen::MatrixXd X = reg.X.bottomRows(n - skip);
  const Eigen::VectorXd y = reg.y.tail(n - skip);

  const Eigen::VectorXd c = detail::solve_least_squares(X, y, regressor_column_name);

  FitReport report;
  report.warnings = reg.warnings;
  ActuatorParams& p = report.params;
  p.gear_ratio = gear_ratio;
  p.bias = c(0);
  p.k_tau = c(1);
  p.k_n = c(2);
  p.f_coulomb = c(3);
  if (!(c(1) > 0.0)) {
    throw NumericError("fit_torque_model: non-positive fitted k_tau, data inconsistent");
  }
  p.f_gear = c(4) / (gear_ratio * c(1));  // column carries f_gear * g_r * k_tau
  p.reflected_inertia = 0.0;

  const Eigen::VectorXd r = y - X * c;
  report.residual_rmse = detail::rms(r);
  report.residual_p95 = detail::percentile_abs(r, 95.0);
  report.n_samples = static_cast<std::size_t>(n - skip);
  report.sample_rate = log.sample_rate;

  for (const auto& w : report.warnings) log_warn("fit_torque_model: " + w);
  return report;
}

struct InertiaFit {
  double reflected_inertia = 0.0;  // kg*m^2
  double bias = 0.0;               // Nm, residual offset
  double rmse_before = 0.0;        // Nm, residual RMS before the inertia term
  double rmse_after = 0.0;         // Nm, after
  std::size_t n_samples = 0;
};

/// Second-stage regression on a zero-current backdrive trial. The torque
/// model's prediction of the backdrive resistance (Coulomb friction plus
/// sensor bias plus whatever inertia `base` already carries) is subtracted
/// from the measurement, and the residual is regressed on [alpha_dd, 1] with
/// alpha_dd obtained by central differencing of omega. Everything passes
/// through the same 2 Hz regression filter.
inline InertiaFit fit_inertia(const TrialLog& log, const ActuatorParams& base) {
  log.validate();
  const std::size_t n = log.size();
  const double dt = 1.0 / log.sample_rate;

  double peak_current = 0.0;
  for (double i : log.i_q) peak_current = std::max(peak_current, std::abs(i));
  if (peak_current > 0.1) {
    log_warn("fit_inertia: log carries nonzero current (|i_q| up to " +
             std::to_string(peak_current) + " A), expected a passive backdrive trial");
  }

  std::vector<double> alpha(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    alpha[i] = (log.omega[i + 1] - log.omega[i - 1]) / (2.0 * dt);
  }
  if (n >= 2) {
    alpha[0] = (log.omega[1] - log.omega[0]) / dt;
    alpha[n - 1] = (log.omega[n - 1] - log.omega[n - 2]) / dt;
  }

  std::vector<double> residual_raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    residual_raw[i] = log.tau_meas[i] - (base.bias + backdrive_torque(base, log.omega[i], alpha[i]));
  }

  const std::vector<double> r_f =
      lowpass2(residual_raw, log.sample_rate, kFitFilterHz, kFitFilterZeta);
  const std::vector<double> a_f = lowpass2(alpha, log.sample_rate, kFitFilterHz, kFitFilterZeta);
  const std::vector<double> one_f = lowpass2(std::vector<double>(n, 1.0), log.sample_rate,
                                             kFitFilterHz, kFitFilterZeta);

  const std::size_t skip = fit_transient_samples(log.sample_rate);
  if (n <= skip + 16) {
    throw NumericError("fit_inertia: log shorter than the filter transient window");
  }
  const std::size_t rows = n - skip;

  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    X(static_cast<Eigen::Index>(i), 0) = a_f[skip + i];
    X(static_cast<Eigen::Index>(i), 1) = one_f[skip + i];
    y(static_cast<Eigen::Index>(i)) = r_f[skip + i];
  }

  const double accel_rms = detail::rms(X.col(0));
  if (accel_rms < 1.0) {
    throw NumericError("fit_inertia: acceleration excitation too low (rms " +
                       std::to_string(accel_rms) + " rad/s^2 < 1)");
  }

  static constexpr const char* kColNames[] = {"reflected_inertia", "bias"};
  const Eigen::VectorXd c = detail::solve_least_squares(
      X, y, +[](int j) { return kColNames[j]; });

  InertiaFit fit;
  fit.reflected_inertia = base.reflected_inertia + c(0);
  fit.bias = c(1);
  fit.rmse_before = detail::rms(y);
  fit.rmse_after = detail::rms(Eigen::VectorXd(y - X * c));
  fit.n_samples = rows;
  return fit;
}

}  // namespace exokit
