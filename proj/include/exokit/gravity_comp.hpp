#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <span>
#include <string>

#include "exokit/errors.hpp"

namespace exokit {

enum class Layout { kHipOnly, kKneeOnly, kHipKnee };

inline const char* layout_name(Layout l) {
  switch (l) {
    case Layout::kHipOnly: return "hip-only";
    case Layout::kKneeOnly: return "knee-only";
    case Layout::kHipKnee: return "hip-knee";
  }
  return "?";
}

/// Joint configuration plus the constants of the assistance law.
///
/// Sign conventions used throughout: joint angles are flexion-positive,
/// theta_t is positive when the thigh tilts forward of vertical, and assist
/// torques are extension-positive at both joints. With those choices the
/// default saturation [0, 25] Nm reads directly as "25 Nm in extension,
/// none in flexion".
struct ExoConfig {
  Layout layout = Layout::kHipKnee;
  double mass = 0.0;            // kg, wearer
  double alpha = 0.0;           // assistance ratio in [0, 1]
  double l_t = 0.4572;          // m, thigh link length
  double l_h = 0.1778;          // m, point-mass height above the hip center
  double g = 9.81;              // m/s^2
  double tau_ext_max = 25.0;    // Nm, extension clamp
  double tau_flex_max = 0.0;    // Nm, flexion clamp

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError("ExoConfig: " + m); };
    if (!(mass > 0.0)) fail("mass must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must be in [0, 1]");
    if (!(l_t > 0.0)) fail("l_t must be positive");
    if (!(l_h >= 0.0)) fail("l_h must be non-negative");
    if (layout == Layout::kKneeOnly && l_h != 0.0) fail("knee-only layout requires l_h = 0");
    if (!(g > 0.0)) fail("g must be positive");
    if (!(tau_ext_max >= 0.0)) fail("tau_ext_max must be non-negative");
    if (!(tau_flex_max >= 0.0)) fail("tau_flex_max must be non-negative");
  }
};

/// One reading from the encoders and the thigh IMU.
struct PoseSample {
  double theta_h = 0.0;  // rad, hip encoder
  double theta_k = 0.0;  // rad, knee encoder
  Eigen::Matrix3d R_thigh = Eigen::Matrix3d::Identity();  // thigh IMU, world frame
  double t = 0.0;        // s
};

/// Assist torques for the joints present in the active layout.
struct JointTorques {
  std::optional<double> tau_h;  // Nm, extension-positive
  std::optional<double> tau_k;  // Nm, extension-positive
};

struct CalibrationOffsets {
  double theta_h0 = 0.0;
  double theta_k0 = 0.0;
  double theta_t0 = 0.0;
};

/// Sagittal thigh angle from the IMU rotation matrix.
///
/// World frame: X forward, Y up, Z out of the sagittal plane (the IMU z-axis
/// is mounted along Z). The thigh's long axis points hip-to-knee, i.e. along
/// -Y of the body frame, so the identity rotation (the calibrated standing
/// pose) maps to exactly 0 and a rotation of +a about Z tilts the thigh
/// forward by a.
inline double thigh_angle_from_rotation(const Eigen::Matrix3d& R) {
  const double ortho_err = (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (!(ortho_err <= 1e-6)) {
    throw InputError("thigh_angle_from_rotation: matrix not orthonormal (error " +
                     std::to_string(ortho_err) + ")");
  }
  if (!(std::abs(R.determinant() - 1.0) <= 1e-6)) {
    throw InputError("thigh_angle_from_rotation: determinant is not +1");
  }
  const Eigen::Vector3d axis = R * Eigen::Vector3d(0.0, -1.0, 0.0);
  // Within 1 degree of the sagittal normal the in-plane projection is meaningless.
  if (std::abs(axis.z()) >= std::cos(1.0 * M_PI / 180.0)) {
    throw InputError("thigh_angle_from_rotation: thigh axis within 1 deg of the sagittal normal");
  }
  return std::atan2(axis.x(), -axis.y());
}

/// Offsets that zero all three angles at the given standing pose.
inline CalibrationOffsets calibrate(const PoseSample& standing) {
  CalibrationOffsets cal;
  cal.theta_h0 = standing.theta_h;
  cal.theta_k0 = standing.theta_k;
  cal.theta_t0 = thigh_angle_from_rotation(standing.R_thigh);
  return cal;
}

/// Window calibration: arithmetic mean of each angle over a quiet standing
/// interval. Rejects windows where any angle wanders more than 0.1 rad.
inline CalibrationOffsets calibrate(std::span<const PoseSample> window) {
  if (window.empty()) throw InputError("calibrate: empty window");
  CalibrationOffsets sum;
  double h_min = window.front().theta_h, h_max = h_min;
  double k_min = window.front().theta_k, k_max = k_min;
  double t_min = 0.0, t_max = 0.0;
  bool first = true;
  for (const PoseSample& s : window) {
    const double tt = thigh_angle_from_rotation(s.R_thigh);
    if (first) {
      t_min = t_max = tt;
      first = false;
    }
    sum.theta_h0 += s.theta_h;
    sum.theta_k0 += s.theta_k;
    sum.theta_t0 += tt;
    h_min = std::min(h_min, s.theta_h);
    h_max = std::max(h_max, s.theta_h);
    k_min = std::min(k_min, s.theta_k);
    k_max = std::max(k_max, s.theta_k);
    t_min = std::min(t_min, tt);
    t_max = std::max(t_max, tt);
  }
  if (h_max - h_min > 0.1 || k_max - k_min > 0.1 || t_max - t_min > 0.1) {
    throw InputError("calibrate: pose not still over the calibration window");
  }
  const double n = static_cast<double>(window.size());
  return {sum.theta_h0 / n, sum.theta_k0 / n, sum.theta_t0 / n};
}

namespace detail {
/// Clamp to [-flex_max, ext_max] and canonicalize -0 so that equal torques
/// always serialize identically.
inline double clamp_torque(double tau, const ExoConfig& cfg) {
  const double lo = cfg.tau_flex_max == 0.0 ? 0.0 : -cfg.tau_flex_max;
  double v = std::clamp(tau, lo, cfg.tau_ext_max);
  if (v == 0.0) v = 0.0;
  return v;
}
}  // namespace detail

/// Gravity-compensation law for calibrated angles (rad):
///   tau_k = m g a (l_t sin(theta_t) - l_h sin(theta_t - theta_h))
///   tau_h = m g a (-l_h sin(theta_t - theta_h))
/// The knee-only layout is the same law with l_h = 0 and theta_h = 0, and
/// each torque is clamped to [-tau_flex_max, tau_ext_max]. Zero angles give
/// exactly zero torques in every layout. Pure arithmetic: no allocation, no
/// branching on data, safe at control-loop rates.
inline JointTorques assist_torques(const ExoConfig& cfg, double theta_t, double theta_h) {
  if (!std::isfinite(theta_t) || !std::isfinite(theta_h)) {
    throw InputError("assist_torques: angles must be finite");
  }
  const double l_h = cfg.layout == Layout::kKneeOnly ? 0.0 : cfg.l_h;
  const double th = cfg.layout == Layout::kKneeOnly ? 0.0 : theta_h;
  const double mga = cfg.mass * cfg.g * cfg.alpha;
  const double lever = -l_h * std::sin(theta_t - th);

  JointTorques out;
  if (cfg.layout != Layout::kKneeOnly) {
    out.tau_h = detail::clamp_torque(mga * lever, cfg);
  }
  if (cfg.layout != Layout::kHipOnly) {
    out.tau_k = detail::clamp_torque(mga * (cfg.l_t * std::sin(theta_t) + lever), cfg);
  }
  return out;
}

/// Stateful wrapper owning the configuration and calibration offsets.
/// Calibration is the single-writer step; torque evaluation is pure and may
/// run from any number of readers afterwards.
class GravityCompController {
 public:
  explicit GravityCompController(ExoConfig cfg) : cfg_(cfg) { cfg_.validate(); }

  const ExoConfig& config() const { return cfg_; }

  void set_calibration(const CalibrationOffsets& cal) { cal_ = cal; }
  void calibrate_standing(const PoseSample& pose) { cal_ = calibrate(pose); }
  void calibrate_standing(std::span<const PoseSample> window) { cal_ = calibrate(window); }
  bool calibrated() const { return cal_.has_value(); }

  struct Angles {
    double theta_t, theta_h, theta_k;
  };

  Angles angles(const PoseSample& pose) const {
    require_calibrated();
    return {thigh_angle_from_rotation(pose.R_thigh) - cal_->theta_t0,
            pose.theta_h - cal_->theta_h0, pose.theta_k - cal_->theta_k0};
  }

  JointTorques update(const PoseSample& pose) const {
    const Angles a = angles(pose);
    return assist_torques(cfg_, a.theta_t, a.theta_h);
  }

 private:
  void require_calibrated() const {
    if (!cal_) throw StateError("controller used before standing calibration");
  }

  ExoConfig cfg_;
  std::optional<CalibrationOffsets> cal_;
};

}  // namespace exokit
