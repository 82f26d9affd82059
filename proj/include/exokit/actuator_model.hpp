#pragma once

#include <cmath>
#include <string>

#include "exokit/errors.hpp"

namespace exokit {

/// Velocity deadband below which direction-dependent friction is treated as
/// zero. The friction term is discontinuous at zero speed and this keeps
/// predictions (and simulated trials) chatter-free at rest.
inline constexpr double kVelocityDeadband = 0.01;  // rad/s

inline constexpr double kRatedCurrentMax = 30.0;   // A, operating branch limit
inline constexpr double kCurrentSanityMax = 40.0;  // A, hard input bound

/// sign(omega) with the rest deadband mapped to 0.
inline double sign_deadband(double omega) {
  if (omega > kVelocityDeadband) return 1.0;
  if (omega < -kVelocityDeadband) return -1.0;
  return 0.0;
}

/// Identified constants of the quasi-direct-drive actuator torque model plus
/// the output-side reflected inertia.
struct ActuatorParams {
  double gear_ratio = 9.0;          // dimensionless
  double k_tau = 0.147;             // Nm/A, torque constant near zero current
  double k_n = 0.0011;              // Nm/A^2, torque-constant droop per amp
  double f_coulomb = 0.37;          // Nm
  double f_gear = 0.088;            // fraction of nominal torque lost to gearing
  double bias = 0.0;                // Nm, torque-sensor offset
  double reflected_inertia = 0.0;   // kg*m^2 at the output
  double k_t_nominal = 0.14;        // Nm/A, datasheet-style constant for the simple model

  /// Torque constant at a given current magnitude.
  double effective_k_tau(double i_q) const { return k_tau - k_n * std::abs(i_q); }

  /// Throws InputError if any constant is out of range. Beyond the basic sign
  /// constraints this requires the effective torque constant to stay positive
  /// over the rated current range and, more strongly, the torque-vs-current
  /// map to stay strictly increasing there (k_tau*(1-f_gear) > 2*k_n*30 A);
  /// the inverse solve relies on the monotone branch.
  void validate() const {
    auto fail = [](const std::string& msg) { throw InputError("ActuatorParams: " + msg); };
    if (!(gear_ratio > 0.0)) fail("gear_ratio must be positive");
    if (!(k_tau > 0.0)) fail("k_tau must be positive");
    if (!(k_n >= 0.0)) fail("k_n must be non-negative");
    if (!(f_coulomb >= 0.0)) fail("f_coulomb must be non-negative");
    if (!(f_gear >= 0.0 && f_gear < 1.0)) fail("f_gear must be in [0, 1)");
    if (!(reflected_inertia >= 0.0)) fail("reflected_inertia must be non-negative");
    if (!(k_t_nominal > 0.0)) fail("k_t_nominal must be positive");
    if (!std::isfinite(bias)) fail("bias must be finite");
    if (!(effective_k_tau(kRatedCurrentMax) > 0.0)) {
      fail("effective torque constant non-positive inside the rated 30 A range");
    }
    if (!(k_tau * (1.0 - f_gear) - 2.0 * k_n * kRatedCurrentMax > 0.0)) {
      fail("torque map not strictly increasing over the rated 30 A range");
    }
  }

  /// Benchtop-identified constants (torque model plus reflected inertia).
  static ActuatorParams identified() {
    ActuatorParams p;
    p.gear_ratio = 9.0;
    p.k_tau = 0.147;
    p.k_n = 0.0011;  // (0.147 - 0.125) Nm/A over 20 A
    p.f_coulomb = 0.37;
    p.f_gear = 0.088;
    p.bias = 0.0;
    p.reflected_inertia = 92.11e-4;  // 92.11 kg*cm^2
    p.k_t_nominal = 0.14;
    return p;
  }

  /// Frictionless datasheet model tau = g_r * K_t * i.
  static ActuatorParams nominal() {
    ActuatorParams p;
    p.gear_ratio = 9.0;
    p.k_tau = 0.14;
    p.k_n = 0.0;
    p.f_coulomb = 0.0;
    p.f_gear = 0.0;
    p.bias = 0.0;
    p.reflected_inertia = 0.0;
    p.k_t_nominal = 0.14;
    return p;
  }
};

namespace detail {
inline void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
}
}  // namespace detail

/// Output torque for a commanded q-axis current at a given output velocity:
///   bias + g_r*(k_tau - k_n*|i|)*i - (f_C + f_gear*|g_r*k_tau*i|)*sign(omega)
/// with sign() deadbanded at rest.
inline double predict_torque(const ActuatorParams& p, double i_q, double omega) {
  detail::check_finite(i_q, "i_q");
  detail::check_finite(omega, "omega");
  if (std::abs(i_q) > kCurrentSanityMax) {
    throw InputError("predict_torque: |i_q| exceeds the 40 A sanity bound");
  }
  const double s = sign_deadband(omega);
  const double nominal = p.gear_ratio * p.k_tau * i_q;
  return p.bias + p.gear_ratio * (p.k_tau - p.k_n * std::abs(i_q)) * i_q -
         (p.f_coulomb + p.f_gear * std::abs(nominal)) * s;
}

/// Torque reachable at the rated-current limits for a given velocity sign.
struct TorqueRange {
  double min;  // at i_q = -30 A
  double max;  // at i_q = +30 A
};
inline TorqueRange achievable_torque_range(const ActuatorParams& p, double omega) {
  return {predict_torque(p, -kRatedCurrentMax, omega),
          predict_torque(p, +kRatedCurrentMax, omega)};
}

/// Inverts the torque model: the q-axis current that delivers tau_desired at
/// velocity omega. Picks the smaller-magnitude root of the per-branch
/// quadratic (the physical branch where the torque map is increasing).
/// Throws NumericError when no real root exists or the root exceeds 30 A.
inline double current_for_torque(const ActuatorParams& p, double tau_desired, double omega) {
  detail::check_finite(tau_desired, "tau_desired");
  detail::check_finite(omega, "omega");
  const double s = sign_deadband(omega);
  const double a = p.gear_ratio * p.k_n;

  // Torque at zero current is bias - s*f_C; the residual target decides the
  // current sign branch.
  const double t_pos = tau_desired - p.bias + s * p.f_coulomb;

  double magnitude = 0.0;
  double sign = 1.0;
  if (t_pos >= 0.0) {
    // i >= 0: a*i^2 - b*i + t_pos = 0 with b = g_r*k_tau*(1 - s*f_gear).
    const double b = p.gear_ratio * p.k_tau * (1.0 - s * p.f_gear);
    const double disc = b * b - 4.0 * a * t_pos;
    if (disc < 0.0) {
      throw NumericError("current_for_torque: torque " + std::to_string(tau_desired) +
                         " Nm is beyond the model's reachable range");
    }
    magnitude = 2.0 * t_pos / (b + std::sqrt(disc));
    sign = 1.0;
  } else {
    // i <= 0 with i = -u, u >= 0: a*u^2 - b*u + u_target = 0,
    // b = g_r*k_tau*(1 + s*f_gear), u_target = -(tau - bias + s*f_C).
    const double b = p.gear_ratio * p.k_tau * (1.0 + s * p.f_gear);
    const double u_target = -t_pos;
    const double disc = b * b - 4.0 * a * u_target;
    if (disc < 0.0) {
      throw NumericError("current_for_torque: torque " + std::to_string(tau_desired) +
                         " Nm is beyond the model's reachable range");
    }
    magnitude = 2.0 * u_target / (b + std::sqrt(disc));
    sign = -1.0;
  }
  if (magnitude > kRatedCurrentMax) {
    throw NumericError("current_for_torque: torque " + std::to_string(tau_desired) +
                       " Nm needs " + std::to_string(magnitude) +
                       " A, beyond the 30 A rated range");
  }
  return sign * magnitude;
}

/// Passive resistance felt when the unpowered actuator is driven externally:
/// reflected inertia reaction plus Coulomb friction. All current-dependent
/// terms of the torque model vanish at zero current.
inline double backdrive_torque(const ActuatorParams& p, double omega, double alpha_dd) {
  detail::check_finite(omega, "omega");
  detail::check_finite(alpha_dd, "alpha_dd");
  return p.reflected_inertia * alpha_dd + p.f_coulomb * sign_deadband(omega);
}

}  // namespace exokit
