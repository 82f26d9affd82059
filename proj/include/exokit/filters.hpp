#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "exokit/errors.hpp"

namespace exokit {

/// Single biquad section, direct form II transposed, a0 normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  double s1 = 0.0, s2 = 0.0;

  double step(double x) {
    const double y = b0 * x + s1;
    s1 = b1 * x - a1 * y + s2;
    s2 = b2 * x - a2 * y;
    return y;
  }

  void reset() { s1 = s2 = 0.0; }

  std::complex<double> response(double omega_dig) const {
    const std::complex<double> z1 = std::polar(1.0, -omega_dig);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }
};

/// Second-order low-pass wn^2/(s^2 + 2*zeta*wn*s + wn^2) discretized with the
/// bilinear transform, prewarped so the analog corner lands exactly on fc.
/// DC gain is exactly 1 by construction.
inline Biquad make_lowpass2(double sample_rate, double fc, double zeta) {
  if (!(sample_rate > 0.0)) throw ConfigError("lowpass2: sample rate must be positive");
  if (!(fc > 0.0)) throw ConfigError("lowpass2: corner frequency must be positive");
  if (!(zeta > 0.0)) throw ConfigError("lowpass2: damping ratio must be positive");
  if (fc >= sample_rate / 2.0) {
    throw ConfigError("lowpass2: corner frequency " + std::to_string(fc) +
                      " Hz is at or above Nyquist for " + std::to_string(sample_rate) + " Hz");
  }
  const double wn = 2.0 * M_PI * fc;
  const double T = 1.0 / sample_rate;
  const double K = wn / std::tan(wn * T / 2.0);
  const double k2 = K * K;
  const double wn2 = wn * wn;
  const double a0 = k2 + 2.0 * zeta * wn * K + wn2;

  Biquad q;
  q.b0 = wn2 / a0;
  q.b1 = 2.0 * wn2 / a0;
  q.b2 = wn2 / a0;
  q.a1 = 2.0 * (wn2 - k2) / a0;
  q.a2 = (k2 - 2.0 * zeta * wn * K + wn2) / a0;
  return q;
}

/// Runs a biquad cascade causally over a series from zero initial state.
inline std::vector<double> filter_series(std::vector<Biquad> sections,
                                         const std::vector<double>& x) {
  std::vector<double> y(x);
  for (auto& q : sections) {
    q.reset();
    for (double& v : y) v = q.step(v);
  }
  return y;
}

/// Causal second-order low-pass over a whole series (single forward pass,
/// zero initial state, unit DC gain).
inline std::vector<double> lowpass2(const std::vector<double>& signal, double sample_rate,
                                    double fc, double zeta) {
  return filter_series({make_lowpass2(sample_rate, fc, zeta)}, signal);
}

/// 4th-order Butterworth band-pass (2nd-order prototype through the standard
/// band-pass transform), bilinear with prewarped band edges, realized as two
/// biquads. Gain is normalized to 1 at the geometric center of the band.
inline std::vector<Biquad> make_butterworth_bandpass4(double sample_rate, double f_lo,
                                                      double f_hi) {
  if (!(sample_rate > 0.0)) throw ConfigError("bandpass: sample rate must be positive");
  if (!(0.0 < f_lo && f_lo < f_hi)) throw ConfigError("bandpass: need 0 < f_lo < f_hi");
  if (f_hi >= sample_rate / 2.0) {
    throw ConfigError("bandpass: upper edge " + std::to_string(f_hi) +
                      " Hz is at or above Nyquist for " + std::to_string(sample_rate) + " Hz");
  }
  using cd = std::complex<double>;
  const double fs2 = 2.0 * sample_rate;
  // Prewarped analog band edges.
  const double wl = fs2 * std::tan(M_PI * f_lo / sample_rate);
  const double wh = fs2 * std::tan(M_PI * f_hi / sample_rate);
  const double w0sq = wl * wh;
  const double bw = wh - wl;

  // Order-2 Butterworth prototype pole (upper half plane); its conjugate is implied.
  const cd proto = std::polar(1.0, 3.0 * M_PI / 4.0);

  // Band-pass transform s_lp -> (s^2 + w0^2)/(bw*s): each prototype pole maps
  // to the two roots of s^2 - p*bw*s + w0^2 = 0.
  const cd pb = proto * bw;
  const cd disc = std::sqrt(pb * pb - 4.0 * w0sq);
  const cd s_poles[2] = {(pb + disc) / 2.0, (pb - disc) / 2.0};

  std::vector<Biquad> sections;
  for (const cd& sp : s_poles) {
    const cd zp = (fs2 + sp) / (fs2 - sp);  // bilinear map of the pole pair {sp, conj(sp)}
    Biquad q;
    q.b0 = 1.0;
    q.b1 = 0.0;
    q.b2 = -1.0;  // one zero from s=0 (z=1) and one from s=inf (z=-1)
    q.a1 = -2.0 * zp.real();
    q.a2 = std::norm(zp);
    sections.push_back(q);
  }

  // Normalize at the digital frequency whose prewarped image is sqrt(wl*wh).
  const double w_center_dig = 2.0 * std::atan(std::sqrt(w0sq) / fs2);
  cd h(1.0, 0.0);
  for (const auto& q : sections) h *= q.response(w_center_dig);
  const double gain = std::abs(h);
  if (!(gain > 0.0)) throw NumericError("bandpass: degenerate design, zero center gain");
  sections.front().b0 /= gain;
  sections.front().b2 /= gain;
  return sections;
}

/// Centered moving-window RMS with truncated windows at the edges.
/// Width must be odd and >= 1.
inline std::vector<double> moving_rms(const std::vector<double>& x, std::size_t width) {
  if (width == 0 || width % 2 == 0) throw ConfigError("moving_rms: width must be odd");
  const std::size_t n = x.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];
  const std::size_t half = width / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    const double mean_sq = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    out[i] = std::sqrt(mean_sq < 0.0 ? 0.0 : mean_sq);
  }
  return out;
}

}  // namespace exokit
