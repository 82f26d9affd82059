#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "exokit/csv.hpp"
#include "exokit/errors.hpp"
#include "exokit/sysid.hpp"

namespace exokit {

/// Zero-speed grid points stay in the friction fit with their sign mapped to
/// zero by the rest deadband; the reports record that policy.
inline constexpr const char* kZeroVelocityPolicy = "deadband-included";

namespace detail {
inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}
}  // namespace detail

/// Flat key-value report. One `key = value` pair per line; numbers are
/// round-trip exact. Inertia keys appear only when the second-stage fit ran.
inline void write_fit_report_txt(const FitReport& report, const std::optional<InertiaFit>& inertia,
                                 const std::filesystem::path& path) {
  std::string s;
  auto kv = [&s](const char* key, const std::string& value) {
    s += key;
    s += " = ";
    s += value;
    s += '\n';
  };
  const ActuatorParams& p = report.params;
  kv("gear_ratio", format_double(p.gear_ratio));
  kv("k_tau", format_double(p.k_tau));
  kv("k_n", format_double(p.k_n));
  kv("f_coulomb", format_double(p.f_coulomb));
  kv("f_gear", format_double(p.f_gear));
  kv("bias", format_double(p.bias));
  kv("reflected_inertia", format_double(p.reflected_inertia));
  kv("k_t_nominal", format_double(p.k_t_nominal));
  kv("residual_rmse", format_double(report.residual_rmse));
  kv("residual_p95", format_double(report.residual_p95));
  kv("n_samples", std::to_string(report.n_samples));
  kv("sample_rate", format_double(report.sample_rate));
  kv("zero_velocity_policy", kZeroVelocityPolicy);
  for (const auto& w : report.warnings) kv("warning", w);
  if (inertia) {
    kv("inertia_reflected_inertia", format_double(inertia->reflected_inertia));
    kv("inertia_bias", format_double(inertia->bias));
    kv("inertia_rmse_before", format_double(inertia->rmse_before));
    kv("inertia_rmse_after", format_double(inertia->rmse_after));
    kv("inertia_n_samples", std::to_string(inertia->n_samples));
  }
  detail::write_text_file(path, s);
}

/// Machine-readable sidecar mirroring the text report.
inline void write_fit_report_json(const FitReport& report,
                                  const std::optional<InertiaFit>& inertia,
                                  const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  const ActuatorParams& p = report.params;
  j["params"] = {{"gear_ratio", p.gear_ratio},
                 {"k_tau", p.k_tau},
                 {"k_n", p.k_n},
                 {"f_coulomb", p.f_coulomb},
                 {"f_gear", p.f_gear},
                 {"bias", p.bias},
                 {"reflected_inertia", p.reflected_inertia},
                 {"k_t_nominal", p.k_t_nominal}};
  j["residual"] = {{"rmse", report.residual_rmse},
                   {"p95", report.residual_p95},
                   {"n_samples", report.n_samples},
                   {"sample_rate", report.sample_rate}};
  j["zero_velocity_policy"] = kZeroVelocityPolicy;
  j["warnings"] = report.warnings;
  if (inertia) {
    j["inertia"] = {{"reflected_inertia", inertia->reflected_inertia},
                    {"bias", inertia->bias},
                    {"rmse_before", inertia->rmse_before},
                    {"rmse_after", inertia->rmse_after},
                    {"n_samples", inertia->n_samples}};
  }
  detail::write_text_file(path, j.dump(2) + "\n");
}

/// Reads the params block back from a JSON fit report.
inline ActuatorParams read_fit_report_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  in >> j;
  const auto& q = j.at("params");
  ActuatorParams p;
  p.gear_ratio = q.at("gear_ratio").get<double>();
  p.k_tau = q.at("k_tau").get<double>();
  p.k_n = q.at("k_n").get<double>();
  p.f_coulomb = q.at("f_coulomb").get<double>();
  p.f_gear = q.at("f_gear").get<double>();
  p.bias = q.at("bias").get<double>();
  p.reflected_inertia = q.at("reflected_inertia").get<double>();
  p.k_t_nominal = q.at("k_t_nominal").get<double>();
  return p;
}

}  // namespace exokit
