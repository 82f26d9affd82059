#include "exokit/bench_sim.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "exokit/sysid.hpp"

using namespace exokit;

namespace {

SineBackdriveSpec walking_spec(double freq) {
  SineBackdriveSpec spec;
  spec.freq = freq;
  spec.amplitude = deg2rad(35.0);  // 70 deg peak-to-peak
  spec.duration = 10.0;
  spec.sample_rate = 1000.0;
  return spec;
}

double peak_abs(const std::vector<double>& v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  return peak;
}

ExoConfig paper_condition_exo() {
  ExoConfig cfg;
  cfg.layout = Layout::kHipKnee;
  cfg.mass = 82.0;
  cfg.alpha = 0.2;
  return cfg;
}

SquatSpec two_rep_squat() {
  SquatSpec spec;
  spec.reps = 2;
  return spec;
}

}  // namespace

TEST(SimulateBackdrive, PeaksMatchTheInertiaPlusCoulombEnvelope) {
  const ActuatorParams p = ActuatorParams::identified();
  const TrialLog one = simulate_backdrive(walking_spec(1.0), p);
  const TrialLog two = simulate_backdrive(walking_spec(2.0), p);
  const double peak1 = peak_abs(one.tau_meas);
  const double peak2 = peak_abs(two.tau_meas);
  EXPECT_NEAR(peak1, 0.592, 3e-3);  // J*A*w^2 + f_C just inside the extreme
  EXPECT_LT(peak1, 2.0);
  EXPECT_LT(peak2, 2.0);
  EXPECT_GT(peak2, peak1);
  EXPECT_NO_THROW(one.validate());
}

TEST(SimulateBackdrive, VanishingAmplitudeLeavesOnlyTheBias) {
  ActuatorParams p = ActuatorParams::identified();
  p.bias = 0.21;
  SineBackdriveSpec spec = walking_spec(1.0);
  spec.amplitude = 1e-9;
  const TrialLog log = simulate_backdrive(spec, p);
  for (double tau : log.tau_meas) EXPECT_NEAR(tau, 0.21, 1e-6);
}

TEST(SimulateBackdrive, DeterministicUnderSeed) {
  const ActuatorParams p = ActuatorParams::identified();
  const TrialLog a = simulate_backdrive(walking_spec(1.0), p, 0.1, 1234);
  const TrialLog b = simulate_backdrive(walking_spec(1.0), p, 0.1, 1234);
  const TrialLog c = simulate_backdrive(walking_spec(1.0), p, 0.1, 1235);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.tau_meas[i], b.tau_meas[i]);
    differs = differs || a.tau_meas[i] != c.tau_meas[i];
  }
  EXPECT_TRUE(differs);
}

TEST(SimulateGrid, SinglePointAtRestIsFlatBias) {
  ActuatorParams p = ActuatorParams::identified();
  p.bias = 0.33;
  const GridResult r = simulate_grid(p, {0.0}, {0.0}, 0.5, 500.0);
  EXPECT_TRUE(r.skipped.empty());
  for (double tau : r.log.tau_meas) EXPECT_EQ(tau, 0.33);
  for (double i : r.log.i_q) EXPECT_EQ(i, 0.0);
}

TEST(SimulateGrid, DefaultListsAreFullyAchievable) {
  const ActuatorParams p = ActuatorParams::identified();
  const GridResult r = simulate_grid(p, default_grid_speeds_deg_s(), default_grid_torques_nm(),
                                     0.2, 500.0);
  EXPECT_TRUE(r.skipped.empty());
  // 13 signed speeds x 11 signed torques.
  EXPECT_EQ(r.log.size(), 143u * 100u);
  EXPECT_NO_THROW(r.log.validate());
}

TEST(SimulateGrid, UnreachableTorqueLandsInTheSkipList) {
  const ActuatorParams p = ActuatorParams::identified();
  const GridResult r = simulate_grid(p, {0.0, 10.0}, {0.0, 40.0}, 0.2, 500.0);
  EXPECT_FALSE(r.skipped.empty());
  for (const auto& s : r.skipped) EXPECT_EQ(std::abs(s.torque_nm), 40.0);
  EXPECT_NO_THROW(r.log.validate());
}

TEST(SimulateGrid, ClosesTheLoopWithTheFit) {
  ActuatorParams gen = ActuatorParams::identified();
  gen.bias = 0.02;
  gen.reflected_inertia = 0.0;
  const GridResult r = simulate_grid(gen, default_grid_speeds_deg_s(),
                                     default_grid_torques_nm(), 0.5, 500.0);
  const FitReport fit = fit_torque_model(r.log, gen.gear_ratio);
  EXPECT_NEAR(fit.params.k_tau, gen.k_tau, 1e-6 * gen.k_tau);
  EXPECT_NEAR(fit.params.k_n, gen.k_n, 1e-6 * gen.k_n);
  EXPECT_NEAR(fit.params.f_coulomb, gen.f_coulomb, 1e-6 * gen.f_coulomb);
  EXPECT_NEAR(fit.params.f_gear, gen.f_gear, 1e-6 * gen.f_gear);
  EXPECT_NEAR(fit.params.bias, gen.bias, 1e-6);
}

TEST(SimulateStep, SettlesAtTargetWithTheInverseCurrent) {
  ActuatorParams p = ActuatorParams::identified();
  p.bias = 0.0;
  const TrialLog log = simulate_step(p, 25.0, 4.0, 500.0);
  EXPECT_EQ(log.tau_meas.front(), 0.0);
  EXPECT_NEAR(log.tau_meas.back(), 25.0, 1e-9);
  EXPECT_NEAR(log.i_q.back(), 22.78, 0.01);

  const TrialLog thirty = simulate_step(p, 30.0, 4.0, 500.0);
  EXPECT_NEAR(thirty.tau_meas.back(), 30.0, 1e-9);
}

TEST(SimulateStep, ZeroCommandIsFlatAtTheSensorBias) {
  ActuatorParams p = ActuatorParams::identified();
  p.bias = 0.4;
  const TrialLog log = simulate_step(p, 0.0, 2.0, 500.0);
  for (double tau : log.tau_meas) EXPECT_NEAR(tau, 0.4, 1e-12);
  for (double i : log.i_q) EXPECT_NEAR(i, 0.0, 1e-12);
}

TEST(SimulateSquat, ZeroAlphaLeavesHumanTorquesBitForBit) {
  ExoConfig cfg = paper_condition_exo();
  cfg.alpha = 0.0;
  const SquatResult r = simulate_squat(two_rep_squat(), cfg);
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    EXPECT_EQ(r.tau_k_exo[i], 0.0);
    EXPECT_EQ(r.tau_h_exo[i], 0.0);
    EXPECT_EQ(r.tau_k_human[i], r.tau_k_human_bare[i]);
    EXPECT_EQ(r.tau_h_human[i], r.tau_h_human_bare[i]);
  }
}

TEST(SimulateSquat, PaperConditionPeaks) {
  const SquatResult r = simulate_squat(two_rep_squat(), paper_condition_exo());
  double peak_k = 0.0, peak_h = 0.0;
  for (const auto& row : r.reps) {
    peak_k = std::max(peak_k, row.peak_tau_k_exo);
    peak_h = std::max(peak_h, row.peak_tau_h_exo);
  }
  EXPECT_EQ(peak_k, 25.0);  // rides the extension clamp
  EXPECT_LE(peak_h, 15.0);
  EXPECT_GT(peak_h, 1.0);
}

TEST(SimulateSquat, DoublingAlphaDoublesExoTorquesBelowSaturation) {
  ExoConfig small = paper_condition_exo();
  small.alpha = 0.005;
  ExoConfig bigger = paper_condition_exo();
  bigger.alpha = 0.01;
  const SquatSpec spec = two_rep_squat();
  const SquatResult a = simulate_squat(spec, small);
  const SquatResult b = simulate_squat(spec, bigger);
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    EXPECT_NEAR(b.tau_k_exo[i], 2.0 * a.tau_k_exo[i], 1e-9);
    EXPECT_NEAR(b.tau_h_exo[i], 2.0 * a.tau_h_exo[i], 1e-9);
  }
}

TEST(SimulateSquat, AlternatesLiftAndLowerWithPayloadContinuity) {
  const SquatResult r = simulate_squat(two_rep_squat(), paper_condition_exo());
  ASSERT_EQ(r.reps.size(), 2u);
  EXPECT_EQ(r.reps[0].phase, "lift");
  EXPECT_EQ(r.reps[1].phase, "lower");
  const std::size_t per_rep = r.t.size() / 2;
  EXPECT_EQ(r.payload_kg.front(), 0.0);                 // lift rep descends empty
  EXPECT_EQ(r.payload_kg[per_rep - 1], 12.5);           // carries through the rest
  EXPECT_EQ(r.payload_kg[per_rep], 12.5);               // lower rep starts loaded
  EXPECT_EQ(r.payload_kg.back(), 0.0);                  // released at the bottom
}

// The plant's extension demands are conjugate to the chain coordinates
// (theta_t, theta_h): the potential-energy change equals minus the integral
// of tau_k*theta_t_dot + tau_h*theta_h_dot. Over a lift+lower pair the net
// gravitational work is zero; a single lift rep banks exactly the per-leg
// share of the payload's potential-energy change.
TEST(SimulateSquat, GravitationalWorkClosesOverARepPair) {
  const SquatSpec spec = two_rep_squat();
  const ExoConfig cfg = paper_condition_exo();
  const SquatResult r = simulate_squat(spec, cfg);
  const double beat = 60.0 / spec.cadence;
  const double rep_period = (2.0 + spec.rest_beats) * beat;

  // Analytic joint rates from the same minimum-jerk schedule.
  auto depth_rate = [&](double t_local) {
    if (t_local < beat) return min_jerk_rate(t_local / beat) / beat;
    if (t_local < 2.0 * beat) return -min_jerk_rate((t_local - beat) / beat) / beat;
    return 0.0;
  };

  std::vector<double> power(r.t.size());
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    const double t_local = std::fmod(r.t[i], rep_period);
    const double dd = depth_rate(t_local);
    const double theta_t_dot = spec.theta_t_max * dd;
    const double theta_h_dot = spec.theta_h_max * dd;
    power[i] = r.tau_k_human_bare[i] * theta_t_dot + r.tau_h_human_bare[i] * theta_h_dot;
  }
  const double dt = 1.0 / spec.sample_rate;
  // Gravitational work done on the plant masses: W = -integral of the
  // extension-positive demands against the flexion-positive rates.
  auto work = [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i + 1 < hi; ++i) acc += 0.5 * (power[i] + power[i + 1]) * dt;
    return -acc;
  };

  const std::size_t per_rep = r.t.size() / 2;
  const double w_pair = work(0, r.t.size());
  EXPECT_NEAR(w_pair, 0.0, 1e-3);

  // Per-leg payload potential-energy change from squat depth to standing.
  const double h_squat = cfg.l_t * std::cos(spec.theta_t_max) +
                         r.plant.payload_lever *
                             std::cos(spec.theta_h_max - spec.theta_t_max);
  const double h_stand = cfg.l_t + r.plant.payload_lever;
  const double expected_lift = 0.5 * spec.payload * cfg.g * (h_stand - h_squat);
  const double w_lift = work(0, per_rep);
  EXPECT_NEAR(w_lift, expected_lift, 1e-3);
}

TEST(SquatCsv, ResultsSchemaIsStable) {
  const SquatResult r = simulate_squat(two_rep_squat(), paper_condition_exo());
  const auto path = std::filesystem::temp_directory_path() / "exokit_squat_results.csv";
  write_squat_results_csv(r, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header,
            "rep,phase,peak_tau_k_exo,peak_tau_h_exo,human_knee_integral,human_hip_integral");
  std::string row;
  std::getline(in, row);
  EXPECT_EQ(row.rfind("1,lift,", 0), 0u);
}
