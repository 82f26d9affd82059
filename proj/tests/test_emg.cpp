#include "exokit/emg.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "exokit/rng.hpp"

using namespace exokit;

namespace {

std::vector<double> sine(double freq, double amplitude, double rate, double duration) {
  const std::size_t n = static_cast<std::size_t>(duration * rate);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / rate);
  }
  return x;
}

double steady_max(const std::vector<double>& env) {
  double peak = 0.0;
  for (std::size_t i = env.size() / 2; i + env.size() / 8 < env.size(); ++i) {
    peak = std::max(peak, env[i]);
  }
  return peak;
}

// Triangular squat-like thigh trace: reps minima at multiples of `period`.
std::vector<double> triangle_trace(std::size_t reps, std::size_t period, double top_deg) {
  std::vector<double> x(reps * period + 1, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i <= period; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(period);
      const double v = (u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u)) * top_deg * M_PI / 180.0;
      x[r * period + i] = v;
    }
  }
  return x;
}

}  // namespace

TEST(Envelope, SinusoidInPassbandLandsAtRmsAmplitude) {
  const double amp = 2.0;
  const auto env = envelope(sine(50.0, amp, 2000.0, 3.0), 2000.0);
  EXPECT_NEAR(steady_max(env), amp / std::sqrt(2.0), 0.01 * amp / std::sqrt(2.0));
}

TEST(Envelope, OutOfBandSineIsRejected) {
  const auto pass = envelope(sine(50.0, 1.0, 2000.0, 3.0), 2000.0);
  const auto stop = envelope(sine(5.0, 1.0, 2000.0, 3.0), 2000.0);
  EXPECT_LT(steady_max(stop), steady_max(pass) * std::pow(10.0, -20.0 / 20.0));
}

TEST(Envelope, DcOffsetIsInvisible) {
  Rng rng(4);
  std::vector<double> x(4096);
  for (double& v : x) v = rng.gaussian(0.0, 0.5);
  std::vector<double> shifted(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + 3.7;
  const auto a = envelope(x, 1000.0);
  const auto b = envelope(shifted, 1000.0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(Envelope, DcInvarianceIsBitExactOnGridAlignedSignals) {
  // Signal on the 2^-20 grid with 2^12 samples: the mean and the shift are
  // both exact in double arithmetic, so demeaning cancels the offset bitwise.
  Rng rng(5);
  std::vector<double> x(4096);
  for (double& v : x) {
    v = static_cast<double>(static_cast<int>(rng.uniform(-1.0, 1.0) * 1048576.0)) / 1048576.0;
  }
  std::vector<double> shifted(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + 1.0;
  const auto a = envelope(x, 1000.0);
  const auto b = envelope(shifted, 1000.0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Envelope, ScaleEquivariance) {
  Rng rng(6);
  std::vector<double> x(2000);
  for (double& v : x) v = rng.gaussian();
  std::vector<double> scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 2.5 * x[i];
  const auto a = envelope(x, 1000.0);
  const auto b = envelope(scaled, 1000.0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 2.5 * a[i], 1e-9);
}

TEST(Envelope, RejectsLowSampleRates) {
  EXPECT_THROW(envelope(std::vector<double>(1000, 0.0), 390.0), ConfigError);
}

TEST(NormalizeMvc, BasicRatios) {
  const std::vector<double> mvc = {0.0, 0.5, 1.0, 0.25};
  EXPECT_DOUBLE_EQ(normalize_mvc({1.0}, mvc)[0], 100.0);
  EXPECT_DOUBLE_EQ(normalize_mvc({0.5}, mvc)[0], 50.0);
  // An MVC trial normalized by itself peaks at exactly 100.
  const auto self = normalize_mvc(mvc, mvc);
  EXPECT_DOUBLE_EQ(*std::max_element(self.begin(), self.end()), 100.0);
  EXPECT_THROW(normalize_mvc({1.0}, {0.0, 0.0}), InputError);
}

TEST(NormalizeMvc, CommonGainCancels) {
  Rng rng(21);
  std::vector<double> env(200), mvc(200);
  for (std::size_t i = 0; i < env.size(); ++i) {
    env[i] = std::abs(rng.gaussian(0.0, 0.3));
    mvc[i] = std::abs(rng.gaussian(0.0, 0.8)) + 0.1;
  }
  for (double c : {0.01, 3.0, 1e4}) {
    std::vector<double> env_c(env.size()), mvc_c(mvc.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
      env_c[i] = c * env[i];
      mvc_c[i] = c * mvc[i];
    }
    const auto a = normalize_mvc(env, mvc);
    const auto b = normalize_mvc(env_c, mvc_c);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(b[i], a[i], 1e-12 * std::max(1.0, a[i]));
    }
  }
}

TEST(NormalizeMvc, PercentileReferenceShrugsOffSpikes) {
  std::vector<double> mvc(100);
  for (std::size_t i = 0; i < mvc.size(); ++i) mvc[i] = 1.0;
  mvc[57] = 50.0;  // a single artifact spike
  EXPECT_DOUBLE_EQ(normalize_mvc({1.0}, mvc)[0], 2.0);          // max picks the spike
  EXPECT_DOUBLE_EQ(normalize_mvc({1.0}, mvc, 95.0)[0], 100.0);  // percentile ignores it
  EXPECT_THROW(normalize_mvc({1.0}, mvc, 0.0), ConfigError);
  EXPECT_THROW(normalize_mvc({1.0}, mvc, 101.0), ConfigError);
}

TEST(CropReps, TwentyTriangularRepsCropExactly) {
  const auto trace = triangle_trace(20, 200, 80.0);
  const auto reps = crop_reps(trace, 20);
  ASSERT_EQ(reps.size(), 20u);
  for (std::size_t r = 0; r < reps.size(); ++r) {
    EXPECT_EQ(reps[r].start, r * 200);
    EXPECT_EQ(reps[r].end, (r + 1) * 200);
  }
}

TEST(CropReps, FlatTraceIsADetectionError) {
  EXPECT_THROW(crop_reps(std::vector<double>(500, 0.1)), InputError);
}

TEST(CropReps, NoiseBarelyMovesTheBounds) {
  auto trace = triangle_trace(10, 400, 80.0);
  Rng rng(12);
  for (double& v : trace) v += rng.uniform(-0.5, 0.5) * M_PI / 180.0;
  const auto reps = crop_reps(trace, 10);
  ASSERT_EQ(reps.size(), 10u);
  for (std::size_t r = 0; r < reps.size(); ++r) {
    EXPECT_NEAR(static_cast<double>(reps[r].start), static_cast<double>(r * 400), 8.0);
    EXPECT_NEAR(static_cast<double>(reps[r].end), static_cast<double>((r + 1) * 400), 8.0);
  }
}

TEST(Summarize, ConstantTenPercentOverTwoSeconds) {
  const double rate = 100.0;
  std::vector<double> pct(401, 10.0);
  const std::vector<RepBounds> reps = {{0, 200}, {200, 400}};
  const ChannelSummary s = summarize(pct, reps, rate);
  ASSERT_EQ(s.effort.size(), 2u);
  EXPECT_NEAR(s.effort[0], 20.0, 1e-9);  // 10 %MVC * 2 s
  EXPECT_NEAR(s.peak[0], 10.0, 1e-12);
  EXPECT_NEAR(s.effort_mean, 20.0, 1e-9);
  EXPECT_NEAR(s.effort_sd, 0.0, 1e-12);
}

TEST(Summarize, ZeroSignalGivesZeroMetrics) {
  const ChannelSummary s = summarize(std::vector<double>(301, 0.0), {{0, 300}}, 100.0);
  EXPECT_EQ(s.effort[0], 0.0);
  EXPECT_EQ(s.peak[0], 0.0);
}

TEST(Summarize, EffortIsAdditiveUnderSplits) {
  Rng rng(33);
  std::vector<double> pct(1001);
  for (double& v : pct) v = std::abs(rng.gaussian(20.0, 5.0));
  const double whole = summarize(pct, {{0, 1000}}, 250.0).effort[0];
  for (std::size_t split : {1u, 137u, 500u, 999u}) {
    const ChannelSummary s = summarize(pct, {{0, split}, {split, 1000}}, 250.0);
    EXPECT_NEAR(s.effort[0] + s.effort[1], whole, 1e-9);
  }
}

TEST(Summarize, MeanSdFormatting) {
  EXPECT_EQ(format_mean_sd(33.2, 6.6), "33.2 (6.6)");
  EXPECT_EQ(format_mean_sd(9.05, 0.949), "9.1 (0.9)");
}

TEST(Summarize, TableOneStyleFixtureValues) {
  // Twenty per-rep efforts at 33.2 +- 6.6*sqrt(19/20): the sample mean is
  // 33.2 and the sample SD is exactly 6.6 up to rounding.
  const double rate = 100.0;
  const std::size_t period = 200;
  const double dev = 6.6 * std::sqrt(19.0 / 20.0);
  std::vector<double> pct(20 * period + 1, 0.0);
  std::vector<RepBounds> reps;
  for (std::size_t r = 0; r < 20; ++r) {
    const double target = 33.2 + ((r % 2 == 0) ? dev : -dev);  // effort in %MVC*s
    for (std::size_t i = 0; i <= period; ++i) {
      const double arch = std::sin(M_PI * static_cast<double>(i) / static_cast<double>(period));
      pct[r * period + i] = target * arch * arch;  // trapezoid of sin^2 = duration/2
    }
    reps.push_back({r * period, (r + 1) * period});
  }
  const ChannelSummary s = summarize(pct, reps, rate);
  EXPECT_NEAR(s.effort_mean, 33.2, 1e-9);
  EXPECT_NEAR(s.effort_sd, 6.6, 1e-9);
  EXPECT_EQ(format_mean_sd(s.effort_mean, s.effort_sd), "33.2 (6.6)");
}

TEST(Ensemble, IdenticalRepsAverageToThemselves) {
  std::vector<double> pct(601);
  for (std::size_t i = 0; i < pct.size(); ++i) {
    pct[i] = 5.0 + 3.0 * std::sin(2.0 * M_PI * static_cast<double>(i % 200) / 200.0);
  }
  const std::vector<RepBounds> reps = {{0, 200}, {200, 400}, {400, 600}};
  const auto mean = ensemble_mean_curve(pct, reps);
  const auto single = resample_rep(pct, reps[0]);
  ASSERT_EQ(mean.size(), 101u);
  for (std::size_t k = 0; k < 101; ++k) EXPECT_NEAR(mean[k], single[k], 1e-12);
}

TEST(Ensemble, CurveHitsTheSampledValuesAtTheGrid) {
  std::vector<double> pct(101);
  for (std::size_t i = 0; i < pct.size(); ++i) pct[i] = static_cast<double>(i);
  const auto curve = resample_rep(pct, {0, 100});
  for (std::size_t k = 0; k < 101; ++k) EXPECT_DOUBLE_EQ(curve[k], static_cast<double>(k));
}
