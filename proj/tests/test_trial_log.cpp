#include "exokit/trial_log.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "exokit/rng.hpp"

using namespace exokit;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "exokit_trial_log_test";
  fs::create_directories(dir);
  return dir / name;
}

TrialLog random_log(std::size_t n, double rate, std::uint64_t seed) {
  Rng rng(seed);
  TrialLog log;
  log.sample_rate = rate;
  for (std::size_t i = 0; i < n; ++i) {
    log.push(static_cast<double>(i) / rate, rng.gaussian(0, 10), rng.gaussian(0, 2),
             rng.gaussian(0, 5), rng.gaussian(0, 20));
  }
  return log;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace

TEST(TrialCsv, RoundTripIsExact) {
  const TrialLog log = random_log(500, 500.0, 3);
  const fs::path p = temp_file("roundtrip.csv");
  write_trial_csv(log, p);
  const TrialLog back = read_trial_csv(p);
  ASSERT_EQ(back.size(), log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(back.t[i], log.t[i]);
    EXPECT_EQ(back.i_q[i], log.i_q[i]);
    EXPECT_EQ(back.theta[i], log.theta[i]);
    EXPECT_EQ(back.omega[i], log.omega[i]);
    EXPECT_EQ(back.tau_meas[i], log.tau_meas[i]);
  }
}

TEST(TrialCsv, RejectsWrongHeader) {
  const fs::path p = temp_file("bad_header.csv");
  write_text(p, "time,current,pos,vel,torque\n0,0,0,0,0\n0.002,0,0,0,0\n");
  EXPECT_THROW(read_trial_csv(p), InputError);
}

TEST(TrialCsv, NamesLineNumberOnParseError) {
  const fs::path p = temp_file("bad_cell.csv");
  write_text(p, "t,i_q,theta,omega,tau_meas\n0,0,0,0,0\n0.002,zap,0,0,0\n");
  try {
    read_trial_csv(p);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(TrialCsv, RejectsEmptyAndSingleRow) {
  const fs::path p = temp_file("one_row.csv");
  write_text(p, "t,i_q,theta,omega,tau_meas\n0,0,0,0,0\n");
  EXPECT_THROW(read_trial_csv(p), InputError);
  write_text(p, "");
  EXPECT_THROW(read_trial_csv(p), InputError);
}

TEST(TrialLogValidate, CatchesNonUniformStep) {
  TrialLog log;
  log.sample_rate = 100.0;
  log.push(0.0, 0, 0, 0, 0);
  log.push(0.01, 0, 0, 0, 0);
  log.push(0.03, 0, 0, 0, 0);  // skipped a sample
  EXPECT_THROW(log.validate(), InputError);
}

TEST(TrialLogValidate, CatchesRaggedColumns) {
  TrialLog log;
  log.sample_rate = 100.0;
  log.push(0.0, 0, 0, 0, 0);
  log.push(0.01, 0, 0, 0, 0);
  log.i_q.push_back(1.0);
  EXPECT_THROW(log.validate(), InputError);
}

TEST(ConcatTrials, ContinuesTheClock) {
  const TrialLog a = random_log(100, 250.0, 1);
  const TrialLog b = random_log(50, 250.0, 2);
  const TrialLog joined = concat_trials(a, b);
  ASSERT_EQ(joined.size(), 150u);
  EXPECT_NO_THROW(joined.validate());
  EXPECT_DOUBLE_EQ(joined.t[100], a.t.back() + 1.0 / 250.0);
  EXPECT_EQ(joined.tau_meas[120], b.tau_meas[20]);
}
