#include <gtest/gtest.h>

#include <fstream>

#include "cavcoord/metrics.hpp"
#include "cavcoord/ocp.hpp"

using namespace cavcoord;

TEST(Delay, Examples) {
  EXPECT_DOUBLE_EQ(timeDelay(0.0, 26.4, 0.0, 330.0, 12.5), 0.0);
  EXPECT_NEAR(timeDelay(0.0, 30.0, 0.0, 330.0, 12.5), 3.6, 1e-12);
  EXPECT_THROW(timeDelay(0.0, 30.0, 0.0, 330.0, 0.0), ValidationError);
}

TEST(Delay, CruiseTrajectory) {
  BoundaryData b;
  b.v0 = 12.5;
  b.interiorPoints = {{12.0, 150.0}};
  b.tf = 13.2;
  b.pf = 165.0;
  EXPECT_NEAR(timeDelay(solveUnconstrained(b).trajectory), 0.0, 1e-12);
}

TEST(Fuel, ModelStructure) {
  const FuelModelCoefficients c = defaultFuelModel();
  EXPECT_GE(fuelRate(c, 0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(fuelRate(c, 0.0, 0.0), c.cruise[0]);
  EXPECT_DOUBLE_EQ(fuelRate(c, 12.0, -1.0), fuelRate(c, 12.0, 0.0));
  EXPECT_GT(fuelRate(c, 12.0, 1.0), fuelRate(c, 12.0, 0.0));
  FuelModelCoefficients neg = c;
  neg.cruise = {-5.0, 0.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(fuelRate(neg, 3.0, 0.0), 0.0);
}

TEST(Fuel, IntegralMonotone) {
  const FuelModelCoefficients c = defaultFuelModel();
  std::vector<double> t, v, u;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(0.1 * k);
    v.push_back(10.0 + 0.02 * k);
    u.push_back(k < 50 ? 0.2 : -0.4);
  }
  double prev = 0.0;
  for (std::size_t n = 2; n <= t.size(); ++n) {
    const std::vector<double> tt(t.begin(), t.begin() + n), vv(v.begin(), v.begin() + n),
        uu(u.begin(), u.begin() + n);
    const double f = integrateFuel(c, tt, vv, uu);
    EXPECT_GE(f, prev);
    prev = f;
  }
  // constant rate integrates exactly
  EXPECT_NEAR(integrateFuel(c, {0.0, 2.0}, {0.0, 0.0}, {0.0, 0.0}), 2.0 * c.cruise[0], 1e-15);
  EXPECT_THROW(integrateFuel(c, {0.0}, {}, {}), std::invalid_argument);
}

TEST(Fuel, LoadFromFile) {
  const FuelModelCoefficients c =
      loadFuelModel(std::string(CAVCOORD_SOURCE_DIR) + "/data/fuel_coefficients.json");
  EXPECT_EQ(c.cruise, defaultFuelModel().cruise);
  EXPECT_EQ(c.accel, defaultFuelModel().accel);
  const std::string bad = testing::TempDir() + "/bad_fuel.json";
  std::ofstream(bad) << R"({"cruise": [1, 2], "accel": [1, 2, 3]})";
  EXPECT_THROW(loadFuelModel(bad), ValidationError);
}

TEST(Improvement, RoundedPercent) {
  EXPECT_EQ(improvementPercent(25.51, 19.41), 24);
  EXPECT_EQ(improvementPercent(37.72, 24.53), 35);
  EXPECT_EQ(improvementPercent(10.0, 10.0), 0);
  EXPECT_EQ(improvementPercent(10.0, 12.0), -20);
  EXPECT_THROW(improvementPercent(0.0, 1.0), std::invalid_argument);
}

namespace {

RunSummary summaryOf(const std::string& mode, double volume, std::uint64_t seed, double travel,
                     double fuel) {
  RunSummary s;
  s.mode = mode;
  s.scenario = "s";
  s.volume = volume;
  s.seed = seed;
  s.vehicles = 10;
  s.travelTime = travel;
  s.delay = travel - 20.0;
  s.fuel = fuel;
  s.latencyMeanMs = 0.1 * static_cast<double>(seed);
  return s;
}

}  // namespace

TEST(Aggregate, IdenticalRunsGiveSameMean) {
  std::vector<RunSummary> runs;
  for (int i = 0; i < 5; ++i) runs.push_back(summaryOf("optimal", 600.0, 1, 21.0, 8.0));
  const auto rows = aggregate(runs);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].optTravel, 21.0);
  EXPECT_DOUBLE_EQ(rows[0].optFuel, 8.0);
  EXPECT_EQ(rows[0].seeds, 5);
}

TEST(Aggregate, ComparesModesPerVolume) {
  std::vector<RunSummary> runs{
      summaryOf("optimal", 600.0, 1, 19.41, 4.0), summaryOf("baseline", 600.0, 1, 25.51, 8.0),
      summaryOf("optimal", 800.0, 1, 20.0, 4.0), summaryOf("baseline", 800.0, 1, 30.0, 10.0)};
  const auto rows = aggregate(runs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].travelPct, 24);
  EXPECT_EQ(rows[0].fuelPct, 50);
  EXPECT_EQ(rows[1].fuelPct, 60);
  runs.back().scenario = "other";
  EXPECT_THROW(aggregate(runs), ValidationError);
  EXPECT_THROW(aggregate({}), std::invalid_argument);
}

TEST(Aggregate, LatencyTakesWorstSeed) {
  std::vector<RunSummary> runs;
  for (std::uint64_t s = 1; s <= 3; ++s) runs.push_back(summaryOf("optimal", 600.0, s, 20, 1));
  runs.push_back(summaryOf("baseline", 600.0, 9, 20, 1));
  const auto rows = latencyTable(runs);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].seed, 3u);
  EXPECT_DOUBLE_EQ(rows[0].meanMs, 0.1 * 3);
}

TEST(Summarize, Means) {
  RunArtifacts run;
  run.mode = "optimal";
  run.scenario = "s";
  VehicleResult a, b;
  a.travelTime = 20.0;
  a.delay = 0.0;
  a.fuel = 4.0;
  a.minSpeed = 11.0;
  b.travelTime = 30.0;
  b.delay = 2.0;
  b.fuel = 6.0;
  b.minSpeed = 9.0;
  run.vehicles = {a, b};
  const RunSummary s = summarize(run);
  EXPECT_EQ(s.vehicles, 2);
  EXPECT_DOUBLE_EQ(s.travelTime, 25.0);
  EXPECT_DOUBLE_EQ(s.delay, 1.0);
  EXPECT_DOUBLE_EQ(s.fuel, 5.0);
  EXPECT_DOUBLE_EQ(s.minSpeed, 9.0);
  EXPECT_DOUBLE_EQ(s.fuelRate, 0.5 * (4.0 / 20.0 + 6.0 / 30.0));
}
