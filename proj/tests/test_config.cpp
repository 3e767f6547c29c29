#include <gtest/gtest.h>

#include "cavcoord/config.hpp"

using namespace cavcoord;

namespace {

const std::string kDir = CAVCOORD_SOURCE_DIR;

}  // namespace

TEST(Config, ShippedFilesMatchPresets) {
  const ScenarioConfig a = loadScenario(kDir + "/scenarios/scenario1.json");
  const ScenarioConfig b = loadScenario(kDir + "/scenarios/scenario2.json");
  EXPECT_EQ(configHash(a), configHash(scenarioOne()));
  EXPECT_EQ(configHash(b), configHash(scenarioTwo()));
  EXPECT_EQ(b.corridor.intersectionSpacing, (std::vector<double>{30.0, 50.0}));
  EXPECT_DOUBLE_EQ(b.speedMin, 8.0);
  EXPECT_DOUBLE_EQ(b.speedMax, 11.0);
}

TEST(Config, MinimalDocumentUsesDefaults) {
  const ScenarioConfig c = parseScenario("{}");
  EXPECT_DOUBLE_EQ(c.corridor.approachLength, 150.0);
  EXPECT_EQ(c.volumes.size(), 5u);
  EXPECT_DOUBLE_EQ(c.horizon, 18.0);
}

TEST(Config, ScalarFlowBecomesList) {
  const ScenarioConfig c = parseScenario(R"({"flows_veh_per_h": 900})");
  EXPECT_EQ(c.volumes, (std::vector<double>{900.0}));
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(parseScenario(R"({"approach_length": 150})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"signal": {"cycle": 60}})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"car_following": {"a": 1}})"), ValidationError);
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(parseScenario("{"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"u_min": 1})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"entry_speed_m_s": [12, 11]})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"entry_speed_m_s": [1, 11]})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"spacing_m": [75, 5]})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"flows_veh_per_h": [600, -1]})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"seed": "one"})"), ValidationError);
  EXPECT_THROW(parseScenario(R"({"signal": {"offsets_s": [0, 0]}})"), ValidationError);
  EXPECT_THROW(loadScenario(kDir + "/no/such/file.json"), ValidationError);
}

TEST(Config, ValidationNamesTheField) {
  try {
    parseScenario(R"({"delta_m": 0})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("safe"), std::string::npos) << e.what();
  }
}

TEST(Config, CanonicalJsonRoundTrips) {
  const ScenarioConfig a = scenarioTwo();
  const ScenarioConfig b = parseScenario(scenarioJson(a));
  EXPECT_EQ(scenarioJson(a), scenarioJson(b));
  EXPECT_EQ(configHash(a), configHash(b));
  EXPECT_EQ(configHash(a).size(), 16u);
}

TEST(Config, HashTracksContent) {
  ScenarioConfig a = scenarioOne();
  const std::string h = configHash(a);
  a.seed = 2;
  EXPECT_NE(configHash(a), h);
  EXPECT_NE(configHash(scenarioOne()), configHash(scenarioTwo()));
}

TEST(Config, FlowCarriesScenario) {
  const ScenarioConfig c = scenarioTwo();
  const FlowSpec f = c.flow(1000.0, 7);
  EXPECT_DOUBLE_EQ(f.volume, 1000.0);
  EXPECT_EQ(f.seed, 7u);
  EXPECT_DOUBLE_EQ(f.speedMin, 8.0);
  EXPECT_DOUBLE_EQ(f.horizon, c.horizon);
}
