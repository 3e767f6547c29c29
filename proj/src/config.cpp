#include "cavcoord/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cavcoord {

using nlohmann::json;

void ScenarioConfig::validate() const {
  const Corridor c = buildCorridor(corridor);
  limits.validate();
  if (volumes.empty()) throw ValidationError("flows_veh_per_h must not be empty");
  for (double v : volumes) flow(v, seed).validate(limits);
  signal.validate(c.zoneCount());
  carFollowing.validate();
}

FlowSpec ScenarioConfig::flow(double volume, std::uint64_t s) const {
  FlowSpec f;
  f.volume = volume;
  f.speedMin = speedMin;
  f.speedMax = speedMax;
  f.seed = s;
  f.horizon = horizon;
  return f;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

void rejectUnknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ValidationError("unknown config key '" + k + "' in " + where);
  }
}

}  // namespace

ScenarioConfig parseScenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  rejectUnknown(j,
                {"name", "approach_length_m", "spacing_m", "lane_width_m", "merging_zone_m",
                 "lane_change_zone_m", "lanes_per_road", "u_min", "u_max", "v_min", "v_max",
                 "delta_m", "epsilon_m", "flows_veh_per_h", "entry_speed_m_s", "seed",
                 "horizon_s", "signal", "car_following"},
                "scenario");
  ScenarioConfig c;
  take(j, "name", c.name);
  take(j, "approach_length_m", c.corridor.approachLength);
  take(j, "spacing_m", c.corridor.intersectionSpacing);
  take(j, "lane_width_m", c.corridor.laneWidth);
  if (j.contains("merging_zone_m")) {
    double s = 0.0;
    take(j, "merging_zone_m", s);
    c.corridor.mergingZoneLength = s;
  }
  take(j, "lane_change_zone_m", c.corridor.laneChangeZoneLength);
  take(j, "lanes_per_road", c.corridor.lanesPerRoad);
  take(j, "u_min", c.limits.uMin);
  take(j, "u_max", c.limits.uMax);
  take(j, "v_min", c.limits.vMin);
  take(j, "v_max", c.limits.vMax);
  take(j, "delta_m", c.limits.safeDistance);
  take(j, "epsilon_m", c.limits.trackingError);
  if (j.contains("flows_veh_per_h") && j["flows_veh_per_h"].is_number()) {
    c.volumes = {j["flows_veh_per_h"].get<double>()};
  } else {
    take(j, "flows_veh_per_h", c.volumes);
  }
  if (j.contains("entry_speed_m_s")) {
    std::vector<double> r;
    take(j, "entry_speed_m_s", r);
    if (r.size() != 2) throw ValidationError("entry_speed_m_s must be [min, max]");
    c.speedMin = r[0];
    c.speedMax = r[1];
  }
  take(j, "seed", c.seed);
  take(j, "horizon_s", c.horizon);
  if (j.contains("signal")) {
    const json& s = j["signal"];
    rejectUnknown(s, {"cycle_s", "green_split", "all_red_s", "amber_s", "offsets_s"}, "signal");
    take(s, "cycle_s", c.signal.cycle);
    take(s, "green_split", c.signal.greenSplit);
    take(s, "all_red_s", c.signal.allRed);
    take(s, "amber_s", c.signal.amber);
    take(s, "offsets_s", c.signal.offsets);
  }
  if (j.contains("car_following")) {
    const json& f = j["car_following"];
    rejectUnknown(f,
                  {"use_entry_speed", "desired_speed_m_s", "max_accel", "comfort_decel",
                   "max_decel", "headway_s", "jam_gap_m", "exponent"},
                  "car_following");
    take(f, "use_entry_speed", c.carFollowing.useEntrySpeed);
    take(f, "desired_speed_m_s", c.carFollowing.desiredSpeed);
    take(f, "max_accel", c.carFollowing.maxAccel);
    take(f, "comfort_decel", c.carFollowing.comfortDecel);
    take(f, "max_decel", c.carFollowing.maxDecel);
    take(f, "headway_s", c.carFollowing.headway);
    take(f, "jam_gap_m", c.carFollowing.jamGap);
    take(f, "exponent", c.carFollowing.exponent);
  }
  c.validate();
  return c;
}

ScenarioConfig loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseScenario(ss.str());
}

std::string scenarioJson(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["approach_length_m"] = c.corridor.approachLength;
  j["spacing_m"] = c.corridor.intersectionSpacing;
  j["lane_width_m"] = c.corridor.laneWidth;
  j["merging_zone_m"] = c.corridor.mergingZoneLength.value_or(4.0 * c.corridor.laneWidth);
  j["lane_change_zone_m"] = c.corridor.laneChangeZoneLength;
  j["lanes_per_road"] = c.corridor.lanesPerRoad;
  j["u_min"] = c.limits.uMin;
  j["u_max"] = c.limits.uMax;
  j["v_min"] = c.limits.vMin;
  j["v_max"] = c.limits.vMax;
  j["delta_m"] = c.limits.safeDistance;
  j["epsilon_m"] = c.limits.trackingError;
  j["flows_veh_per_h"] = c.volumes;
  j["entry_speed_m_s"] = {c.speedMin, c.speedMax};
  j["seed"] = c.seed;
  j["horizon_s"] = c.horizon;
  j["signal"] = {{"cycle_s", c.signal.cycle},
                 {"green_split", c.signal.greenSplit},
                 {"all_red_s", c.signal.allRed},
                 {"amber_s", c.signal.amber},
                 {"offsets_s", c.signal.offsets}};
  j["car_following"] = {{"use_entry_speed", c.carFollowing.useEntrySpeed},
                        {"desired_speed_m_s", c.carFollowing.desiredSpeed},
                        {"max_accel", c.carFollowing.maxAccel},
                        {"comfort_decel", c.carFollowing.comfortDecel},
                        {"max_decel", c.carFollowing.maxDecel},
                        {"headway_s", c.carFollowing.headway},
                        {"jam_gap_m", c.carFollowing.jamGap},
                        {"exponent", c.carFollowing.exponent}};
  return j.dump(2);
}

std::string configHash(const ScenarioConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : scenarioJson(c)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScenarioConfig scenarioOne() {
  ScenarioConfig c;
  c.name = "scenario1";
  return c;
}

ScenarioConfig scenarioTwo() {
  ScenarioConfig c;
  c.name = "scenario2";
  c.corridor.intersectionSpacing = {30.0, 50.0};
  c.speedMin = 8.0;
  c.speedMax = 11.0;
  return c;
}

}  // namespace cavcoord
