#include "cavcoord/scenario.hpp"

#include <cmath>

namespace cavcoord {

const char* approachName(Approach a) {
  switch (a) {
    case Approach::Eastbound: return "EB";
    case Approach::Westbound: return "WB";
    case Approach::Northbound: return "NB";
    case Approach::Southbound: return "SB";
  }
  return "?";
}

bool isCorridorApproach(Approach a) {
  return a == Approach::Eastbound || a == Approach::Westbound;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

Corridor buildCorridor(const CorridorConfig& config) {
  require(config.approachLength > 0.0, "approach length L must be > 0");
  require(config.laneWidth > 0.0, "lane width w must be > 0");
  require(config.lanesPerRoad >= 1, "lanes per road must be >= 1");
  const double zoneLength = config.mergingZoneLength.value_or(4.0 * config.laneWidth);
  require(zoneLength > 0.0, "merging zone length S must be > 0");
  require(config.laneChangeZoneLength > 0.0, "lane-changing zone length L_c must be > 0");
  require(config.laneChangeZoneLength < config.approachLength,
          "lane-changing zone length L_c must be < L");
  for (double d : config.intersectionSpacing) {
    require(std::isfinite(d) && d > zoneLength, "intersection spacing D must be > S");
  }

  Corridor c;
  c.approachLength_ = config.approachLength;
  c.spacing_ = config.intersectionSpacing;
  c.laneWidth_ = config.laneWidth;
  c.zoneLength_ = zoneLength;
  c.laneChangeLength_ = config.laneChangeZoneLength;
  c.lanes_ = config.lanesPerRoad;

  const int nz = static_cast<int>(config.intersectionSpacing.size()) + 1;
  const double L = config.approachLength;
  const double S = zoneLength;
  for (int k = 0; k < nz; ++k) {
    MergingZoneSpec z;
    z.zoneId = k + 1;
    double east = L;
    for (int m = 0; m < k; ++m) east += S + config.intersectionSpacing[m];
    double west = L;
    for (int m = k; m < nz - 1; ++m) west += S + config.intersectionSpacing[m];
    z.eastboundOffset = east;
    z.westboundOffset = west;
    z.crossingOffset = L;

    // Corridor and crossing movements cut through the whole zone; parallel
    // movements (same axis, either direction) never do.
    const Movement corridor[] = {{Approach::Eastbound, -1}, {Approach::Westbound, -1}};
    const Movement crossing[] = {{Approach::Northbound, k}, {Approach::Southbound, k}};
    for (const auto& a : corridor) {
      for (const auto& b : crossing) {
        z.conflictingPathPairs.insert({a, b});
        z.conflictingPathPairs.insert({b, a});
      }
    }
    c.zones_.push_back(std::move(z));
  }
  return c;
}

std::vector<Movement> Corridor::movements() const {
  std::vector<Movement> out{{Approach::Eastbound, -1}, {Approach::Westbound, -1}};
  for (int k = 0; k < zoneCount(); ++k) {
    out.push_back({Approach::Northbound, k});
    out.push_back({Approach::Southbound, k});
  }
  return out;
}

PathSpec Corridor::path(const Movement& movement, int lane) const {
  if (lane < 1 || lane > lanes_) {
    throw ValidationError("entry lane must be in 1..n_l");
  }
  PathSpec p;
  p.movement = movement;
  p.entryLane = lane;
  switch (movement.approach) {
    case Approach::Eastbound:
      if (movement.crossing != -1) throw ValidationError("corridor movement has no crossing index");
      for (const auto& z : zones_) {
        p.zonesOnPath.push_back(z.zoneId);
        p.zoneEntryOffsets.push_back(z.eastboundOffset);
      }
      break;
    case Approach::Westbound:
      if (movement.crossing != -1) throw ValidationError("corridor movement has no crossing index");
      for (auto it = zones_.rbegin(); it != zones_.rend(); ++it) {
        p.zonesOnPath.push_back(it->zoneId);
        p.zoneEntryOffsets.push_back(it->westboundOffset);
      }
      break;
    case Approach::Northbound:
    case Approach::Southbound:
      if (movement.crossing < 0 || movement.crossing >= zoneCount()) {
        throw ValidationError("crossing movement must name an existing intersection");
      }
      p.zonesOnPath.push_back(movement.crossing + 1);
      p.zoneEntryOffsets.push_back(zones_[movement.crossing].crossingOffset);
      break;
  }
  p.pathLength = p.zoneEntryOffsets.back() + zoneLength_;
  return p;
}

double zoneOccupancyDuration(double vAvg, double zoneLength) {
  if (!(vAvg > 0.0)) throw ValidationError("average zone speed must be > 0");
  if (!(zoneLength > 0.0)) throw ValidationError("zone length must be > 0");
  return zoneLength / vAvg;
}

void VehicleLimits::validate() const {
  require(uMin < 0.0 && uMax > 0.0, "control bounds must satisfy uMin < 0 < uMax");
  require(vMin >= 0.0 && vMin < vMax, "speed bounds must satisfy 0 <= vMin < vMax");
  require(safeDistance > 0.0, "safe distance delta must be > 0");
  require(trackingError >= 0.0, "tracking error epsilon must be >= 0");
}

}  // namespace cavcoord
