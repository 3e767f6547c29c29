#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cavcoord {

/// Raised when a configuration or input violates a documented invariant.
/// The message names the violated invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Travel direction of a straight-through path. East/West run along the
/// corridor and cross every intersection; North/South cross exactly one.
enum class Approach { Eastbound, Westbound, Northbound, Southbound };

const char* approachName(Approach a);
bool isCorridorApproach(Approach a);

/// A straight movement through the corridor: direction plus, for the
/// crossing streets, the 0-based intersection it crosses.
struct Movement {
  Approach approach = Approach::Eastbound;
  int crossing = -1;  // -1 for corridor movements

  auto operator<=>(const Movement&) const = default;
};

struct MergingZoneSpec {
  int zoneId = 0;  // dense 1..n_z, numbered west to east
  double eastboundOffset = 0.0;
  double westboundOffset = 0.0;
  double crossingOffset = 0.0;  // for the north/south movements through it
  std::set<std::pair<Movement, Movement>> conflictingPathPairs;

  bool conflicts(const Movement& a, const Movement& b) const {
    return conflictingPathPairs.count({a, b}) > 0;
  }
};

struct CorridorConfig {
  double approachLength = 150.0;
  std::vector<double> intersectionSpacing{75.0, 75.0};
  double laneWidth = 3.75;
  std::optional<double> mergingZoneLength;  // defaults to 4 * laneWidth
  double laneChangeZoneLength = 30.0;
  int lanesPerRoad = 2;
};

/// Entry lane plus the ordered merging zones a vehicle crosses.
struct PathSpec {
  Movement movement;
  int entryLane = 1;
  std::vector<int> zonesOnPath;
  std::vector<double> zoneEntryOffsets;  // same order as zonesOnPath
  double pathLength = 0.0;               // exit of the last zone

  /// Spacing between the exit of zone k and the entry of zone k+1.
  double gapAfterZone(std::size_t k, double zoneLength) const {
    return zoneEntryOffsets.at(k + 1) - zoneEntryOffsets.at(k) - zoneLength;
  }
};

/// Immutable corridor geometry. Built once, shared read-only.
class Corridor {
 public:
  double approachLength() const { return approachLength_; }
  const std::vector<double>& intersectionSpacing() const { return spacing_; }
  double laneWidth() const { return laneWidth_; }
  double mergingZoneLength() const { return zoneLength_; }
  double laneChangeZoneLength() const { return laneChangeLength_; }
  int lanesPerRoad() const { return lanes_; }
  int zoneCount() const { return static_cast<int>(zones_.size()); }
  const std::vector<MergingZoneSpec>& mergingZones() const { return zones_; }
  const MergingZoneSpec& zone(int zoneId) const { return zones_.at(zoneId - 1); }

  /// Every straight movement the corridor supports, corridor directions first.
  std::vector<Movement> movements() const;

  /// Path for a movement entering on `lane` (1 = rightmost).
  PathSpec path(const Movement& movement, int lane) const;

  bool zoneConflict(int zoneId, const Movement& a, const Movement& b) const {
    return zone(zoneId).conflicts(a, b);
  }

 private:
  friend Corridor buildCorridor(const CorridorConfig& config);

  double approachLength_ = 0.0;
  std::vector<double> spacing_;
  double laneWidth_ = 0.0;
  double zoneLength_ = 0.0;
  double laneChangeLength_ = 0.0;
  int lanes_ = 2;
  std::vector<MergingZoneSpec> zones_;
};

/// Validates `config` and derives zone offsets and conflict pairs.
Corridor buildCorridor(const CorridorConfig& config);

/// Time to cross a zone of length `zoneLength` at average speed `vAvg`.
double zoneOccupancyDuration(double vAvg, double zoneLength);

struct VehicleLimits {
  double uMin = -5.0;
  double uMax = 3.0;
  double vMin = 2.0;
  double vMax = 18.0;
  double safeDistance = 6.0;   // delta
  double trackingError = 0.0;  // epsilon

  void validate() const;
};

}  // namespace cavcoord
