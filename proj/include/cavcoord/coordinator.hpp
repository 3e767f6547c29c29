#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "cavcoord/scenario.hpp"
#include "cavcoord/scheduler.hpp"
#include "cavcoord/trajectory.hpp"

namespace cavcoord {

struct ConflictSets {
  std::map<int, std::set<int>> sameLaneAhead;  // lane -> ids
  std::map<int, std::set<int>> lateral;        // zone -> ids
  std::set<int> noConflict;
};

struct EntryState {
  PathSpec path;
  double t0 = 0.0;
  double v0 = 0.0;
};

struct CommittedPlan {
  SchedulePlan plan;
  std::shared_ptr<const Trajectory> trajectory;
  double gammaBegin = 0.0;  // occupancy of the lane-changing zone
  double gammaEnd = 0.0;
};

struct VehicleRecord {
  int id = 0;
  EntryState entry;
  ConflictSets conflicts;
  std::optional<CommittedPlan> committed;
  bool active = true;
};

/// An entrant waiting for an index. `tieKey` is the seeded random draw used
/// after path length when entry times coincide.
struct PendingEntry {
  EntryState entry;
  std::uint64_t tieKey = 0;
};

/// Orders entrants by entry time, then shorter path, then tieKey.
void orderEntrants(std::vector<PendingEntry>& entrants);

/// Queue of vehicles inside the control zone plus the archive of committed
/// plans. Single writer; plans are consulted by later registrants.
class Coordinator {
 public:
  Coordinator(const Corridor& corridor, double laneChangeZoneLength);

  /// Assigns index N+1 and builds the conflict sets against every active
  /// vehicle. Earlier vehicles are classified by their committed final lane.
  int registerVehicle(const EntryState& entry);

  void commit(int id, SchedulePlan plan, std::shared_ptr<const Trajectory> trajectory);
  void deregister(int id);

  /// Deregisters every active vehicle whose plan ends at or before `t`.
  std::vector<int> deregisterExited(double t);

  const VehicleRecord& record(int id) const;
  bool isActive(int id) const;
  std::vector<int> activeIds() const;
  const std::map<int, VehicleRecord>& records() const { return records_; }
  int nextIndex() const { return static_cast<int>(records_.size()) + 1; }

  /// T_i^z: committed arrivals of the vehicles in B_i^z.
  std::vector<ZoneBooking> bookings(int id, int zone) const;

  /// Most recent committed vehicle in A_i^lane.
  std::optional<int> immediatePredecessor(int id, int lane) const;

  /// True if a same-approach vehicle occupies the lane-changing zone at t.
  bool laneChangeZoneOccupied(int id, double t) const;

  SchedulingContext schedulingContext(int id, double safeDistance) const;

 private:
  VehicleRecord& mutableRecord(int id);

  const Corridor* corridor_;
  double laneChangeZoneLength_;
  std::map<int, VehicleRecord> records_;
};

}  // namespace cavcoord
