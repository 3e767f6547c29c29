#include "cavcoord/coordinator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cavcoord {

void orderEntrants(std::vector<PendingEntry>& entrants) {
  std::stable_sort(entrants.begin(), entrants.end(),
                   [](const PendingEntry& a, const PendingEntry& b) {
                     if (a.entry.t0 != b.entry.t0) return a.entry.t0 < b.entry.t0;
                     if (a.entry.path.pathLength != b.entry.path.pathLength) {
                       return a.entry.path.pathLength < b.entry.path.pathLength;
                     }
                     return a.tieKey < b.tieKey;
                   });
}

Coordinator::Coordinator(const Corridor& corridor, double laneChangeZoneLength)
    : corridor_(&corridor), laneChangeZoneLength_(laneChangeZoneLength) {
  if (!(laneChangeZoneLength > 0.0)) {
    throw ValidationError("lane-changing zone length must be > 0");
  }
}

int Coordinator::registerVehicle(const EntryState& entry) {
  if (entry.path.zonesOnPath.empty()) throw ValidationError("path crosses no merging zone");
  VehicleRecord rec;
  rec.id = nextIndex();
  rec.entry = entry;
  const Movement& mi = entry.path.movement;

  for (const auto& [jid, other] : records_) {
    if (!other.active) continue;
    const Movement& mj = other.entry.path.movement;
    if (mi == mj) {
      const int lane = other.committed ? other.committed->plan.lane : other.entry.path.entryLane;
      rec.conflicts.sameLaneAhead[lane].insert(jid);
      continue;
    }
    bool lateral = false;
    for (int z : entry.path.zonesOnPath) {
      const auto& zj = other.entry.path.zonesOnPath;
      if (std::find(zj.begin(), zj.end(), z) == zj.end()) continue;
      if (corridor_->zoneConflict(z, mi, mj)) {
        rec.conflicts.lateral[z].insert(jid);
        lateral = true;
      }
    }
    if (!lateral) rec.conflicts.noConflict.insert(jid);
  }
  const int id = rec.id;
  records_.emplace(id, std::move(rec));
  return id;
}

VehicleRecord& Coordinator::mutableRecord(int id) {
  const auto it = records_.find(id);
  if (it == records_.end()) throw std::out_of_range("unknown vehicle id " + std::to_string(id));
  return it->second;
}

const VehicleRecord& Coordinator::record(int id) const {
  const auto it = records_.find(id);
  if (it == records_.end()) throw std::out_of_range("unknown vehicle id " + std::to_string(id));
  return it->second;
}

void Coordinator::commit(int id, SchedulePlan plan, std::shared_ptr<const Trajectory> trajectory) {
  VehicleRecord& rec = mutableRecord(id);
  if (rec.committed) throw std::logic_error("vehicle " + std::to_string(id) + " already committed");
  if (!trajectory || trajectory->empty()) throw std::invalid_argument("commit needs a trajectory");
  CommittedPlan c;
  c.gammaBegin = trajectory->t0();
  c.gammaEnd = trajectory->timeAtPosition(laneChangeZoneLength_);
  c.plan = std::move(plan);
  c.trajectory = std::move(trajectory);
  rec.committed = std::move(c);
}

void Coordinator::deregister(int id) {
  VehicleRecord& rec = mutableRecord(id);
  if (!rec.active) throw std::logic_error("vehicle " + std::to_string(id) + " already left");
  rec.active = false;
}

std::vector<int> Coordinator::deregisterExited(double t) {
  std::vector<int> out;
  for (auto& [id, rec] : records_) {
    if (rec.active && rec.committed && rec.committed->plan.exitTime <= t) {
      rec.active = false;
      out.push_back(id);
    }
  }
  return out;
}

bool Coordinator::isActive(int id) const { return record(id).active; }

std::vector<int> Coordinator::activeIds() const {
  std::vector<int> out;
  for (const auto& [id, rec] : records_) {
    if (rec.active) out.push_back(id);
  }
  return out;
}

std::vector<ZoneBooking> Coordinator::bookings(int id, int zone) const {
  std::vector<ZoneBooking> out;
  const auto& lat = record(id).conflicts.lateral;
  const auto it = lat.find(zone);
  if (it == lat.end()) return out;
  for (int j : it->second) {
    const VehicleRecord& r = record(j);
    if (!r.committed) continue;
    const SchedulePlan& p = r.committed->plan;
    for (std::size_t k = 0; k < p.zones.size(); ++k) {
      if (p.zones[k] == zone) out.push_back({j, p.arrivals[k], p.occupancy[k]});
    }
  }
  return out;
}

std::optional<int> Coordinator::immediatePredecessor(int id, int lane) const {
  const auto& a = record(id).conflicts.sameLaneAhead;
  const auto it = a.find(lane);
  if (it == a.end() || it->second.empty()) return std::nullopt;
  return *it->second.rbegin();
}

bool Coordinator::laneChangeZoneOccupied(int id, double t) const {
  for (const auto& [lane, ids] : record(id).conflicts.sameLaneAhead) {
    for (int j : ids) {
      const VehicleRecord& r = record(j);
      if (r.committed && r.committed->gammaBegin <= t && t <= r.committed->gammaEnd) return true;
    }
  }
  return false;
}

SchedulingContext Coordinator::schedulingContext(int id, double safeDistance) const {
  const VehicleRecord& rec = record(id);
  SchedulingContext ctx;
  ctx.path = rec.entry.path;
  ctx.t0 = rec.entry.t0;
  ctx.v0 = rec.entry.v0;
  ctx.zoneLength = corridor_->mergingZoneLength();
  ctx.safeDistance = safeDistance;
  ctx.entryLane = rec.entry.path.entryLane;
  ctx.lanes = corridor_->lanesPerRoad();
  ctx.laneChangeZoneOccupied = laneChangeZoneOccupied(id, rec.entry.t0);
  for (int z : ctx.path.zonesOnPath) {
    auto b = bookings(id, z);
    if (!b.empty()) ctx.bookings[z] = std::move(b);
  }
  for (int l = 1; l <= ctx.lanes; ++l) {
    const auto k = immediatePredecessor(id, l);
    if (!k) continue;
    const VehicleRecord& r = record(*k);
    if (!r.committed) continue;
    PredecessorPlan pp;
    pp.vehicle = *k;
    pp.vAvg = r.committed->plan.vAvg;
    pp.trajectory = r.committed->trajectory;
    for (std::size_t q = 0; q < r.committed->plan.zones.size(); ++q) {
      pp.arrivals[r.committed->plan.zones[q]] = r.committed->plan.arrivals[q];
    }
    ctx.predecessorByLane[l] = std::move(pp);
  }
  return ctx;
}

}  // namespace cavcoord
