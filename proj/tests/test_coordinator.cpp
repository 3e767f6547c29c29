#include <gtest/gtest.h>

#include <memory>

#include "cavcoord/coordinator.hpp"
#include "cavcoord/ocp.hpp"
#include "cavcoord/scheduler.hpp"

using namespace cavcoord;

namespace {

const Movement kEB{Approach::Eastbound, -1};
const Movement kWB{Approach::Westbound, -1};
const Movement kNB0{Approach::Northbound, 0};
const Movement kSB2{Approach::Southbound, 2};

struct Fixture : ::testing::Test {
  Corridor corridor = buildCorridor({});
  Coordinator coord{corridor, 30.0};

  int enter(const Movement& m, int lane, double t0, double v0) {
    return coord.registerVehicle({corridor.path(m, lane), t0, v0});
  }

  // Plans and commits the vehicle with the plain recursion and an
  // unconstrained trajectory.
  SchedulePlan planAndCommit(int id) {
    const SchedulingContext ctx = coord.schedulingContext(id, 6.0);
    SchedulePlan plan = chooseLane(ctx);
    const BoundaryData b = boundaryFromPlan(plan, ctx.path, ctx.t0, ctx.v0, 15.0);
    auto tr = std::make_shared<const Trajectory>(solveUnconstrained(b).trajectory);
    coord.commit(id, plan, tr);
    return plan;
  }
};

}  // namespace

TEST_F(Fixture, FirstVehicleHasEmptySets) {
  const int id = enter(kEB, 1, 0.0, 12.5);
  EXPECT_EQ(id, 1);
  const ConflictSets& c = coord.record(id).conflicts;
  EXPECT_TRUE(c.sameLaneAhead.empty());
  EXPECT_TRUE(c.lateral.empty());
  EXPECT_TRUE(c.noConflict.empty());
  EXPECT_EQ(coord.nextIndex(), 2);
}

TEST_F(Fixture, SetsPartitionEarlierVehicles) {
  enter(kEB, 1, 0.0, 12.5);   // 1: same movement, lane 1
  enter(kEB, 2, 0.5, 12.5);   // 2: same movement, lane 2
  enter(kNB0, 1, 1.0, 12.5);  // 3: crosses zone 1
  enter(kSB2, 2, 1.5, 12.5);  // 4: crosses zone 3
  enter(kWB, 1, 2.0, 12.5);   // 5: opposite direction, never conflicts
  const int i = enter(kEB, 1, 3.0, 12.5);
  const ConflictSets& c = coord.record(i).conflicts;
  EXPECT_EQ(c.sameLaneAhead.at(1), (std::set<int>{1}));
  EXPECT_EQ(c.sameLaneAhead.at(2), (std::set<int>{2}));
  EXPECT_EQ(c.lateral.at(1), (std::set<int>{3}));
  EXPECT_EQ(c.lateral.at(3), (std::set<int>{4}));
  EXPECT_EQ(c.lateral.count(2), 0u);
  EXPECT_EQ(c.noConflict, (std::set<int>{5}));

  std::multiset<int> seen;
  for (const auto& [_, ids] : c.sameLaneAhead) seen.insert(ids.begin(), ids.end());
  for (const auto& [_, ids] : c.lateral) seen.insert(ids.begin(), ids.end());
  seen.insert(c.noConflict.begin(), c.noConflict.end());
  EXPECT_EQ(seen, (std::multiset<int>{1, 2, 3, 4, 5}));
}

TEST(OrderEntrants, ShorterPathFirstThenTieKey) {
  const Corridor c = buildCorridor({});
  std::vector<PendingEntry> e;
  EntryState longer{c.path(kEB, 1), 5.0, 12.0};
  longer.path.pathLength = 405.0;
  EntryState shorter{c.path(kEB, 2), 5.0, 12.0};
  shorter.path.pathLength = 330.0;
  e.push_back({longer, 1});
  e.push_back({shorter, 9});
  orderEntrants(e);
  EXPECT_DOUBLE_EQ(e[0].entry.path.pathLength, 330.0);

  EntryState a{c.path(kNB0, 1), 5.0, 12.0};
  EntryState b{c.path(kSB2, 1), 5.0, 12.0};
  std::vector<PendingEntry> f{{a, 7}, {b, 3}};
  orderEntrants(f);
  EXPECT_EQ(f[0].tieKey, 3u);
  EXPECT_EQ(f[1].tieKey, 7u);
}

TEST_F(Fixture, CruiseGammaInterval) {
  const int id = enter(kEB, 1, 4.0, 12.5);
  planAndCommit(id);
  const CommittedPlan& p = *coord.record(id).committed;
  EXPECT_DOUBLE_EQ(p.gammaBegin, 4.0);
  EXPECT_NEAR(p.gammaEnd, 6.4, 1e-9);
}

TEST_F(Fixture, BookingsFollowCommits) {
  const int j = enter(kNB0, 1, 0.0, 12.5);
  const SchedulePlan pj = planAndCommit(j);
  const int w = enter(kWB, 1, 0.0, 12.5);
  planAndCommit(w);
  const int i = enter(kEB, 1, 0.2, 12.5);
  const auto b = coord.bookings(i, 1);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].vehicle, j);
  EXPECT_DOUBLE_EQ(b[0].arrival, *pj.arrivalAt(1));
  // the westbound vehicle shares zones but never conflicts
  for (int z = 1; z <= 3; ++z) {
    for (const ZoneBooking& x : coord.bookings(i, z)) EXPECT_NE(x.vehicle, w);
  }
}

TEST_F(Fixture, LaneChangeOccupancy) {
  const int a = enter(kEB, 1, 0.0, 12.5);
  planAndCommit(a);
  const int b = enter(kEB, 2, 1.0, 12.5);
  EXPECT_TRUE(coord.laneChangeZoneOccupied(b, 1.0));
  EXPECT_FALSE(coord.laneChangeZoneOccupied(b, 3.0));
}

TEST_F(Fixture, CommitAndDeregisterErrors) {
  const int id = enter(kEB, 1, 0.0, 12.5);
  const SchedulePlan p = planAndCommit(id);
  EXPECT_THROW(coord.commit(id, p, coord.record(id).committed->trajectory), std::logic_error);
  EXPECT_THROW(coord.commit(id, p, nullptr), std::exception);
  EXPECT_TRUE(coord.isActive(id));
  coord.deregister(id);
  EXPECT_FALSE(coord.isActive(id));
  EXPECT_TRUE(coord.activeIds().empty());
  // archive keeps the trajectory
  EXPECT_TRUE(coord.record(id).committed->trajectory);
  EXPECT_THROW(coord.deregister(id), std::logic_error);
  EXPECT_THROW(coord.deregister(99), std::out_of_range);
}

TEST_F(Fixture, DeregisterExitedUsesExitTime) {
  const int id = enter(kNB0, 1, 0.0, 12.5);
  planAndCommit(id);
  EXPECT_TRUE(coord.deregisterExited(13.0).empty());
  EXPECT_EQ(coord.deregisterExited(13.2), (std::vector<int>{id}));
  // exited vehicles are not in later conflict sets
  const int k = enter(kEB, 1, 14.0, 12.5);
  EXPECT_TRUE(coord.record(k).conflicts.lateral.empty());
}

TEST_F(Fixture, RejectsPathWithoutZones) {
  EntryState e{corridor.path(kEB, 1), 0.0, 12.5};
  e.path.zonesOnPath.clear();
  EXPECT_THROW(coord.registerVehicle(e), ValidationError);
}
