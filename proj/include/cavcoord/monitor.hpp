#pragma once

#include <map>
#include <string>
#include <vector>

#include "cavcoord/scenario.hpp"

namespace cavcoord {

struct VehicleSnapshot {
  int id = 0;
  Movement movement;
  int lane = 1;  // lane label at this instant
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
  int zone = 0;  // merging zone currently occupied, 0 if none
};

struct Frame {
  double t = 0.0;
  std::vector<VehicleSnapshot> vehicles;
};

struct Violation {
  double t = 0.0;
  std::string kind;  // "rear_end" or "lateral"
  int leader = 0;
  int follower = 0;
  int zone = 0;
  double value = 0.0;  // measured gap for rear_end
};

/// Locates vehicles inside merging zones. Zone interiors are open intervals,
/// so a vehicle leaving exactly as another enters is not an overlap.
class ZoneLocator {
 public:
  explicit ZoneLocator(const Corridor& corridor);
  int zoneAt(const Movement& m, double p) const;

 private:
  double zoneLength_;
  std::map<Movement, PathSpec> paths_;
};

/// Same-lane gap >= gap - tol for vehicles of one movement sharing a lane
/// label, and no two laterally conflicting vehicles inside one zone.
std::vector<Violation> checkFrame(const Frame& frame, const Corridor& corridor, double gap,
                                  double tol = 1e-6);

/// Runs checkFrame over every frame. The parallel variant splits frames
/// across OpenMP threads; output order matches the serial one.
std::vector<Violation> monitorFrames(const std::vector<Frame>& frames, const Corridor& corridor,
                                     double gap, bool parallel, double tol = 1e-6);

}  // namespace cavcoord
