#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavcoord/monitor.hpp"
#include "cavcoord/scenario.hpp"

namespace cavcoord {

struct Event {
  double t = 0.0;
  std::string event;
  int vehicle = 0;
  std::string detail;
};

struct VehicleResult {
  int id = 0;
  Movement movement;
  int entryLane = 1;
  int finalLane = 1;
  double t0 = 0.0;
  double v0 = 0.0;
  double tf = 0.0;
  double pathLength = 0.0;
  double travelTime = 0.0;
  double delay = 0.0;
  double fuel = 0.0;       // ml over [t0, tf]
  double minSpeed = 0.0;
  double latencyMs = 0.0;  // wall clock, optimal runs only
  int reschedules = 0;
  bool unconflicted = false;  // schedule equal to every lower bound
  std::string arcs;           // arc kinds, optimal runs only
};

struct EnvelopeSample {
  double t = 0.0;
  int count = 0;
  double vMin = 0.0;
  double vMean = 0.0;
  double vMax = 0.0;
};

struct RunArtifacts {
  std::string mode;  // "optimal" or "baseline"
  std::string scenario;
  double volume = 0.0;
  std::uint64_t seed = 0;
  std::vector<VehicleResult> vehicles;  // in entry order
  std::vector<Frame> frames;            // playback, empty unless kept
  std::vector<EnvelopeSample> envelope;
  std::vector<Event> events;
  std::vector<Violation> violations;
};

/// Min/mean/max speed of the vehicles present in each frame.
std::vector<EnvelopeSample> speedEnvelope(const std::vector<Frame>& frames);

}  // namespace cavcoord
