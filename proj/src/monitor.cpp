#include "cavcoord/monitor.hpp"

#include <algorithm>

namespace cavcoord {

ZoneLocator::ZoneLocator(const Corridor& corridor) : zoneLength_(corridor.mergingZoneLength()) {
  for (const Movement& m : corridor.movements()) paths_.emplace(m, corridor.path(m, 1));
}

int ZoneLocator::zoneAt(const Movement& m, double p) const {
  const PathSpec& path = paths_.at(m);
  for (std::size_t k = 0; k < path.zonesOnPath.size(); ++k) {
    const double a = path.zoneEntryOffsets[k];
    if (p > a + 1e-6 && p < a + zoneLength_ - 1e-6) return path.zonesOnPath[k];
  }
  return 0;
}

std::vector<Violation> checkFrame(const Frame& frame, const Corridor& corridor, double gap,
                                  double tol) {
  std::vector<Violation> out;
  const auto& vs = frame.vehicles;

  std::vector<std::size_t> order(vs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = vs[a];
    const auto& y = vs[b];
    if (x.movement != y.movement) return x.movement < y.movement;
    if (x.lane != y.lane) return x.lane < y.lane;
    if (x.p != y.p) return x.p > y.p;
    return x.id < y.id;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& lead = vs[order[k - 1]];
    const auto& fol = vs[order[k]];
    if (lead.movement != fol.movement || lead.lane != fol.lane) continue;
    const double g = lead.p - fol.p;
    if (g < gap - tol) out.push_back({frame.t, "rear_end", lead.id, fol.id, 0, g});
  }

  for (std::size_t a = 0; a < vs.size(); ++a) {
    if (vs[a].zone == 0) continue;
    for (std::size_t b = a + 1; b < vs.size(); ++b) {
      if (vs[b].zone != vs[a].zone) continue;
      if (!corridor.zoneConflict(vs[a].zone, vs[a].movement, vs[b].movement)) continue;
      const int first = std::min(vs[a].id, vs[b].id);
      const int second = std::max(vs[a].id, vs[b].id);
      out.push_back({frame.t, "lateral", first, second, vs[a].zone, 0.0});
    }
  }
  return out;
}

std::vector<Violation> monitorFrames(const std::vector<Frame>& frames, const Corridor& corridor,
                                     double gap, bool parallel, double tol) {
  std::vector<std::vector<Violation>> per(frames.size());
  const long n = static_cast<long>(frames.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) per[k] = checkFrame(frames[k], corridor, gap, tol);
  } else {
    for (long k = 0; k < n; ++k) per[k] = checkFrame(frames[k], corridor, gap, tol);
  }
  std::vector<Violation> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

}  // namespace cavcoord
