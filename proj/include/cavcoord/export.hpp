#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cavcoord/config.hpp"
#include "cavcoord/metrics.hpp"
#include "cavcoord/run.hpp"
#include "cavcoord/sweep.hpp"

namespace cavcoord {

// Stream writers. Numbers are printed with fixed precision so reruns of the
// same configuration give byte-identical files. Wall-clock latency lives only
// in the latency table.

/// `vehicle_id,t,p,v,u,lane,zone_flag`, one row per vehicle per kept frame.
void writeTrajectoryCsv(std::ostream& out, const RunArtifacts& run);
/// One JSON object per line: {"t", "event", "vehicle_id", "detail"}.
void writeEventsJsonl(std::ostream& out, const RunArtifacts& run);
void writeEnvelopeCsv(std::ostream& out, const RunArtifacts& run);
void writeVehicleCsv(std::ostream& out, const std::vector<RunArtifacts>& runs);
void writeRunSummaryCsv(std::ostream& out, const std::vector<RunSummary>& runs);
/// Per volume: baseline vs optimal travel time, delay and fuel with
/// improvement percentages.
void writeComparisonCsv(std::ostream& out, const std::vector<ComparisonRow>& rows);
void writeLatencyCsv(std::ostream& out, const std::vector<RunSummary>& runs);
std::string summaryJson(const ScenarioConfig& config, const std::vector<RunSummary>& runs);

/// Human-readable comparison table for the terminal.
void printComparison(std::ostream& out, const std::vector<ComparisonRow>& rows);

struct ExportOptions {
  bool trajectories = false;  // needs runs with kept frames
  bool events = true;
  bool envelopes = true;
};

/// Writes the full artifact tree under `dir` and a manifest.json listing the
/// files, the config hash, volumes, seeds and the software version. Returns
/// the written paths relative to `dir`.
std::vector<std::string> exportSweep(const std::string& dir, const ScenarioConfig& config,
                                     const SweepResult& sweep, const std::vector<double>& volumes,
                                     const std::vector<std::uint64_t>& seeds,
                                     const ExportOptions& options);

std::string softwareVersion();

}  // namespace cavcoord
