#pragma once

#include "beaconsync/baseline.hpp"
#include "beaconsync/ingest.hpp"
#include "beaconsync/medium.hpp"
#include "beaconsync/protocol.hpp"
#include "beaconsync/scenario.hpp"
#include "beaconsync/stats.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace beaconsync {

inline constexpr const char* kMethodBeacon = "beacon_sync";
inline constexpr const char* kMethodBaseline = "ptp_baseline";

/// A station adopting a new (t_TSN[t_bf], t_station[t_bf]) pair.
struct CorrectionRecord {
    SimTime at; // true time the tuple was applied
    std::string station;
    std::uint64_t t_bf = 0;
    /// Estimate evaluated at the station's own beacon timestamp, minus the
    /// true instant the beacon reached the station.
    std::int64_t error_at_beacon_ns = 0;

    friend bool operator==(const CorrectionRecord&, const CorrectionRecord&) = default;
};

/// One completed two-way exchange with the true one-way delays behind it.
struct ExchangeRecord {
    std::string station;
    TwoWayExchange timestamps;
    Duration downlink; // master timestamp to slave timestamp, true time
    Duration uplink;   // slave timestamp to master timestamp, true time
    Duration estimate;
    std::int64_t estimate_twice_ns = 0;
    /// True slave-minus-master clock offset at the master's send timestamp.
    std::int64_t true_offset_ns = 0;
};

struct RunResult {
    std::string scenario;
    std::vector<OffsetSample> samples;
    std::map<std::string, std::uint64_t> counters;
    std::vector<TraceEvent> trace;
    std::vector<CorrectionRecord> corrections;
    std::vector<ExchangeRecord> exchanges;
    std::map<std::string, StationSnapshot> station_states;
    std::map<std::string, std::int64_t> station_drift_ppb;
    std::vector<CaptureRecord> reference_capture;
    std::map<std::string, std::vector<CaptureRecord>> station_captures;
    Octets tuple_log;
};

/// Deterministic given the configuration (including its seed).
RunResult run_scenario(const ScenarioConfig& cfg);

/// Writes the outputs configured in cfg.output (samples CSV, trace, report,
/// captures, tuple log) under `out_dir` (or the scenario's directory when
/// empty). Each file is written to a temporary name and renamed into place.
void write_outputs(const ScenarioConfig& cfg, const RunResult& result, const std::filesystem::path& out_dir,
                   const std::string& report_format = "json");

std::string trace_text(const std::vector<TraceEvent>& trace);
std::string samples_csv(const std::vector<OffsetSample>& samples);

} // namespace beaconsync
